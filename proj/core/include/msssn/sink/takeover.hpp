#pragma once

#include <map>
#include <utility>
#include <vector>

#include "msssn/world/world.hpp"

namespace msssn::sink {

/// Alive sink nearest the centroid of region r, lowest id on ties. Throws
/// NoSinkAvailable when no sink is alive.
NodeId choose_takeover_sink(const World& world, RegionId r, NodeId exclude = -1);

/// Hands every region covered by `failed` to the nearest alive sink.
/// Returns (region, new owner) pairs in ascending region order. Throws
/// NoSinkAvailable (leaving the world untouched) when no sink survives.
std::vector<std::pair<RegionId, NodeId>> takeover(World& world, NodeId failed);

/// Remote-user failure policy: a sink is suspected once no sink has heard
/// its heartbeat for more than `missed * period` seconds. A last survivor
/// with no listening peer is only declared once it is actually down.
class FailureDetector {
public:
    FailureDetector(int n_sinks, double period, int missed);

    void heard(NodeId observer, NodeId from, double t);
    /// Sinks newly suspected at time `now`, ascending id. Each sink is
    /// reported once.
    std::vector<NodeId> check(double now, const std::vector<bool>& observer_alive);
    [[nodiscard]] bool declared(NodeId s) const { return declared_.at(static_cast<std::size_t>(s)); }

private:
    double period_;
    int missed_;
    // last_[observer][from]; initialised to 0 so silence from the start counts.
    std::vector<std::vector<double>> last_;
    std::vector<bool> declared_;
};

}  // namespace msssn::sink
