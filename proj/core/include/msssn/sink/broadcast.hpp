#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "msssn/packet.hpp"
#include "msssn/sim/rng.hpp"
#include "msssn/sim/simulator.hpp"
#include "msssn/sink/transport.hpp"
#include "msssn/world/world.hpp"

namespace msssn::sink {

enum class StrategyKind { flood, probabilistic, counter, location };

struct BroadcastStrategy {
    StrategyKind kind = StrategyKind::flood;
    double p = 1.0;      // probabilistic: rebroadcast probability
    int k = 1;           // counter: suppress after k extra copies
    double theta = 0.2;  // location: minimum additional coverage fraction
    /// Upper bound of the random delay before a rebroadcast. Counter and
    /// location decisions are taken at its end.
    double assessment_delay = 0.01;

    static BroadcastStrategy flood() { return {}; }
    static BroadcastStrategy probabilistic(double p) { return {StrategyKind::probabilistic, p}; }
    static BroadcastStrategy counter(int k) { return {StrategyKind::counter, 1.0, k}; }
    static BroadcastStrategy location(double theta) { return {StrategyKind::location, 1.0, 1, theta}; }

    /// "flood", "probabilistic:0.5", "counter:2", "location:0.3".
    static BroadcastStrategy parse(std::string_view text);
    [[nodiscard]] std::string describe() const;
    void validate() const;
};

/// Fraction of the disk (center, range) not covered by disks of radius
/// `range` around `covered_by`. Evaluated on a fixed polar sample grid.
double additional_coverage(const Position& center, double range, const std::vector<Position>& covered_by);

/// Network-wide dissemination over a SinkTransport with duplicate
/// suppression by (origin, broadcast_id). Each sink forwards a given
/// broadcast at most once, after appending itself to the recorded path.
class Broadcaster {
public:
    /// First copy of a broadcast reaching a sink other than its origin.
    using Deliver = std::function<void(NodeId at, const Flooded& copy)>;

    Broadcaster(sim::Simulator& sim, SinkTransport& transport, const std::vector<SinkNode>& sinks,
                BroadcastStrategy strategy, std::uint64_t master_seed);

    void set_deliver(Deliver d) { deliver_ = std::move(d); }
    [[nodiscard]] const BroadcastStrategy& strategy() const { return strategy_; }

    /// Sends a new broadcast from `origin`; returns its id.
    std::int64_t originate(NodeId origin, FloodBody body, double bits);

    /// Feed every Flooded packet received from the transport here.
    void on_receive(NodeId at, const Flooded& copy);

    struct Stats {
        NodeId origin = -1;
        std::uint64_t transmissions = 0;
        std::set<NodeId> reached;  // includes the origin
    };
    [[nodiscard]] const Stats& stats(std::int64_t broadcast_id) const { return stats_.at(broadcast_id); }

private:
    struct Key {
        NodeId origin;
        std::int64_t id;
        auto operator<=>(const Key&) const = default;
    };
    struct Pending {
        Flooded first;
        int extra_copies = 0;
        std::vector<Position> senders;
    };

    void forward(NodeId at, Flooded copy);
    void decide(NodeId at, Key key);

    sim::Simulator& sim_;
    SinkTransport& transport_;
    const std::vector<SinkNode>& sinks_;
    BroadcastStrategy strategy_;
    sim::RngStream rng_;
    std::int64_t next_id_ = 0;
    std::map<Key, double> bits_;
    std::set<std::pair<NodeId, Key>> seen_;
    std::map<std::pair<NodeId, Key>, Pending> pending_;
    std::map<std::int64_t, Stats> stats_;
    Deliver deliver_;
};

/// Outcome of one isolated broadcast on a static sink layout.
struct BroadcastOutcome {
    std::set<NodeId> reached;
    std::uint64_t transmissions = 0;
};

/// Runs a single broadcast from `origin` over collision-free links and
/// reports who got it and how many transmissions it cost.
BroadcastOutcome run_broadcast(const std::vector<SinkNode>& sinks, NodeId origin, const BroadcastStrategy& strategy,
                               std::uint64_t seed, double bits = 512.0, double bitrate = 2e6);

}  // namespace msssn::sink
