#include "msssn/sink/takeover.hpp"

#include <fmt/format.h>

#include <limits>

#include "msssn/error.hpp"

namespace msssn::sink {

NodeId choose_takeover_sink(const World& world, RegionId r, NodeId exclude) {
    const Position c = world.regions().at(static_cast<std::size_t>(r)).bounds.centroid();
    NodeId best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& s : world.sinks()) {
        if (!s.alive || s.id == exclude) continue;
        const double d = distance(s.pos, c);
        if (d < best_d) {
            best_d = d;
            best = s.id;
        }
    }
    if (best < 0) throw NoSinkAvailable(fmt::format("no alive sink can take over region {}", r));
    return best;
}

std::vector<std::pair<RegionId, NodeId>> takeover(World& world, NodeId failed) {
    auto& f = world.sinks().at(static_cast<std::size_t>(failed));
    std::vector<std::pair<RegionId, NodeId>> moves;
    for (RegionId r : f.covered_regions) moves.emplace_back(r, choose_takeover_sink(world, r, failed));
    for (const auto& [r, s] : moves) world.sinks()[static_cast<std::size_t>(s)].covered_regions.insert(r);
    // A sink suspected in error keeps its regions; the taker simply shares them.
    if (!f.alive) f.covered_regions.clear();
    return moves;
}

FailureDetector::FailureDetector(int n_sinks, double period, int missed)
    : period_(period),
      missed_(missed),
      last_(static_cast<std::size_t>(n_sinks), std::vector<double>(static_cast<std::size_t>(n_sinks), 0.0)),
      declared_(static_cast<std::size_t>(n_sinks), false) {
    if (!(period > 0)) throw InvalidArgument("heartbeat period must be > 0");
    if (missed < 1) throw InvalidArgument("missed heartbeat threshold must be >= 1");
}

void FailureDetector::heard(NodeId observer, NodeId from, double t) {
    auto& v = last_.at(static_cast<std::size_t>(observer)).at(static_cast<std::size_t>(from));
    v = std::max(v, t);
}

std::vector<NodeId> FailureDetector::check(double now, const std::vector<bool>& observer_alive) {
    std::vector<NodeId> out;
    const std::size_t n = declared_.size();
    for (std::size_t s = 0; s < n; ++s) {
        if (declared_[s]) continue;
        double latest = 0.0;
        double ever = 0.0;
        bool watched = false;
        for (std::size_t o = 0; o < n; ++o) {
            if (o == s) continue;
            ever = std::max(ever, last_[o][s]);
            if (observer_alive[o]) {
                watched = true;
                latest = std::max(latest, last_[o][s]);
            }
        }
        // With no peer left to listen, the remote user only notices a sink
        // once its own uplink goes quiet, i.e. when it is gone.
        const bool silent = watched ? now - latest > missed_ * period_
                                    : !observer_alive[s] && now - ever > missed_ * period_;
        if (silent) {
            declared_[s] = true;
            out.push_back(static_cast<NodeId>(s));
        }
    }
    return out;
}

}  // namespace msssn::sink
