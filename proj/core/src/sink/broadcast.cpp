#include "msssn/sink/broadcast.hpp"

#include <fmt/format.h>

#include <boost/algorithm/string.hpp>
#include <cmath>
#include <numbers>

#include "msssn/error.hpp"

namespace msssn::sink {

BroadcastStrategy BroadcastStrategy::parse(std::string_view text) {
    std::string s(text);
    boost::algorithm::trim(s);
    const auto colon = s.find(':');
    const std::string name = boost::algorithm::to_lower_copy(s.substr(0, colon));
    const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    auto number = [&](double fallback) {
        if (arg.empty()) return fallback;
        try {
            std::size_t used = 0;
            const double v = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            return v;
        } catch (const std::exception&) {
            throw InvalidArgument(fmt::format("bad broadcast strategy parameter '{}'", arg));
        }
    };
    BroadcastStrategy b;
    if (name == "flood") {
        b = flood();
    } else if (name == "probabilistic") {
        b = probabilistic(number(0.5));
    } else if (name == "counter") {
        b = counter(static_cast<int>(number(1)));
    } else if (name == "location") {
        b = location(number(0.2));
    } else {
        throw InvalidArgument(fmt::format(
            "unknown broadcast strategy '{}' (valid: flood, probabilistic:P, counter:K, location:THETA)", name));
    }
    b.validate();
    return b;
}

std::string BroadcastStrategy::describe() const {
    switch (kind) {
        case StrategyKind::flood: return "flood";
        case StrategyKind::probabilistic: return fmt::format("probabilistic:{}", p);
        case StrategyKind::counter: return fmt::format("counter:{}", k);
        case StrategyKind::location: return fmt::format("location:{}", theta);
    }
    return "flood";
}

void BroadcastStrategy::validate() const {
    if (!(p >= 0 && p <= 1)) throw InvalidArgument(fmt::format("broadcast probability {} outside [0, 1]", p));
    if (k < 1) throw InvalidArgument(fmt::format("counter threshold k = {} must be >= 1", k));
    if (!(theta >= 0 && theta <= 1)) throw InvalidArgument(fmt::format("coverage threshold {} outside [0, 1]", theta));
    if (!(assessment_delay >= 0)) throw InvalidArgument("assessment delay must be >= 0");
}

double additional_coverage(const Position& center, double range, const std::vector<Position>& covered_by) {
    // 24 rings x 64 spokes, area-weighted so each sample stands for an equal share.
    constexpr int kRings = 24;
    constexpr int kSpokes = 64;
    int uncovered = 0;
    for (int i = 0; i < kRings; ++i) {
        const double r = range * std::sqrt((i + 0.5) / kRings);
        for (int j = 0; j < kSpokes; ++j) {
            const double a = 2 * std::numbers::pi * (j + 0.5) / kSpokes;
            const Position q{center.x + r * std::cos(a), center.y + r * std::sin(a)};
            bool covered = false;
            for (const auto& c : covered_by) {
                if (distance(q, c) <= range) {
                    covered = true;
                    break;
                }
            }
            if (!covered) ++uncovered;
        }
    }
    return static_cast<double>(uncovered) / (kRings * kSpokes);
}

Broadcaster::Broadcaster(sim::Simulator& sim, SinkTransport& transport, const std::vector<SinkNode>& sinks,
                         BroadcastStrategy strategy, std::uint64_t master_seed)
    : sim_(sim), transport_(transport), sinks_(sinks), strategy_(strategy), rng_(master_seed, "sink/broadcast") {
    strategy_.validate();
}

std::int64_t Broadcaster::originate(NodeId origin, FloodBody body, double bits) {
    const auto& o = sinks_.at(static_cast<std::size_t>(origin));
    if (!o.alive) throw NodeDead(fmt::format("sink {} is dead", origin));
    const std::int64_t id = next_id_++;
    const Key key{origin, id};
    bits_[key] = bits;
    seen_.insert({origin, key});
    auto& st = stats_[id];
    st.origin = origin;
    st.reached.insert(origin);
    Flooded f;
    f.origin = origin;
    f.broadcast_id = id;
    f.body = std::move(body);
    forward(origin, std::move(f));
    return id;
}

void Broadcaster::forward(NodeId at, Flooded copy) {
    const auto& s = sinks_[static_cast<std::size_t>(at)];
    if (!s.alive) return;
    copy.sender = at;
    copy.sender_pos = s.pos;
    copy.path.push_back(at);
    ++stats_[copy.broadcast_id].transmissions;
    const double bits = bits_.at(Key{copy.origin, copy.broadcast_id}) + 32.0 * static_cast<double>(copy.path.size());
    transport_.broadcast(at, Packet{bits, std::move(copy)});
}

void Broadcaster::on_receive(NodeId at, const Flooded& copy) {
    const Key key{copy.origin, copy.broadcast_id};
    const auto slot = std::make_pair(at, key);
    if (seen_.contains(slot)) {
        if (auto it = pending_.find(slot); it != pending_.end()) {
            ++it->second.extra_copies;
            it->second.senders.push_back(copy.sender_pos);
        }
        return;
    }
    seen_.insert(slot);
    stats_[copy.broadcast_id].reached.insert(at);
    if (deliver_) deliver_(at, copy);

    switch (strategy_.kind) {
        case StrategyKind::flood:
            break;
        case StrategyKind::probabilistic:
            if (!rng_.bernoulli(strategy_.p)) return;
            break;
        case StrategyKind::counter:
        case StrategyKind::location:
            pending_[slot] = Pending{copy, 0, {copy.sender_pos}};
            break;
    }
    const double delay = rng_.uniform(0.0, strategy_.assessment_delay);
    if (strategy_.kind == StrategyKind::counter || strategy_.kind == StrategyKind::location) {
        sim_.schedule_in(delay, "bcast_assess", [this, at, key] { decide(at, key); }, at);
    } else {
        sim_.schedule_in(delay, "bcast_fwd", [this, at, copy] { forward(at, copy); }, at);
    }
}

void Broadcaster::decide(NodeId at, Key key) {
    auto it = pending_.find({at, key});
    if (it == pending_.end()) return;
    Pending p = std::move(it->second);
    pending_.erase(it);
    bool send = true;
    if (strategy_.kind == StrategyKind::counter) {
        send = p.extra_copies < strategy_.k;
    } else {
        const auto& s = sinks_[static_cast<std::size_t>(at)];
        send = additional_coverage(s.pos, s.tx_range, p.senders) >= strategy_.theta;
    }
    if (send) forward(at, std::move(p.first));
}

BroadcastOutcome run_broadcast(const std::vector<SinkNode>& sinks, NodeId origin, const BroadcastStrategy& strategy,
                               std::uint64_t seed, double bits, double bitrate) {
    sim::Simulator sim;
    IdealTransport transport(sim, sinks, bitrate);
    Broadcaster b(sim, transport, sinks, strategy, seed);
    transport.set_receive([&](NodeId to, const Packet& p, NodeId) {
        if (const auto* f = std::get_if<Flooded>(&p.body)) b.on_receive(to, *f);
    });
    const auto id = b.originate(origin, OpaquePayload{}, bits);
    sim.run_until(1e9);
    const auto& st = b.stats(id);
    return {st.reached, st.transmissions};
}

}  // namespace msssn::sink
