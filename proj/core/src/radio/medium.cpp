#include "msssn/radio/medium.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>

#include "msssn/error.hpp"

namespace msssn::radio {

Medium::Medium(sim::Simulator& sim, MacConfig cfg) : sim_(sim), cfg_(cfg) { cfg_.validate(); }

Address Medium::add_node(NodeRole role, Position pos, double tx_range, int channel) {
    Node n;
    n.role = role;
    n.pos = pos;
    n.tx_range = tx_range;
    n.channel = channel;
    nodes_.push_back(std::move(n));
    return static_cast<Address>(nodes_.size() - 1);
}

bool Medium::is_tuned(Address a, int ch) const {
    const Node& n = node(a);
    return n.channel == ch && sim_.now() >= n.deaf_until;
}

double Medium::rx_busy_until(Address a) const {
    double until = sim_.now();
    for (const auto& r : node(a).incoming) {
        for (const auto& t : active_) {
            if (t.id == r.tx_id) until = std::max(until, t.end);
        }
    }
    return until;
}

std::vector<Address> Medium::neighbors(Address a, int ch) const {
    const Node& self = node(a);
    std::vector<Address> out;
    if (!self.alive) return out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto addr = static_cast<Address>(i);
        if (addr == a) continue;
        const Node& n = nodes_[i];
        if (!n.alive || !is_tuned(addr, ch)) continue;
        if (distance(self.pos, n.pos) <= self.tx_range) out.push_back(addr);
    }
    return out;
}

Medium::ActiveTx* Medium::find_tx(std::uint64_t id) {
    for (auto& t : active_) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

void Medium::abort_receptions(Address a, double now) {
    Node& n = node(a);
    for (auto& r : n.incoming) {
        if (log_activity_) n.activity.push_back({r.start, now, ActivityKind::rx, n.channel, 0.0});
        r.aborted = true;
    }
    // Aborted receptions are dropped here; finish() treats a missing entry as
    // not delivered.
    n.incoming.clear();
}

void Medium::kill(Address a) {
    Node& n = node(a);
    if (!n.alive) return;
    const double now = sim_.now();
    abort_receptions(a, now);
    if (n.tx_id != 0) {
        if (auto* t = find_tx(n.tx_id)) t->aborted = true;
    }
    n.alive = false;
}

std::uint64_t Medium::transmit(Address src, Packet packet, int ch, Address dest, DoneCallback done) {
    Node& s = node(src);
    const double now = sim_.now();
    if (!s.alive) throw NodeDead(fmt::format("node {} is dead", src));
    if (s.tx_id != 0 || !s.incoming.empty()) throw Busy(fmt::format("node {} is busy", src));
    if (!is_tuned(src, ch)) {
        throw WrongChannel(fmt::format("node {} not tuned to channel {} (on {}, ready at {})", src, ch, s.channel,
                                       s.deaf_until));
    }
    if (!(packet.bits > 0)) throw InvalidArgument("transmission of an empty packet");

    const double duration = cfg_.airtime(packet.bits);
    ActiveTx tx;
    tx.id = next_tx_id_++;
    tx.src = src;
    tx.dest = dest;
    tx.channel = ch;
    tx.origin = s.pos;
    tx.range = s.tx_range;
    tx.start = now;
    tx.end = now + duration;
    tx.done = std::move(done);

    double drain_distance = s.tx_range;
    if (dest != kBroadcast) drain_distance = std::min(distance(s.pos, node(dest).pos), s.tx_range);
    s.tx_id = tx.id;
    if (log_activity_) s.activity.push_back({now, tx.end, ActivityKind::tx, ch, 0.0});
    if (energy_hook_) energy_hook_(src, packet.bits, drain_distance, RadioMode::tx, now);
    tx.packet = std::move(packet);

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto addr = static_cast<Address>(i);
        if (addr == src) continue;
        Node& r = nodes_[i];
        if (!r.alive || distance(tx.origin, r.pos) > tx.range) continue;
        if (r.channel != ch || now < r.deaf_until || r.tx_id != 0) continue;
        bool interfered = false;
        for (const auto& u : active_) {
            if (u.aborted || u.channel != ch || u.src == addr || !(u.end > now)) continue;
            if (distance(u.origin, r.pos) <= u.range) {
                interfered = true;
                break;
            }
        }
        if (interfered || !r.incoming.empty()) {
            interfered = true;
            for (auto& other : r.incoming) other.corrupted = true;
        }
        r.incoming.push_back({tx.id, now, interfered, false});
        tx.receivers.push_back(addr);
    }

    const std::uint64_t id = tx.id;
    active_.push_back(std::move(tx));
    sim_.schedule(now + duration, "tx_end", [this, id] { finish(id); }, {src, dest});
    return id;
}

void Medium::finish(std::uint64_t id) {
    auto it = std::find_if(active_.begin(), active_.end(), [id](const ActiveTx& t) { return t.id == id; });
    if (it == active_.end()) return;
    ActiveTx tx = std::move(*it);
    active_.erase(it);
    const double now = sim_.now();

    Node& s = node(tx.src);
    s.tx_id = 0;

    TxResult result;
    result.tx_id = tx.id;
    result.src = tx.src;
    result.dest = tx.dest;
    result.channel = tx.channel;
    result.bits = tx.packet.bits;
    result.start = tx.start;
    result.end = tx.end;
    result.aborted = tx.aborted;

    std::vector<Address> pass_up;
    for (Address addr : tx.receivers) {
        Node& r = node(addr);
        auto rit = std::find_if(r.incoming.begin(), r.incoming.end(),
                                [id](const Reception& rc) { return rc.tx_id == id; });
        bool ok = false;
        if (rit != r.incoming.end()) {
            ok = !rit->corrupted && !rit->aborted && !tx.aborted && r.alive && r.channel == tx.channel;
            if (log_activity_) r.activity.push_back({rit->start, now, ActivityKind::rx, tx.channel, 0.0});
            r.incoming.erase(rit);
        }
        result.verdicts.push_back({addr, ok});
        if (ok && (tx.dest == kBroadcast || tx.dest == addr)) pass_up.push_back(addr);
    }

    std::vector<Address> delivered;
    for (Address addr : pass_up) {
        bool still_alive = true;
        if (energy_hook_) still_alive = energy_hook_(addr, tx.packet.bits, 0.0, RadioMode::rx, now);
        if (still_alive) delivered.push_back(addr);
    }
    if (tx.dest != kBroadcast) {
        result.dest_delivered = std::find(delivered.begin(), delivered.end(), tx.dest) != delivered.end();
    } else {
        result.dest_delivered = !tx.aborted;
    }

    if (trace_ != nullptr) write_trace(result);
    if (observer_) observer_(result);
    if (receive_) {
        for (Address addr : delivered) {
            if (node(addr).alive) receive_(addr, tx.packet, tx.src);
        }
    }
    if (tx.done) tx.done(result);
}

double Medium::switch_channel(Address a, int ch) {
    Node& n = node(a);
    const double now = sim_.now();
    if (!n.alive) throw NodeDead(fmt::format("node {} is dead", a));
    if (n.tx_id != 0) throw Busy(fmt::format("node {} cannot switch mid-transmission", a));
    if (n.channel == ch) return std::max(now, n.deaf_until);
    if (now < n.deaf_until) throw Busy(fmt::format("node {} is already switching", a));
    abort_receptions(a, now);
    n.channel = ch;
    n.deaf_until = now + cfg_.switch_latency;
    if (log_activity_) {
        n.activity.push_back({now, n.deaf_until, ActivityKind::switching, ch, cfg_.switch_latency});
    }
    return n.deaf_until;
}

void Medium::write_trace(const TxResult& r) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), R"({{"rec":"tx","t":{},"end":{},"src":{},"dest":{},"ch":{},"bits":{},"verdicts":[)",
                   r.start, r.end, r.src, r.dest, r.channel, r.bits);
    for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
        fmt::format_to(std::back_inserter(buf), "{}[{},{}]", i ? "," : "", r.verdicts[i].receiver,
                       r.verdicts[i].delivered ? 1 : 0);
    }
    fmt::format_to(std::back_inserter(buf), "]}}\n");
    trace_->write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace msssn::radio
