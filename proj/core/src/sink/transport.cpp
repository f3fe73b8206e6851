#include "msssn/sink/transport.hpp"

#include <algorithm>

namespace msssn::sink {

IdealTransport::IdealTransport(sim::Simulator& sim, const std::vector<SinkNode>& sinks, double bitrate)
    : sim_(sim), sinks_(sinks), bitrate_(bitrate) {}

double IdealTransport::start_time(NodeId from, double airtime) {
    if (busy_until_.size() < sinks_.size()) busy_until_.resize(sinks_.size(), 0.0);
    auto& busy = busy_until_.at(static_cast<std::size_t>(from));
    const double start = std::max(sim_.now(), busy);
    busy = start + airtime;
    return start;
}

void IdealTransport::broadcast(NodeId from, Packet packet) {
    const auto& src = sinks_.at(static_cast<std::size_t>(from));
    if (!src.alive) return;
    const double airtime = packet.bits / bitrate_;
    const double start = start_time(from, airtime);
    ++transmissions_;
    sim_.schedule(start + airtime, "sink_bcast", [this, from, packet = std::move(packet)] {
        const auto& s = sinks_[static_cast<std::size_t>(from)];
        if (!s.alive) return;
        for (const auto& r : sinks_) {
            if (r.id == from || !r.alive || distance(s.pos, r.pos) > s.tx_range) continue;
            received(r.id, packet, from);
        }
    }, from);
}

void IdealTransport::unicast(NodeId from, NodeId to, Packet packet, Done done) {
    const auto& src = sinks_.at(static_cast<std::size_t>(from));
    if (!src.alive) {
        if (done) done(false);
        return;
    }
    const double airtime = packet.bits / bitrate_;
    const double start = start_time(from, airtime);
    ++transmissions_;
    sim_.schedule(start + airtime, "sink_ucast", [this, from, to, packet = std::move(packet), done = std::move(done)] {
        const auto& s = sinks_[static_cast<std::size_t>(from)];
        const auto& r = sinks_.at(static_cast<std::size_t>(to));
        const bool ok = s.alive && r.alive && distance(s.pos, r.pos) <= s.tx_range;
        if (ok) received(to, packet, from);
        if (done) done(ok);
    }, {from, to});
}

MacTransport::MacTransport(radio::LinkLayer& link, radio::AddressBook book, int channel)
    : link_(link), book_(book), channel_(channel) {}

void MacTransport::broadcast(NodeId from, Packet packet) {
    ++transmissions_;
    link_.send(book_.sink(from), std::move(packet), channel_, radio::kBroadcast, nullptr);
}

void MacTransport::unicast(NodeId from, NodeId to, Packet packet, Done done) {
    ++transmissions_;
    link_.send(book_.sink(from), std::move(packet), channel_, book_.sink(to), std::move(done));
}

void MacTransport::on_receive(radio::Address receiver, const Packet& p, radio::Address from) {
    if (!book_.is_sink(receiver) || !book_.is_sink(from)) return;
    received(book_.sink_id(receiver), p, book_.sink_id(from));
}

}  // namespace msssn::sink
