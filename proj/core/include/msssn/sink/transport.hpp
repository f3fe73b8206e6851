#pragma once

#include <functional>
#include <vector>

#include "msssn/packet.hpp"
#include "msssn/radio/link_layer.hpp"
#include "msssn/radio/medium.hpp"
#include "msssn/sim/simulator.hpp"
#include "msssn/world/world.hpp"

namespace msssn::sink {

/// Sink-to-sink messaging used by the sink plane. Receivers are reported
/// through the receive handler; unicast senders learn the outcome through
/// `done`.
class SinkTransport {
public:
    using Receive = std::function<void(NodeId to, const Packet&, NodeId from)>;
    using Done = std::function<void(bool delivered)>;

    virtual ~SinkTransport() = default;

    void set_receive(Receive r) { receive_ = std::move(r); }

    /// One-hop broadcast to every sink in range.
    virtual void broadcast(NodeId from, Packet packet) = 0;
    virtual void unicast(NodeId from, NodeId to, Packet packet, Done done) = 0;

    /// Transmissions handed to this transport.
    [[nodiscard]] std::uint64_t transmissions() const { return transmissions_; }

protected:
    void received(NodeId to, const Packet& p, NodeId from) {
        if (receive_) receive_(to, p, from);
    }
    std::uint64_t transmissions_ = 0;

private:
    Receive receive_;
};

/// Collision-free sink link: every alive sink within the sender's range at
/// the start of a transmission receives it after bits / bitrate. A sender
/// serialises its own transmissions.
class IdealTransport final : public SinkTransport {
public:
    IdealTransport(sim::Simulator& sim, const std::vector<SinkNode>& sinks, double bitrate);

    void broadcast(NodeId from, Packet packet) override;
    void unicast(NodeId from, NodeId to, Packet packet, Done done) override;

private:
    double start_time(NodeId from, double airtime);

    sim::Simulator& sim_;
    const std::vector<SinkNode>& sinks_;
    double bitrate_;
    std::vector<double> busy_until_;
};

/// Sink link over the shared medium on the sink-sink channel. The owner of
/// the Medium receive handler forwards sink-bound packets to on_receive().
class MacTransport final : public SinkTransport {
public:
    MacTransport(radio::LinkLayer& link, radio::AddressBook book, int channel);

    void broadcast(NodeId from, Packet packet) override;
    void unicast(NodeId from, NodeId to, Packet packet, Done done) override;

    void on_receive(radio::Address receiver, const Packet& p, radio::Address from);

private:
    radio::LinkLayer& link_;
    radio::AddressBook book_;
    int channel_;
};

}  // namespace msssn::sink
