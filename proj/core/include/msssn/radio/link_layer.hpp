#pragma once

#include <deque>
#include <functional>
#include <vector>

#include "msssn/radio/channel.hpp"
#include "msssn/radio/medium.hpp"
#include "msssn/sim/rng.hpp"

namespace msssn::radio {

/// Per-node FIFO transmit queues on top of the Medium.
///
/// A queued packet is started at the first instant its channel's window is
/// open, the node is idle, and (for sensors) the radio has been retuned.
/// Sinks never retune on their own: their channel follows the schedule and
/// is driven by drive_sink_channels(). Sensors retune to the packet's channel
/// and return to their home channel when the queue no longer needs it.
/// There is no retransmission here; callers see the verdict and decide.
class LinkLayer {
public:
    using Done = std::function<void(bool delivered)>;

    LinkLayer(sim::Simulator& sim, Medium& medium, MacSchedule schedule, std::uint64_t master_seed);

    void register_node(Address a, int home_channel);

    void send(Address src, Packet packet, int channel, Address dest, Done done);

    /// Tunes a sensor to `channel` over [now, until] for listening (beacons).
    /// Returns false when the node is mid-transmission or mid-switch and
    /// cannot retune in time.
    bool hold_channel(Address a, int channel, double until);

    /// Fails every queued packet of a node (used on death).
    void drop_all(Address a);

    /// Schedules the sink channel plan: every sink flips between the
    /// sink-sink and sensor-sink channels at each phase boundary up to t_end.
    void drive_sink_channels(std::vector<Address> sinks, double t_end);

    [[nodiscard]] std::size_t queued(Address a) const { return station(a).queue.size(); }
    [[nodiscard]] const MacSchedule& schedule() const { return schedule_; }

private:
    struct Pending {
        Packet packet;
        int channel;
        Address dest;
        Done done;
    };
    struct Station {
        int home_channel = 0;
        std::deque<Pending> queue;
        bool in_flight = false;
        sim::EventId attempt_event = 0;
        double attempt_time = -1.0;
        int hold_channel = -1;
        double hold_until = -1.0;
        sim::RngStream rng{0, ""};
    };

    Station& station(Address a) { return stations_.at(static_cast<std::size_t>(a)); }
    [[nodiscard]] const Station& station(Address a) const { return stations_.at(static_cast<std::size_t>(a)); }
    void attempt(Address a);
    void schedule_attempt(Address a, double t);
    void settle_channel(Address a);
    void sink_phase_tick(double t_end);

    sim::Simulator& sim_;
    Medium& medium_;
    MacSchedule schedule_;
    std::uint64_t seed_;
    std::vector<Station> stations_;
    std::vector<Address> sinks_;
};

}  // namespace msssn::radio
