#include "msssn/radio/link_layer.hpp"

#include <fmt/format.h>

#include <cmath>

#include "msssn/error.hpp"

namespace msssn::radio {

namespace {
constexpr double kNudge = 1e-9;
}

LinkLayer::LinkLayer(sim::Simulator& sim, Medium& medium, MacSchedule schedule, std::uint64_t master_seed)
    : sim_(sim), medium_(medium), schedule_(std::move(schedule)), seed_(master_seed) {}

void LinkLayer::register_node(Address a, int home_channel) {
    if (stations_.size() <= static_cast<std::size_t>(a)) stations_.resize(static_cast<std::size_t>(a) + 1);
    Station& st = station(a);
    st.home_channel = home_channel;
    st.rng = sim::RngStream(seed_, fmt::format("mac/{}", a));
}

void LinkLayer::send(Address src, Packet packet, int channel, Address dest, Done done) {
    Station& st = station(src);
    st.queue.push_back(Pending{std::move(packet), channel, dest, std::move(done)});
    schedule_attempt(src, sim_.now());
}

void LinkLayer::schedule_attempt(Address a, double t) {
    Station& st = station(a);
    t = std::max(t, sim_.now());
    if (st.attempt_event != 0) {
        if (st.attempt_time <= t) return;
        sim_.cancel(st.attempt_event);
    }
    st.attempt_time = t;
    st.attempt_event = sim_.schedule(t, "mac_attempt", [this, a] {
        station(a).attempt_event = 0;
        attempt(a);
    }, a);
}

void LinkLayer::drop_all(Address a) {
    Station& st = station(a);
    auto queue = std::move(st.queue);
    st.queue.clear();
    for (auto& p : queue) {
        if (p.done) p.done(false);
    }
}

void LinkLayer::attempt(Address a) {
    Station& st = station(a);
    if (st.in_flight || st.queue.empty()) return;
    if (!medium_.alive(a)) {
        drop_all(a);
        return;
    }
    const double now = sim_.now();
    if (medium_.transmitting(a)) {
        // Someone drove the radio directly (e.g. a beacon); wait it out.
        schedule_attempt(a, now + medium_.config().switch_latency);
        return;
    }
    const Pending& p = st.queue.front();
    const double duration = medium_.config().airtime(p.packet.bits);

    if (now < st.hold_until && p.channel != st.hold_channel) {
        schedule_attempt(a, st.hold_until + kNudge);
        return;
    }
    if (medium_.receiving(a)) {
        schedule_attempt(a, medium_.rx_busy_until(a) + st.rng.uniform(0.0, medium_.config().jitter));
        return;
    }
    if (now < medium_.ready_time(a)) {
        schedule_attempt(a, medium_.ready_time(a));
        return;
    }

    const bool is_sink = medium_.role(a) == NodeRole::sink;
    if (medium_.channel(a) != p.channel) {
        if (is_sink && schedule_.config().phased) {
            // The phase driver retunes sinks; wait for the next window.
            const double s = schedule_.earliest_start(p.channel, now + kNudge, duration);
            if (!std::isfinite(s)) throw InvalidArgument(fmt::format("packet of {} bits never fits a window", p.packet.bits));
            schedule_attempt(a, s);
            return;
        }
        const double latency = medium_.config().switch_latency;
        const double s = schedule_.earliest_start(p.channel, now + latency, duration);
        if (!std::isfinite(s)) throw InvalidArgument(fmt::format("packet of {} bits never fits a window", p.packet.bits));
        if (s - latency > now + kNudge) {
            schedule_attempt(a, s - latency);
            return;
        }
        schedule_attempt(a, medium_.switch_channel(a, p.channel));
        return;
    }

    const double s = schedule_.earliest_start(p.channel, now, duration);
    if (!std::isfinite(s)) throw InvalidArgument(fmt::format("packet of {} bits never fits a window", p.packet.bits));
    if (s > now + kNudge) {
        double when = s + st.rng.uniform(0.0, medium_.config().jitter);
        if (schedule_.earliest_start(p.channel, when, duration) != when) when = s;
        schedule_attempt(a, when);
        return;
    }

    Pending job = std::move(st.queue.front());
    st.queue.pop_front();
    st.in_flight = true;
    auto done = std::move(job.done);
    medium_.transmit(a, std::move(job.packet), job.channel, job.dest,
                     [this, a, done = std::move(done)](const TxResult& r) {
                         station(a).in_flight = false;
                         if (done) done(r.dest_delivered);
                         if (medium_.alive(a)) {
                             settle_channel(a);
                             schedule_attempt(a, sim_.now());
                         } else {
                             drop_all(a);
                         }
                     });
}

void LinkLayer::settle_channel(Address a) {
    if (medium_.role(a) == NodeRole::sink && schedule_.config().phased) return;
    Station& st = station(a);
    const double now = sim_.now();
    if (st.in_flight || medium_.transmitting(a) || now < medium_.ready_time(a)) return;
    int desired = st.home_channel;
    if (now < st.hold_until) {
        desired = st.hold_channel;
    } else if (!st.queue.empty() && st.queue.front().channel == medium_.channel(a)) {
        const auto& p = st.queue.front();
        const double s = schedule_.earliest_start(p.channel, now, medium_.config().airtime(p.packet.bits));
        if (s <= now + medium_.config().jitter) desired = p.channel;
    }
    if (medium_.channel(a) != desired) medium_.switch_channel(a, desired);
}

bool LinkLayer::hold_channel(Address a, int channel, double until) {
    Station& st = station(a);
    const double now = sim_.now();
    if (!medium_.alive(a) || st.in_flight || medium_.transmitting(a)) return false;
    if (now < medium_.ready_time(a) && medium_.channel(a) != channel) return false;
    medium_.switch_channel(a, channel);
    st.hold_channel = channel;
    st.hold_until = until;
    sim_.schedule(until, "hold_end", [this, a, until] {
        Station& s = station(a);
        if (s.hold_until != until) return;
        s.hold_until = -1.0;
        s.hold_channel = -1;
        if (!medium_.alive(a)) return;
        settle_channel(a);
        schedule_attempt(a, sim_.now());
    }, a);
    return true;
}

void LinkLayer::drive_sink_channels(std::vector<Address> sinks, double t_end) {
    sinks_ = std::move(sinks);
    if (!schedule_.config().phased) return;
    const double first = schedule_.next_sink_switch(sim_.now());
    if (first <= t_end) sim_.schedule(first, "sink_phase", [this, t_end] { sink_phase_tick(t_end); });
}

void LinkLayer::sink_phase_tick(double t_end) {
    const double now = sim_.now();
    const int desired = schedule_.sink_channel_at(now + kNudge);
    for (Address a : sinks_) {
        if (!medium_.alive(a) || medium_.channel(a) == desired) continue;
        if (medium_.transmitting(a)) continue;  // stays put for this phase
        medium_.switch_channel(a, desired);
        if (!station(a).queue.empty()) schedule_attempt(a, medium_.ready_time(a));
    }
    const double next = schedule_.next_sink_switch(now);
    if (next <= t_end) sim_.schedule(next, "sink_phase", [this, t_end] { sink_phase_tick(t_end); });
}

}  // namespace msssn::radio
