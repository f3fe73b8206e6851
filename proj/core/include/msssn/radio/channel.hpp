#pragma once

#include <cstdint>

namespace msssn::radio {

enum class NodeRole : std::uint8_t { sensor, sink };

/// Fixed role channels of the three non-overlapping 802.11 channels.
struct ChannelPlan {
    int sensor_sink = 1;
    int sensor_sensor = 6;
    int sink_sink = 11;

    /// Throws InvalidArgument unless the three channels are pairwise distinct.
    void validate() const;
};

struct MacConfig {
    double switch_latency = 224e-6;  // s
    double bitrate = 2e6;            // bit/s
    double beacon_interval = 0.1;    // s
    double atim_window = 0.004;      // s, no data flows inside it
    double sink_phase = 0.03;        // s after the ATIM window reserved for sink-sink traffic
    double jitter = 0.002;           // s, upper bound of random start offsets
    bool phased = true;              // false: every channel usable at any time

    [[nodiscard]] double airtime(double bits) const { return bits / bitrate; }
    void validate() const;
};

/// Beacon-interval time slicing that stands in for MMAC's ATIM negotiation.
///
/// Each interval [k*BI, (k+1)*BI) starts with the ATIM window. The sink-sink
/// channel is usable for `sink_phase` seconds after it, and the sensor-sink
/// channel for the remainder; each of those windows opens one switch latency
/// late because sinks retune at the boundary. The sensor-sensor channel is
/// usable whenever the ATIM window is closed.
class MacSchedule {
public:
    MacSchedule(MacConfig cfg, ChannelPlan plan);

    [[nodiscard]] const MacConfig& config() const { return cfg_; }
    [[nodiscard]] const ChannelPlan& plan() const { return plan_; }

    [[nodiscard]] bool in_atim(double t) const;

    /// Earliest s >= t such that [s, s + duration] lies inside one window of
    /// `channel`. Returns +inf when the duration exceeds every window.
    [[nodiscard]] double earliest_start(int channel, double t, double duration) const;

    /// Channel a sink radio is tuned to at time t.
    [[nodiscard]] int sink_channel_at(double t) const;
    /// Next instant strictly after t at which sink_channel_at changes.
    [[nodiscard]] double next_sink_switch(double t) const;

private:
    struct Window {
        double begin;
        double end;
    };
    [[nodiscard]] Window window(int channel, std::int64_t k) const;

    MacConfig cfg_;
    ChannelPlan plan_;
};

}  // namespace msssn::radio
