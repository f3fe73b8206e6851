#include "msssn/radio/channel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "msssn/error.hpp"

namespace msssn::radio {

namespace {
constexpr double kEps = 1e-12;
}

void ChannelPlan::validate() const {
    if (sensor_sink == sensor_sensor || sensor_sink == sink_sink || sensor_sensor == sink_sink) {
        throw InvalidArgument(fmt::format("role channels must be distinct (got {}, {}, {})", sensor_sink,
                                          sensor_sensor, sink_sink));
    }
}

void MacConfig::validate() const {
    if (!(switch_latency >= 0)) throw InvalidArgument("switch_latency must be >= 0");
    if (!(bitrate > 0)) throw InvalidArgument("bitrate must be > 0");
    if (!(jitter >= 0)) throw InvalidArgument("jitter must be >= 0");
    if (!phased) return;
    if (!(atim_window > 0 && atim_window < beacon_interval)) {
        throw InvalidArgument(fmt::format("need 0 < atim_window ({}) < beacon_interval ({})", atim_window,
                                          beacon_interval));
    }
    if (!(sink_phase > switch_latency)) {
        throw InvalidArgument(fmt::format("sink_phase ({}) must exceed switch_latency ({})", sink_phase,
                                          switch_latency));
    }
    if (!(atim_window + sink_phase + switch_latency < beacon_interval)) {
        throw InvalidArgument("atim_window + sink_phase leaves no sensor-sink window");
    }
}

MacSchedule::MacSchedule(MacConfig cfg, ChannelPlan plan) : cfg_(cfg), plan_(plan) {
    cfg_.validate();
    plan_.validate();
}

bool MacSchedule::in_atim(double t) const {
    if (!cfg_.phased) return false;
    const auto k = static_cast<std::int64_t>(std::floor(t / cfg_.beacon_interval));
    for (auto kk : {k, k + 1}) {
        const double base = static_cast<double>(kk) * cfg_.beacon_interval;
        if (t >= base && t < base + cfg_.atim_window) return true;
    }
    return false;
}

MacSchedule::Window MacSchedule::window(int channel, std::int64_t k) const {
    const double base = static_cast<double>(k) * cfg_.beacon_interval;
    const double data = base + cfg_.atim_window;
    const double next = static_cast<double>(k + 1) * cfg_.beacon_interval;
    if (channel == plan_.sink_sink) return {data + cfg_.switch_latency, data + cfg_.sink_phase};
    if (channel == plan_.sensor_sink) return {data + cfg_.sink_phase + cfg_.switch_latency, next};
    return {data, next};
}

double MacSchedule::earliest_start(int channel, double t, double duration) const {
    if (!cfg_.phased) return t;
    const auto k0 = static_cast<std::int64_t>(std::floor(t / cfg_.beacon_interval)) - 1;
    const Window probe = window(channel, 0);
    if (duration > probe.end - probe.begin + kEps) return std::numeric_limits<double>::infinity();
    for (auto k = k0; k < k0 + 4; ++k) {
        const Window w = window(channel, k);
        const double s = std::max(t, w.begin);
        if (s + duration <= w.end + kEps) return s;
    }
    return std::numeric_limits<double>::infinity();
}

int MacSchedule::sink_channel_at(double t) const {
    if (!cfg_.phased) return plan_.sensor_sink;
    const auto k = static_cast<std::int64_t>(std::floor(t / cfg_.beacon_interval));
    const double base = static_cast<double>(k) * cfg_.beacon_interval;
    const double off = t - base;
    if (off >= cfg_.atim_window && off < cfg_.atim_window + cfg_.sink_phase) return plan_.sink_sink;
    return plan_.sensor_sink;
}

double MacSchedule::next_sink_switch(double t) const {
    if (!cfg_.phased) return std::numeric_limits<double>::infinity();
    const auto k0 = static_cast<std::int64_t>(std::floor(t / cfg_.beacon_interval)) - 1;
    for (auto k = k0; k < k0 + 4; ++k) {
        const double base = static_cast<double>(k) * cfg_.beacon_interval;
        for (double b : {base + cfg_.atim_window, base + cfg_.atim_window + cfg_.sink_phase}) {
            if (b > t + kEps) return b;
        }
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace msssn::radio
