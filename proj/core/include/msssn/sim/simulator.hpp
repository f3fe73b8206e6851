#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <string_view>
#include <vector>

namespace msssn::sim {

using Time = double;
using EventId = std::uint64_t;

/// Node ids attached to an event for the trace; unused slots are -1.
struct TraceNodes {
    std::array<std::int32_t, 2> ids{-1, -1};

    TraceNodes() = default;
    TraceNodes(std::int32_t a) : ids{a, -1} {}
    TraceNodes(std::int32_t a, std::int32_t b) : ids{a, b} {}
};

struct RunSummary {
    std::uint64_t events_processed = 0;
    Time final_clock = 0.0;
};

/// Single-threaded discrete-event engine. Events pop in ascending
/// (time, seq) order; seq is assigned at scheduling and never reused.
class Simulator {
public:
    using Action = std::function<void()>;

    Simulator() = default;
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Throws SchedulingInPast when `time` is before the current clock.
    /// `tag` must point to storage that outlives the simulator (a literal).
    EventId schedule(Time time, std::string_view tag, Action action, TraceNodes nodes = {});
    EventId schedule_in(Time delay, std::string_view tag, Action action, TraceNodes nodes = {});

    /// Lazily cancels a pending event. Cancelling an already-run id is a no-op.
    void cancel(EventId id);

    /// Processes every event with time <= t_end, then leaves the clock at t_end.
    RunSummary run_until(Time t_end);

    /// Stops run_until after the current event completes.
    void stop() { stop_requested_ = true; }

    [[nodiscard]] Time now() const { return clock_; }
    [[nodiscard]] std::size_t pending() const { return live_; }
    [[nodiscard]] std::uint64_t processed() const { return processed_; }

    /// JSONL event trace: {"t":..,"seq":..,"tag":"..","nodes":[..]} per processed event.
    void set_trace(std::ostream* out) { trace_ = out; }

private:
    struct Entry {
        Time time;
        EventId seq;
        std::string_view tag;
        TraceNodes nodes;
        Action action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void write_trace(const Entry& e);

    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    // 0 = queued, 1 = ran or cancelled; indexed by seq.
    std::vector<std::uint8_t> settled_;
    std::size_t live_ = 0;
    Time clock_ = 0.0;
    EventId next_seq_ = 0;
    std::uint64_t processed_ = 0;
    bool stop_requested_ = false;
    std::ostream* trace_ = nullptr;
};

}  // namespace msssn::sim
