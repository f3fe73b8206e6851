#include "msssn/sim/simulator.hpp"

#include <fmt/format.h>

#include <ostream>

#include "msssn/error.hpp"

namespace msssn::sim {

EventId Simulator::schedule(Time time, std::string_view tag, Action action, TraceNodes nodes) {
    if (!(time >= clock_)) {
        throw SchedulingInPast(fmt::format("event '{}' at t={} precedes clock {}", tag, time, clock_));
    }
    const EventId id = next_seq_++;
    queue_.push(Entry{time, id, tag, nodes, std::move(action)});
    settled_.push_back(0);
    ++live_;
    return id;
}

EventId Simulator::schedule_in(Time delay, std::string_view tag, Action action, TraceNodes nodes) {
    return schedule(clock_ + delay, tag, std::move(action), nodes);
}

void Simulator::cancel(EventId id) {
    if (id < next_seq_ && settled_[id] == 0) {
        settled_[id] = 1;
        --live_;
    }
}

RunSummary Simulator::run_until(Time t_end) {
    if (t_end < clock_) {
        throw SchedulingInPast(fmt::format("run_until({}) precedes clock {}", t_end, clock_));
    }
    stop_requested_ = false;
    RunSummary summary;
    while (!queue_.empty() && !stop_requested_) {
        if (queue_.top().time > t_end) break;
        // priority_queue::top is const; the entry is moved out before pop.
        Entry e = std::move(const_cast<Entry&>(queue_.top()));
        queue_.pop();
        if (settled_[e.seq] != 0) continue;
        settled_[e.seq] = 1;
        --live_;
        clock_ = e.time;
        if (trace_ != nullptr) write_trace(e);
        ++processed_;
        ++summary.events_processed;
        e.action();
    }
    if (!stop_requested_) clock_ = t_end;
    summary.final_clock = clock_;
    return summary;
}

void Simulator::write_trace(const Entry& e) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), R"({{"t":{},"seq":{},"tag":"{}","nodes":[)", e.time, e.seq, e.tag);
    bool first = true;
    for (auto id : e.nodes.ids) {
        if (id < 0) continue;
        fmt::format_to(std::back_inserter(buf), "{}{}", first ? "" : ",", id);
        first = false;
    }
    fmt::format_to(std::back_inserter(buf), "]}}\n");
    trace_->write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace msssn::sim
