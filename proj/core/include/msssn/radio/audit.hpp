#pragma once

#include <string>
#include <vector>

#include "msssn/radio/channel.hpp"
#include "msssn/radio/medium.hpp"

namespace msssn::radio {

struct AuditReport {
    std::size_t nodes_checked = 0;
    std::size_t intervals_checked = 0;
    std::size_t switches_checked = 0;
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Walks every node's activity log and reports:
///  - a transmission overlapping any other activity of the same node,
///  - a reception overlapping a channel switch,
///  - two receptions on different channels at once,
///  - a switch whose latency differs from `expected_switch_latency`.
AuditReport audit_half_duplex(const Medium& medium, double expected_switch_latency);

/// Transmissions that start inside an ATIM window, from the trace of
/// transmission start times. Empty when the schedule is unphased.
std::vector<std::string> audit_atim(const Medium& medium, const MacSchedule& schedule);

}  // namespace msssn::radio
