#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msssn/metrics/lifetime.hpp"
#include "msssn/metrics/metric_log.hpp"
#include "msssn/metrics/summary.hpp"
#include "msssn/radio/audit.hpp"
#include "msssn/scenario/config.hpp"
#include "msssn/sink/sink_plane.hpp"

namespace msssn::scenario {

enum class SystemKind { msssn, baseline };
const char* system_name(SystemKind k);

struct RunOptions {
    std::ostream* trace = nullptr;  // JSONL events and transmissions
    bool audit = false;             // keep per-node radio activity and audit it
    bool record_deliveries = false; // keep every per-receiver verdict
};

struct Waypoint {
    double t;
    NodeId sink;
    Position pos;
};

struct LocalizationRow {
    NodeId sensor;
    Position truth;
    std::optional<Position> estimate;
    double error;  // NaN without a fix
    std::size_t anchors;
};

/// One receiver's verdict for one transmission.
struct DeliveryEvent {
    double start;
    radio::Address src;
    radio::Address receiver;
    int channel;
    bool delivered;
    auto operator<=>(const DeliveryEvent&) const = default;
};

struct Lifetimes {
    metrics::Lifetime first_death;
    metrics::Lifetime fraction;   // config.lifetime_percent
    metrics::Lifetime coverage;   // config.coverage_k
    metrics::Lifetime partition;
};

struct RunResult {
    SystemKind system = SystemKind::msssn;
    std::uint64_t seed = 0;
    metrics::MetricLog log;
    metrics::Summary summary;
    metrics::SensorLayout layout;
    Lifetimes lifetimes;
    std::vector<Waypoint> waypoints;
    std::vector<LocalizationRow> localization;
    std::vector<sink::ReplyTrace> replies;
    std::vector<DeliveryEvent> deliveries;  // only with record_deliveries
    radio::AuditReport audit;               // only with audit
    std::vector<std::string> atim_violations;
    std::uint64_t events = 0;
    double wall_seconds = 0.0;
};

/// Builds the world for (config, seed), wires every module and runs to
/// t_end. The baseline replaces the sink layer by one static sink at the
/// field centre over a single region; deployment and periodic traffic come
/// from the same labelled streams, so paired runs see identical inputs.
RunResult run_scenario(const ScenarioConfig& config, std::uint64_t seed, SystemKind system = SystemKind::msssn,
                       const RunOptions& options = {});

Lifetimes compute_lifetimes(const metrics::MetricLog& log, const metrics::SensorLayout& layout,
                            const ScenarioConfig& config, SystemKind system);

}  // namespace msssn::scenario
