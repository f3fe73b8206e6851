#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace msssn::metrics {

enum class DrainReason : std::uint8_t { tx, rx };

struct DrainRecord {
    std::int32_t node;
    double t;
    double joules;
    DrainReason reason;
};

struct GenerationRecord {
    std::int64_t report_id;
    std::int32_t source;
    std::int32_t region;
    double t;
};

struct DeliveryRecord {
    std::int64_t report_id;
    std::int32_t source;
    std::int32_t region;
    std::int32_t sink;
    double t_created;
    double t_delivered;
    std::int32_t hops;
};

enum class DropReason : std::uint8_t { detached, retries_exhausted, buffer_overflow, node_dead };

struct DropRecord {
    std::int64_t report_id;
    double t;
    DropReason reason;
    std::int32_t hop_index;
};

struct DeathRecord {
    std::int32_t node;
    double t;
};

struct TreeVersionRecord {
    std::int32_t region;
    double t;
    std::int64_t version;
};

struct TxCountRecord {
    std::int32_t channel;
    double t;
};

struct QueryRecord {
    std::int64_t query_id;
    std::int32_t origin;
    std::int32_t region;
    double t_issued;
    double t_answered;  // NaN when unanswered
    bool success;
    bool stale;
};

struct AlertRecord {
    std::int64_t hotspot;
    std::int32_t from_sink;
    std::int32_t to_region;
    double t_sent;
    double t_received;  // NaN when not delivered
};

struct CoverageRecord {
    std::int32_t region;
    std::int32_t sink;  // -1 when the region lost its last covering sink
    double t;
};

/// Append-only run record. Every summary and lifetime metric is a pure
/// function of this log plus the static layout.
class MetricLog {
public:
    // Run header
    double t_end = 0.0;
    std::int32_t n_sensors = 0;
    std::int32_t n_regions = 0;
    std::uint64_t deployment_hash = 0;
    double headless_since = -1.0;

    std::vector<DrainRecord> drains;
    std::vector<GenerationRecord> generated;
    std::vector<DeliveryRecord> deliveries;
    std::vector<DropRecord> drops;
    std::vector<DeathRecord> deaths;
    std::vector<TreeVersionRecord> tree_versions;
    std::vector<TxCountRecord> tx_counts;
    std::vector<QueryRecord> queries;
    std::vector<AlertRecord> alerts;
    std::vector<CoverageRecord> coverage_changes;

    void drain(std::int32_t node, double t, double joules, DrainReason reason) {
        drains.push_back({node, t, joules, reason});
    }
    void death(std::int32_t node, double t) { deaths.push_back({node, t}); }

    [[nodiscard]] std::string to_json() const;
    static MetricLog from_json(const std::string& text);
};

}  // namespace msssn::metrics
