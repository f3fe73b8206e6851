#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "msssn/metrics/metric_log.hpp"

namespace msssn::metrics {

/// Per-run figures derived from a MetricLog alone.
struct Summary {
    double duration = 0.0;
    std::int64_t generated = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
    double throughput = 0.0;      // deliveries per second
    double delivery_ratio = 0.0;  // delivered / generated, 0 without traffic
    double mean_delay = 0.0;
    double p95_delay = 0.0;  // nearest rank
    double mean_hops = 0.0;

    std::vector<double> sensor_energy;  // joules spent per sensor, by id
    double total_energy = 0.0;
    double median_sensor_energy = 0.0;
    double max_sensor_energy = 0.0;

    std::map<std::int32_t, std::int64_t> route_transitions;  // per region
    std::int64_t route_transitions_total = 0;

    std::int64_t queries = 0;
    std::int64_t queries_answered = 0;
    double query_success_rate = 0.0;
    double mean_query_latency = 0.0;

    std::map<std::int32_t, std::int64_t> tx_per_channel;

    std::int64_t alerts_sent = 0;
    std::int64_t alerts_delivered = 0;
    std::int64_t deaths = 0;
};

Summary summarize(const MetricLog& log);

/// Nearest-rank percentile (p in (0, 100]) of an unsorted sample; 0 when empty.
double percentile_nearest_rank(std::vector<double> values, double p);
/// Median (mean of the two middle values for even sizes); 0 when empty.
double median(std::vector<double> values);

}  // namespace msssn::metrics
