#include "msssn/metrics/summary.hpp"

#include <algorithm>
#include <cmath>

namespace msssn::metrics {

double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Summary summarize(const MetricLog& log) {
    Summary s;
    s.duration = log.t_end;
    s.generated = static_cast<std::int64_t>(log.generated.size());
    s.delivered = static_cast<std::int64_t>(log.deliveries.size());
    s.dropped = static_cast<std::int64_t>(log.drops.size());
    if (s.duration > 0) s.throughput = static_cast<double>(s.delivered) / s.duration;
    if (s.generated > 0) s.delivery_ratio = static_cast<double>(s.delivered) / static_cast<double>(s.generated);

    std::vector<double> delays;
    delays.reserve(log.deliveries.size());
    double delay_sum = 0.0;
    double hop_sum = 0.0;
    for (const auto& d : log.deliveries) {
        delays.push_back(d.t_delivered - d.t_created);
        delay_sum += delays.back();
        hop_sum += d.hops;
    }
    if (!delays.empty()) {
        s.mean_delay = delay_sum / static_cast<double>(delays.size());
        s.mean_hops = hop_sum / static_cast<double>(delays.size());
        s.p95_delay = percentile_nearest_rank(delays, 95.0);
    }

    s.sensor_energy.assign(static_cast<std::size_t>(std::max(log.n_sensors, 0)), 0.0);
    for (const auto& d : log.drains) {
        s.total_energy += d.joules;
        if (d.node >= 0 && d.node < log.n_sensors) s.sensor_energy[static_cast<std::size_t>(d.node)] += d.joules;
    }
    s.median_sensor_energy = median(s.sensor_energy);
    if (!s.sensor_energy.empty()) s.max_sensor_energy = *std::max_element(s.sensor_energy.begin(), s.sensor_energy.end());

    for (const auto& v : log.tree_versions) ++s.route_transitions[v.region];
    s.route_transitions_total = static_cast<std::int64_t>(log.tree_versions.size());

    double latency_sum = 0.0;
    for (const auto& q : log.queries) {
        ++s.queries;
        if (q.success) {
            ++s.queries_answered;
            latency_sum += q.t_answered - q.t_issued;
        }
    }
    if (s.queries > 0) s.query_success_rate = static_cast<double>(s.queries_answered) / static_cast<double>(s.queries);
    if (s.queries_answered > 0) s.mean_query_latency = latency_sum / static_cast<double>(s.queries_answered);

    for (const auto& t : log.tx_counts) ++s.tx_per_channel[t.channel];
    for (const auto& a : log.alerts) {
        ++s.alerts_sent;
        if (!std::isnan(a.t_received)) ++s.alerts_delivered;
    }
    s.deaths = static_cast<std::int64_t>(log.deaths.size());
    return s;
}

}  // namespace msssn::metrics
