#include "msssn/scenario/comparison.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "msssn/error.hpp"

namespace msssn::scenario {

MetricRow metric_row(const RunResult& r) {
    const auto& s = r.summary;
    MetricRow row;
    auto add = [&](const char* name, std::optional<double> v) {
        row.names.emplace_back(name);
        row.values.push_back(v);
    };
    auto channel = [&](int ch) {
        auto it = s.tx_per_channel.find(ch);
        return static_cast<double>(it == s.tx_per_channel.end() ? 0 : it->second);
    };
    add("generated", static_cast<double>(s.generated));
    add("delivered", static_cast<double>(s.delivered));
    add("dropped", static_cast<double>(s.dropped));
    add("throughput", s.throughput);
    add("delivery_ratio", s.delivery_ratio);
    add("mean_delay", s.mean_delay);
    add("p95_delay", s.p95_delay);
    add("mean_hops", s.mean_hops);
    add("total_energy", s.total_energy);
    add("median_sensor_energy", s.median_sensor_energy);
    add("max_sensor_energy", s.max_sensor_energy);
    add("route_transitions", static_cast<double>(s.route_transitions_total));
    add("queries", static_cast<double>(s.queries));
    add("query_success_rate", s.query_success_rate);
    add("mean_query_latency", s.mean_query_latency);
    add("alerts_sent", static_cast<double>(s.alerts_sent));
    add("alerts_delivered", static_cast<double>(s.alerts_delivered));
    add("tx_sensor_sink", channel(1));
    add("tx_sensor_sensor", channel(6));
    add("tx_sink_sink", channel(11));
    add("deaths", static_cast<double>(s.deaths));
    add("lifetime_first_death", r.lifetimes.first_death);
    add("lifetime_fraction", r.lifetimes.fraction);
    add("lifetime_coverage", r.lifetimes.coverage);
    add("lifetime_partition", r.lifetimes.partition);
    return row;
}

std::vector<RunResult> run_batch(const ScenarioConfig& config, std::uint64_t seed, int reps, SystemKind system,
                                 int threads, const RunOptions& first_rep_options) {
    if (reps < 1) throw InvalidArgument("reps must be >= 1");
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, reps);
    std::vector<RunResult> results(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < reps; i = next++) {
            try {
                const RunOptions opts = i == 0 ? first_rep_options : RunOptions{};
                results[static_cast<std::size_t>(i)] = run_scenario(config, seed + static_cast<std::uint64_t>(i), system, opts);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

double sign_test_p(int plus, int minus) {
    const int n = plus + minus;
    if (n == 0) return 1.0;
    const int k = std::min(plus, minus);
    // P(X <= k) for X ~ Bin(n, 1/2), doubled and capped at 1.
    double tail = 0.0;
    for (int i = 0; i <= k; ++i) {
        tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
    }
    return std::min(1.0, 2.0 * tail);
}

const PairedMetric& Comparison::metric(const std::string& name) const {
    for (const auto& m : paired) {
        if (m.name == name) return m;
    }
    throw InvalidArgument("no paired metric named " + name);
}

Comparison run_comparison(const ScenarioConfig& config, std::uint64_t seed, int reps, int threads) {
    Comparison c;
    c.msssn = run_batch(config, seed, reps, SystemKind::msssn, threads);
    c.baseline = run_batch(config, seed, reps, SystemKind::baseline, threads);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<MetricRow> a, b;
    for (int i = 0; i < reps; ++i) {
        a.push_back(metric_row(c.msssn[static_cast<std::size_t>(i)]));
        b.push_back(metric_row(c.baseline[static_cast<std::size_t>(i)]));
        c.deployments_match = c.deployments_match && c.msssn[static_cast<std::size_t>(i)].log.deployment_hash ==
                                                         c.baseline[static_cast<std::size_t>(i)].log.deployment_hash;
    }
    const auto& names = a.front().names;
    for (std::size_t m = 0; m < names.size(); ++m) {
        PairedMetric pm;
        pm.name = names[m];
        double delta_sum = 0.0;
        int delta_n = 0;
        for (int i = 0; i < reps; ++i) {
            const auto x = a[static_cast<std::size_t>(i)].values[m];
            const auto y = b[static_cast<std::size_t>(i)].values[m];
            pm.msssn.push_back(x);
            pm.baseline.push_back(y);
            const double xv = x.value_or(kInf);
            const double yv = y.value_or(kInf);
            if (xv < yv) ++pm.msssn_lower;
            else if (xv > yv) ++pm.msssn_higher;
            else ++pm.ties;
            if (x && y) {
                delta_sum += *x - *y;
                ++delta_n;
            }
        }
        pm.mean_delta = delta_n ? delta_sum / delta_n : 0.0;
        pm.p_value = sign_test_p(pm.msssn_lower, pm.msssn_higher);
        c.paired.push_back(std::move(pm));
    }
    return c;
}

}  // namespace msssn::scenario
