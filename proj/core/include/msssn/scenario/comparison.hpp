#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msssn/scenario/scenario.hpp"

namespace msssn::scenario {

/// Flat metric row of one replication. Lifetimes that were not reached
/// are std::nullopt.
struct MetricRow {
    std::vector<std::string> names;
    std::vector<std::optional<double>> values;
};
MetricRow metric_row(const RunResult& r);

/// Replications seed, seed+1, ... run on `threads` workers (0 = hardware
/// concurrency). Results come back in replication order regardless of
/// scheduling. `trace` (if any) receives the first replication only.
std::vector<RunResult> run_batch(const ScenarioConfig& config, std::uint64_t seed, int reps, SystemKind system,
                                 int threads = 1, const RunOptions& first_rep_options = {});

/// Two-sided exact sign test p-value for `plus` vs `minus` outcomes
/// (ties discarded).
double sign_test_p(int plus, int minus);

struct PairedMetric {
    std::string name;
    std::vector<std::optional<double>> msssn;
    std::vector<std::optional<double>> baseline;
    int msssn_lower = 0;
    int msssn_higher = 0;
    int ties = 0;
    double mean_delta = 0.0;  // over pairs where both values exist
    double p_value = 1.0;
};

struct Comparison {
    std::vector<RunResult> msssn;
    std::vector<RunResult> baseline;
    std::vector<PairedMetric> paired;
    bool deployments_match = true;  // deployment hashes agree pair by pair

    [[nodiscard]] const PairedMetric& metric(const std::string& name) const;
};

/// Pairs every MSSSN replication with a flat-baseline run on the same seed.
/// A missing lifetime counts as later than any reached one.
Comparison run_comparison(const ScenarioConfig& config, std::uint64_t seed, int reps, int threads = 1);

}  // namespace msssn::scenario
