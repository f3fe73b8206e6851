#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "msssn/scenario/comparison.hpp"

namespace msssn::scenario {

/// Numbers are printed in shortest round-trip form so identical runs give
/// identical bytes. Missing values print as NA in CSV and null in JSON.
std::string format_value(std::optional<double> v);

void write_metrics_csv(std::ostream& out, const std::vector<RunResult>& results);
void write_waypoints_csv(std::ostream& out, const RunResult& result);
void write_localization_csv(std::ostream& out, const RunResult& result);
void write_paired_csv(std::ostream& out, const Comparison& comparison);

/// mean/std/min/max per metric over the replications that reached a value.
std::string summary_json(const std::string& name, const std::vector<RunResult>& results);
std::string comparison_json(const std::string& name, const Comparison& comparison);

/// Writes metrics.csv, summary.json, waypoints.csv and localization.csv
/// (the last two from the first replication) into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const std::string& name,
                       const std::vector<RunResult>& results);
/// Both systems' metrics plus paired.csv and a combined summary.json.
void write_comparison_outputs(const std::filesystem::path& dir, const std::string& name,
                              const Comparison& comparison);

}  // namespace msssn::scenario
