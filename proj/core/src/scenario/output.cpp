#include "msssn/scenario/output.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "msssn/error.hpp"

namespace msssn::scenario {

namespace {

using nlohmann::ordered_json;

nlohmann::ordered_json json_value(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

ordered_json stats_json(const std::vector<std::optional<double>>& values) {
    std::vector<double> xs;
    for (auto v : values) {
        if (v && std::isfinite(*v)) xs.push_back(*v);
    }
    ordered_json j;
    j["n"] = xs.size();
    j["not_reached"] = values.size() - xs.size();
    if (xs.empty()) {
        j["mean"] = j["std"] = j["min"] = j["max"] = nullptr;
        return j;
    }
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    j["mean"] = mean;
    j["std"] = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    j["min"] = *std::min_element(xs.begin(), xs.end());
    j["max"] = *std::max_element(xs.begin(), xs.end());
    return j;
}

ordered_json system_json(const std::vector<RunResult>& results) {
    ordered_json j;
    j["replications"] = results.size();
    ordered_json seeds = ordered_json::array();
    ordered_json hashes = ordered_json::array();
    for (const auto& r : results) {
        seeds.push_back(r.seed);
        hashes.push_back(r.log.deployment_hash);
    }
    j["seeds"] = seeds;
    j["deployment_hashes"] = hashes;
    ordered_json metrics = ordered_json::object();
    if (!results.empty()) {
        std::vector<MetricRow> rows;
        for (const auto& r : results) rows.push_back(metric_row(r));
        for (std::size_t m = 0; m < rows.front().names.size(); ++m) {
            std::vector<std::optional<double>> col;
            for (const auto& row : rows) col.push_back(row.values[m]);
            metrics[rows.front().names[m]] = stats_json(col);
        }
    }
    j["metrics"] = metrics;
    return j;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + p.string());
    return f;
}

}  // namespace

std::string format_value(std::optional<double> v) {
    if (!v || std::isnan(*v)) return "NA";
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    return fmt::format("{}", *v);
}

void write_metrics_csv(std::ostream& out, const std::vector<RunResult>& results) {
    if (results.empty()) return;
    const auto header = metric_row(results.front()).names;
    out << "system,seed,deployment_hash";
    for (const auto& n : header) out << ',' << n;
    out << '\n';
    for (const auto& r : results) {
        const auto row = metric_row(r);
        fmt::print(out, "{},{},{}", system_name(r.system), r.seed, r.log.deployment_hash);
        for (auto v : row.values) out << ',' << format_value(v);
        out << '\n';
    }
}

void write_waypoints_csv(std::ostream& out, const RunResult& result) {
    out << "time,sink_id,x,y\n";
    for (const auto& w : result.waypoints) fmt::print(out, "{},{},{},{}\n", w.t, w.sink, w.pos.x, w.pos.y);
}

void write_localization_csv(std::ostream& out, const RunResult& result) {
    out << "sensor_id,true_x,true_y,est_x,est_y,error_m,n_anchors\n";
    for (const auto& l : result.localization) {
        std::optional<double> ex, ey;
        if (l.estimate) {
            ex = l.estimate->x;
            ey = l.estimate->y;
        }
        fmt::print(out, "{},{},{},{},{},{},{}\n", l.sensor, l.truth.x, l.truth.y, format_value(ex), format_value(ey),
                   format_value(l.error), l.anchors);
    }
}

void write_paired_csv(std::ostream& out, const Comparison& c) {
    out << "metric,replication,seed,msssn,baseline,delta\n";
    for (const auto& m : c.paired) {
        for (std::size_t i = 0; i < m.msssn.size(); ++i) {
            std::optional<double> delta;
            if (m.msssn[i] && m.baseline[i]) delta = *m.msssn[i] - *m.baseline[i];
            fmt::print(out, "{},{},{},{},{},{}\n", m.name, i, c.msssn[i].seed, format_value(m.msssn[i]),
                       format_value(m.baseline[i]), format_value(delta));
        }
    }
}

std::string summary_json(const std::string& name, const std::vector<RunResult>& results) {
    ordered_json j;
    j["scenario"] = name;
    j["system"] = results.empty() ? "msssn" : system_name(results.front().system);
    j.update(system_json(results));
    return j.dump(2) + "\n";
}

std::string comparison_json(const std::string& name, const Comparison& c) {
    ordered_json j;
    j["scenario"] = name;
    j["deployments_match"] = c.deployments_match;
    j["msssn"] = system_json(c.msssn);
    j["baseline"] = system_json(c.baseline);
    ordered_json paired = ordered_json::object();
    for (const auto& m : c.paired) {
        ordered_json p;
        p["mean_delta"] = json_value(m.mean_delta);
        p["msssn_lower"] = m.msssn_lower;
        p["msssn_higher"] = m.msssn_higher;
        p["ties"] = m.ties;
        p["sign_test_p"] = m.p_value;
        paired[m.name] = p;
    }
    j["paired"] = paired;
    return j.dump(2) + "\n";
}

void write_run_outputs(const std::filesystem::path& dir, const std::string& name,
                       const std::vector<RunResult>& results) {
    std::filesystem::create_directories(dir);
    {
        auto f = open_out(dir / "metrics.csv");
        write_metrics_csv(f, results);
    }
    {
        auto f = open_out(dir / "summary.json");
        f << summary_json(name, results);
    }
    if (!results.empty()) {
        auto w = open_out(dir / "waypoints.csv");
        write_waypoints_csv(w, results.front());
        auto l = open_out(dir / "localization.csv");
        write_localization_csv(l, results.front());
    }
}

void write_comparison_outputs(const std::filesystem::path& dir, const std::string& name, const Comparison& c) {
    std::filesystem::create_directories(dir);
    std::vector<RunResult> all = c.msssn;
    all.insert(all.end(), c.baseline.begin(), c.baseline.end());
    {
        auto f = open_out(dir / "metrics.csv");
        write_metrics_csv(f, all);
    }
    {
        auto f = open_out(dir / "paired.csv");
        write_paired_csv(f, c);
    }
    {
        auto f = open_out(dir / "summary.json");
        f << comparison_json(name, c);
    }
    if (!c.msssn.empty()) {
        auto w = open_out(dir / "waypoints.csv");
        write_waypoints_csv(w, c.msssn.front());
        auto l = open_out(dir / "localization.csv");
        write_localization_csv(l, c.msssn.front());
    }
}

}  // namespace msssn::scenario
