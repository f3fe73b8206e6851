// Command line front end: run, batch, compare, validate, describe-models.

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "msssn/error.hpp"
#include "msssn/scenario/comparison.hpp"
#include "msssn/scenario/config.hpp"
#include "msssn/scenario/output.hpp"

namespace {

namespace sc = msssn::scenario;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::string out = "out";
    bool trace = false;
    bool allow = false;
    int threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_reps) {
    cmd->add_option("--config", c.config, "scenario file (sectioned key = value)")->required();
    cmd->add_option("--seed", c.seed, "master seed (overrides the file)");
    if (with_reps) {
        cmd->add_option("--reps", c.reps, "replications, seeds seed..seed+reps-1");
        cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    }
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_flag("--trace", c.trace, "write trace.jsonl for the first replication");
    cmd->add_flag("--allow-out-of-paper-range", c.allow, "accept range ratios outside 20-30");
}

sc::ScenarioConfig load(const Common& c) {
    auto cfg = sc::parse_config_file(c.config, c.allow);
    if (c.seed) cfg.seed = *c.seed;
    if (c.reps) cfg.reps = *c.reps;
    cfg.validate(c.allow);
    return cfg;
}

void print_brief(const sc::RunResult& r) {
    const auto& s = r.summary;
    fmt::print("{} seed {}: delivered {}/{} ({:.3f}), median sensor energy {:.6g} J, deaths {}, {:.2f} s wall\n",
               sc::system_name(r.system), r.seed, s.delivered, s.generated, s.delivery_ratio,
               s.median_sensor_energy, s.deaths, r.wall_seconds);
}

int run_system(const Common& c, int reps_default) {
    const auto cfg = load(c);
    const int reps = c.reps ? *c.reps : reps_default > 0 ? reps_default : cfg.reps;
    std::filesystem::create_directories(c.out);
    std::ofstream trace;
    sc::RunOptions opts;
    if (c.trace) {
        trace.open(std::filesystem::path(c.out) / "trace.jsonl", std::ios::binary);
        opts.trace = &trace;
    }
    const auto results = sc::run_batch(cfg, cfg.seed, reps, sc::SystemKind::msssn, c.threads, opts);
    sc::write_run_outputs(c.out, cfg.name, results);
    for (const auto& r : results) print_brief(r);
    return 0;
}

int compare(const Common& c) {
    const auto cfg = load(c);
    const int reps = c.reps ? *c.reps : cfg.reps;
    const auto cmp = sc::run_comparison(cfg, cfg.seed, reps, c.threads);
    sc::write_comparison_outputs(c.out, cfg.name, cmp);
    if (c.trace) {
        std::ofstream trace(std::filesystem::path(c.out) / "trace.jsonl", std::ios::binary);
        sc::RunOptions opts;
        opts.trace = &trace;
        sc::run_scenario(cfg, cfg.seed, sc::SystemKind::msssn, opts);
    }
    fmt::print("{:<24} {:>14} {:>14} {:>6} {:>6} {:>6} {:>8}\n", "metric", "msssn mean", "baseline mean", "lower",
               "higher", "ties", "p");
    for (const auto& m : cmp.paired) {
        auto mean = [](const std::vector<std::optional<double>>& v) {
            double s = 0;
            int n = 0;
            for (auto x : v) {
                if (x) {
                    s += *x;
                    ++n;
                }
            }
            return n ? std::optional<double>(s / n) : std::nullopt;
        };
        fmt::print("{:<24} {:>14} {:>14} {:>6} {:>6} {:>6} {:>8.3g}\n", m.name, sc::format_value(mean(m.msssn)),
                   sc::format_value(mean(m.baseline)), m.msssn_lower, m.msssn_higher, m.ties, m.p_value);
    }
    if (!cmp.deployments_match) {
        std::cerr << "warning: paired deployments differ\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-sink mobile sensor network simulator"};
    app.require_subcommand(1);

    Common run_opts, batch_opts, cmp_opts, val_opts;
    auto* run = app.add_subcommand("run", "run one scenario (or --reps replications)");
    add_common(run, run_opts, true);
    auto* batch = app.add_subcommand("batch", "run the configured number of replications");
    add_common(batch, batch_opts, true);
    auto* cmp = app.add_subcommand("compare", "paired runs against the flat central-sink baseline");
    add_common(cmp, cmp_opts, true);
    auto* val = app.add_subcommand("validate", "check a scenario file and report every violation");
    val->add_option("--config", val_opts.config, "scenario file")->required();
    val->add_flag("--allow-out-of-paper-range", val_opts.allow, "accept range ratios outside 20-30");
    app.add_subcommand("describe-models", "list every config key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return run_system(run_opts, 1);
        if (*batch) return run_system(batch_opts, 0);
        if (*cmp) return compare(cmp_opts);
        if (*val) {
            const auto cfg = load(val_opts);
            fmt::print("{}: ok ({} sensors, {} sinks, {} s)\n", val_opts.config, cfg.sensor_count, cfg.sink_count,
                       cfg.t_end);
            return 0;
        }
        std::cout << sc::describe_defaults();
        return 0;
    } catch (const sc::ValidationError& e) {
        std::cerr << "invalid configuration:\n";
        for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
        return kExitConfig;
    } catch (const msssn::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "run aborted: " << e.what() << '\n';
        return kExitRuntime;
    }
}
