#include "msssn/scenario/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace msssn::scenario {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid scenario configuration:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ParseError(fmt::format("{}: '{}' is not a number", key, v));
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used == v.size()) return i;
    } catch (const std::exception&) {
    }
    throw ParseError(fmt::format("{}: '{}' is not an integer", key, v));
}

bool to_bool(const std::string& key, const std::string& v) {
    const auto s = boost::algorithm::to_lower_copy(v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ParseError(fmt::format("{}: '{}' is not a boolean", key, v));
}

/// Splits "a b c; d e f" into entries of whitespace-separated numbers.
std::vector<std::vector<double>> to_rows(const std::string& key, const std::string& v, std::size_t width) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> entries;
    boost::algorithm::split(entries, v, boost::is_any_of(";"));
    for (auto e : entries) {
        boost::algorithm::trim(e);
        if (e.empty()) continue;
        std::vector<std::string> parts;
        boost::algorithm::split(parts, e, boost::is_any_of(" \t"), boost::token_compress_on);
        if (parts.size() != width) {
            throw ParseError(fmt::format("{}: entry '{}' needs {} fields, has {}", key, e, width, parts.size()));
        }
        std::vector<double> row;
        for (const auto& p : parts) row.push_back(to_double(key, p));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string fmt_num(double v) { return fmt::format("{}", v); }

std::string tree_name(sensor::TreeStrategy s) {
    return s == sensor::TreeStrategy::sink_rooted ? "sink_rooted" : "access_node_rooted";
}

std::string layout_name(Layout l) {
    switch (l) {
        case Layout::uniform: return "uniform";
        case Layout::grid: return "grid";
        case Layout::file: return "file";
    }
    return "uniform";
}

/// Collects soft failures (unknown names, bad enum values) as violations.
struct Sink {
    std::vector<std::string>& violations;
};

struct Field {
    std::string key;  // "section.name"
    std::string help;
    std::function<void(ScenarioConfig&, const std::string&, Sink&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <class Get>
Field number(std::string key, std::string help, Get ref) {
    return Field{key, std::move(help),
                 [key, ref](ScenarioConfig& c, const std::string& v, Sink&) { ref(c) = to_double(key, v); },
                 [ref](const ScenarioConfig& c) { return fmt_num(ref(const_cast<ScenarioConfig&>(c))); }};
}

template <class T, class Get>
Field integer(std::string key, std::string help, Get ref) {
    return Field{key, std::move(help),
                 [key, ref](ScenarioConfig& c, const std::string& v, Sink&) {
                     ref(c) = static_cast<T>(to_int(key, v));
                 },
                 [ref](const ScenarioConfig& c) { return fmt::format("{}", ref(const_cast<ScenarioConfig&>(c))); }};
}

template <class Get>
Field boolean(std::string key, std::string help, Get ref) {
    return Field{key, std::move(help),
                 [key, ref](ScenarioConfig& c, const std::string& v, Sink&) { ref(c) = to_bool(key, v); },
                 [ref](const ScenarioConfig& c) { return ref(const_cast<ScenarioConfig&>(c)) ? "true" : "false"; }};
}

#define REF(expr) [](ScenarioConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(Field{"scenario.name", "label written to outputs",
                          [](ScenarioConfig& c, const std::string& v, Sink&) { c.name = v; },
                          [](const ScenarioConfig& c) { return c.name; }});
        f.push_back(number("scenario.t_end", "simulated seconds", REF(t_end)));
        f.push_back(integer<std::uint64_t>("scenario.seed", "master seed", REF(seed)));
        f.push_back(integer<int>("scenario.reps", "replications (seed, seed+1, ...)", REF(reps)));

        f.push_back(number("field.width", "m", REF(field.x1)));
        f.push_back(number("field.height", "m", REF(field.y1)));

        f.push_back(integer<int>("sensors.count", "static sensors", REF(sensor_count)));
        f.push_back(number("sensors.energy", "initial battery, J", REF(sensor.energy)));
        f.push_back(number("sensors.tx_range", "m, shared by all sensors", REF(sensor.tx_range)));
        f.push_back(number("sensors.sense_range", "m, closed disk", REF(sensor.sense_range)));
        f.push_back(Field{"sensors.layout", "uniform | grid | file",
                          [](ScenarioConfig& c, const std::string& v, Sink& s) {
                              if (v == "uniform") c.layout = Layout::uniform;
                              else if (v == "grid") c.layout = Layout::grid;
                              else if (v == "file") c.layout = Layout::file;
                              else s.violations.push_back(fmt::format("sensors.layout: unknown layout '{}' (valid: uniform, grid, file)", v));
                          },
                          [](const ScenarioConfig& c) { return layout_name(c.layout); }});
        f.push_back(Field{"sensors.layout_file", "CSV id,x,y[,energy] when layout = file",
                          [](ScenarioConfig& c, const std::string& v, Sink&) { c.layout_file = v; },
                          [](const ScenarioConfig& c) { return c.layout_file; }});

        f.push_back(number("energy.e_elec", "J/bit", REF(energy.e_elec)));
        f.push_back(number("energy.e_amp", "J/bit/m^alpha", REF(energy.e_amp)));
        f.push_back(number("energy.alpha", "path-loss exponent of the amplifier", REF(energy.alpha)));
        f.push_back(number("energy.idle_power", "W", REF(energy.idle_power)));

        f.push_back(integer<int>("sinks.count", "mobile sinks, one region each", REF(sink_count)));
        f.push_back(number("sinks.range_ratio", "sink tx range / sensor tx range (20-30)", REF(range_ratio)));
        f.push_back(number("sinks.v_min", "m/s", REF(mobility.v_min)));
        f.push_back(number("sinks.v_max", "m/s", REF(mobility.v_max)));
        f.push_back(Field{"sinks.model", "mobility model, or a comma list with one entry per sink",
                          [](ScenarioConfig& c, const std::string& v, Sink& s) {
                              std::vector<std::string> names;
                              boost::algorithm::split(names, v, boost::is_any_of(","));
                              std::vector<mobility::Model> models;
                              for (auto n : names) {
                                  boost::algorithm::trim(n);
                                  try {
                                      models.push_back(mobility::parse_model(n));
                                  } catch (const UnknownModel& e) {
                                      s.violations.push_back(std::string("sinks.model: ") + e.what());
                                  }
                              }
                              // A bad name is already reported; don't pile a count mismatch on top.
                              if (models.size() == names.size()) c.sink_models = std::move(models);
                          },
                          [](const ScenarioConfig& c) {
                              std::vector<std::string> n;
                              for (auto m : c.sink_models) n.emplace_back(mobility::model_name(m));
                              return boost::algorithm::join(n, ",");
                          }});
        f.push_back(integer<int>("sinks.area_grid", "areas per region side (biased and data-driven models)", REF(mobility.area_grid)));
        f.push_back(number("sinks.dwell", "s spent at an area centroid", REF(mobility.dwell)));
        f.push_back(number("sinks.circle_length", "m; <= 0 picks a circle of half the region", REF(mobility.circle_length)));
        f.push_back(number("sinks.lambda", "1/s, data-driven recency rate", REF(mobility.lambda)));
        f.push_back(number("sinks.ema_alpha", "data-driven usefulness smoothing", REF(mobility.ema_alpha)));
        f.push_back(number("sinks.usefulness_prior", "initial data-driven usefulness", REF(mobility.usefulness_prior)));
        f.push_back(number("sinks.step", "s between mobility updates", REF(mobility_step)));
        f.push_back(number("sinks.region_dwell", "s per region when a sink covers several", REF(region_dwell)));

        f.push_back(Field{"tree.strategy", "sink_rooted | access_node_rooted",
                          [](ScenarioConfig& c, const std::string& v, Sink& s) {
                              if (v == "sink_rooted") c.tree.strategy = sensor::TreeStrategy::sink_rooted;
                              else if (v == "access_node_rooted") c.tree.strategy = sensor::TreeStrategy::access_node_rooted;
                              else s.violations.push_back(fmt::format("tree.strategy: unknown strategy '{}' (valid: sink_rooted, access_node_rooted)", v));
                          },
                          [](const ScenarioConfig& c) { return tree_name(c.tree.strategy); }});
        f.push_back(integer<int>("tree.retry_limit", "per-hop retries before a drop", REF(tree.retry_limit)));
        f.push_back(number("tree.maintenance_period", "s", REF(tree.maintenance_period)));
        f.push_back(integer<std::size_t>("tree.buffer_capacity", "reports held per sensor while no sink is reachable", REF(tree.buffer_capacity)));
        f.push_back(number("tree.report_bits", "bits per data report", REF(tree.report_bits)));
        f.push_back(boolean("tree.proxy_wired", "proxy wired to its sink: free, collision-exempt last hop", REF(tree.proxy_wired)));

        f.push_back(number("mac.switch_latency", "s", REF(mac.switch_latency)));
        f.push_back(number("mac.bitrate", "bit/s", REF(mac.bitrate)));
        f.push_back(number("mac.beacon_interval", "s", REF(mac.beacon_interval)));
        f.push_back(number("mac.atim_window", "s", REF(mac.atim_window)));
        f.push_back(number("mac.sink_phase", "s of each interval reserved for sink-sink traffic", REF(mac.sink_phase)));
        f.push_back(number("mac.jitter", "s, random start offset bound", REF(mac.jitter)));
        f.push_back(integer<int>("mac.sensor_sink_channel", "", REF(channels.sensor_sink)));
        f.push_back(integer<int>("mac.sensor_sensor_channel", "", REF(channels.sensor_sensor)));
        f.push_back(integer<int>("mac.sink_sink_channel", "", REF(channels.sink_sink)));

        f.push_back(Field{"sink_plane.broadcast", "flood | probabilistic:P | counter:K | location:THETA",
                          [](ScenarioConfig& c, const std::string& v, Sink& s) {
                              try {
                                  c.sink_plane.strategy = sink::BroadcastStrategy::parse(v);
                              } catch (const InvalidArgument& e) {
                                  s.violations.push_back(std::string("sink_plane.broadcast: ") + e.what());
                              }
                          },
                          [](const ScenarioConfig& c) { return c.sink_plane.strategy.describe(); }});
        f.push_back(number("sink_plane.assessment_delay", "s, max random delay before a rebroadcast", REF(sink_plane.strategy.assessment_delay)));
        f.push_back(number("sink_plane.heartbeat_period", "s", REF(sink_plane.heartbeat_period)));
        f.push_back(integer<int>("sink_plane.missed_heartbeats", "silent periods before takeover", REF(sink_plane.missed_heartbeats)));
        f.push_back(number("sink_plane.discovery_timeout", "s", REF(sink_plane.discovery_timeout)));
        f.push_back(integer<int>("sink_plane.hop_retries", "", REF(sink_plane.hop_retries)));
        f.push_back(number("sink_plane.aggregate_period", "s between shared aggregates", REF(sink_plane.aggregate_period)));
        f.push_back(number("sink_plane.snapshot_bytes", "opaque bytes attached to query answers", REF(sink_plane.snapshot_bytes)));
        f.push_back(number("sink_plane.stale_after", "s", REF(sink_plane.stale_after)));
        f.push_back(boolean("sink_plane.takeover", "reassign regions of failed sinks", REF(sink_plane.takeover)));
        f.push_back(boolean("sink_plane.ideal_links", "collision-free sink links instead of the shared channel", REF(ideal_sink_links)));

        f.push_back(number("traffic.sensing_period", "s between periodic reports per sensor; <= 0 disables", REF(sensing_period)));
        f.push_back(Field{"traffic.queries", "'t origin_sink region; ...'",
                          [](ScenarioConfig& c, const std::string& v, Sink&) {
                              c.queries.clear();
                              for (const auto& r : to_rows("traffic.queries", v, 3)) {
                                  c.queries.push_back({r[0], static_cast<NodeId>(r[1]), static_cast<RegionId>(r[2])});
                              }
                          },
                          [](const ScenarioConfig& c) {
                              std::vector<std::string> out;
                              for (const auto& q : c.queries) out.push_back(fmt::format("{} {} {}", q.t, q.origin, q.region));
                              return boost::algorithm::join(out, "; ");
                          }});
        f.push_back(integer<int>("traffic.random_queries", "extra queries at random times, origins and regions", REF(random_queries)));
        f.push_back(Field{"traffic.hotspots", "'id x y vx vy t_start t_stop; ...'",
                          [](ScenarioConfig& c, const std::string& v, Sink&) {
                              c.hotspots.clear();
                              for (const auto& r : to_rows("traffic.hotspots", v, 7)) {
                                  c.hotspots.push_back({static_cast<std::int64_t>(r[0]), {r[1], r[2]}, {r[3], r[4]}, r[5], r[6]});
                              }
                          },
                          [](const ScenarioConfig& c) {
                              std::vector<std::string> out;
                              for (const auto& h : c.hotspots) {
                                  out.push_back(fmt::format("{} {} {} {} {} {} {}", h.id, h.start.x, h.start.y, h.velocity.x,
                                                            h.velocity.y, h.t_start, h.t_stop));
                              }
                              return boost::algorithm::join(out, "; ");
                          }});
        f.push_back(number("traffic.hotspot_sample_period", "s between hotspot sightings", REF(hotspot_sample_period)));
        f.push_back(number("traffic.hotspot_horizon", "s; <= 0 uses a quarter of the region crossing time", REF(sink_plane.hotspot.horizon)));
        f.push_back(number("traffic.hotspot_cooldown", "s", REF(sink_plane.hotspot.cooldown)));
        f.push_back(integer<int>("traffic.hotspot_fit_window", "observations in the velocity fit", REF(sink_plane.hotspot.fit_window)));

        f.push_back(Field{"faults.sink_failures", "'t sink; ...'",
                          [](ScenarioConfig& c, const std::string& v, Sink&) {
                              c.failures.clear();
                              for (const auto& r : to_rows("faults.sink_failures", v, 2)) {
                                  c.failures.push_back({r[0], static_cast<NodeId>(r[1])});
                              }
                          },
                          [](const ScenarioConfig& c) {
                              std::vector<std::string> out;
                              for (const auto& x : c.failures) out.push_back(fmt::format("{} {}", x.t, x.sink));
                              return boost::algorithm::join(out, "; ");
                          }});

        f.push_back(boolean("localization.enabled", "beacon rounds and sensor self-localisation", REF(localization.enabled)));
        f.push_back(number("localization.start", "s of the first beacon slot", REF(localization.start)));
        f.push_back(integer<int>("localization.rounds", "beacon rounds (every sink once per round)", REF(localization.rounds)));
        f.push_back(number("localization.p0", "dBm at d0", REF(localization.path_loss.p0)));
        f.push_back(number("localization.d0", "m", REF(localization.path_loss.d0)));
        f.push_back(number("localization.eta", "path-loss exponent", REF(localization.path_loss.eta)));
        f.push_back(number("localization.sigma", "shadowing std-dev, dB", REF(localization.path_loss.sigma)));
        f.push_back(integer<int>("localization.quant_levels", "0 = raw RSSI", REF(localization.path_loss.quant_levels)));
        f.push_back(number("localization.quant_min", "dBm", REF(localization.path_loss.quant_min)));
        f.push_back(number("localization.quant_max", "dBm", REF(localization.path_loss.quant_max)));
        f.push_back(number("localization.freshness", "s an observation stays usable", REF(localization.freshness)));
        f.push_back(integer<int>("metrics.coverage_k", "k of the coverage lifetime", REF(coverage_k)));
        f.push_back(number("metrics.lifetime_percent", "p of the dead-fraction lifetime", REF(lifetime_percent)));
        return f;
    }();
    return table;
}

#undef REF

template <class F>
void check(std::vector<std::string>& out, const char* what, F&& f) {
    try {
        f();
    } catch (const Error& e) {
        out.push_back(fmt::format("{}: {}", what, e.what()));
    }
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

mobility::Model ScenarioConfig::model_for(NodeId sink) const {
    if (sink_models.empty()) return mobility::Model::stationary;
    if (sink_models.size() == 1) return sink_models.front();
    return sink_models.at(static_cast<std::size_t>(sink));
}

void ScenarioConfig::validate(bool allow_out_of_range) const {
    std::vector<std::string> v;
    auto need = [&](bool ok, std::string msg) {
        if (!ok) v.push_back(std::move(msg));
    };
    need(t_end >= 0, fmt::format("scenario.t_end = {} must be >= 0", t_end));
    need(reps >= 1, fmt::format("scenario.reps = {} must be >= 1", reps));
    need(field.width() > 0 && field.height() > 0, "field.width and field.height must be > 0");
    need(sensor_count >= 0, fmt::format("sensors.count = {} must be >= 0", sensor_count));
    need(sensor.energy > 0, fmt::format("sensors.energy = {} must be > 0", sensor.energy));
    need(sensor.tx_range > 0, fmt::format("sensors.tx_range = {} must be > 0", sensor.tx_range));
    need(sensor.sense_range >= 0, fmt::format("sensors.sense_range = {} must be >= 0", sensor.sense_range));
    if (layout == Layout::file) {
        need(!layout_file.empty() && std::filesystem::exists(layout_file),
             fmt::format("sensors.layout_file '{}' does not exist", layout_file));
    }
    need(sink_count >= 1, fmt::format("sinks.count = {} must be >= 1", sink_count));
    if (!allow_out_of_range) {
        need(range_ratio >= 20 && range_ratio <= 30,
             fmt::format("sinks.range_ratio = {} is outside the 20-30 band; pass --allow-out-of-paper-range to use it",
                         range_ratio));
    } else {
        need(range_ratio > 0, fmt::format("sinks.range_ratio = {} must be > 0", range_ratio));
    }
    need(sink_models.size() == 1 || static_cast<int>(sink_models.size()) == sink_count,
         fmt::format("sinks.model lists {} models for {} sinks (give one, or one per sink)", sink_models.size(),
                     sink_count));
    need(mobility.v_min >= 0 && mobility.v_max >= mobility.v_min,
         fmt::format("sinks.v_min = {} / v_max = {} must satisfy 0 <= v_min <= v_max", mobility.v_min, mobility.v_max));
    need(mobility.area_grid >= 1, "sinks.area_grid must be >= 1");
    need(mobility.dwell >= 0, "sinks.dwell must be >= 0");
    need(mobility.lambda > 0, "sinks.lambda must be > 0");
    need(mobility.ema_alpha > 0 && mobility.ema_alpha <= 1, "sinks.ema_alpha must be in (0, 1]");
    need(mobility_step > 0, "sinks.step must be > 0");
    need(region_dwell > 0, "sinks.region_dwell must be > 0");
    need(tree.retry_limit >= 0, "tree.retry_limit must be >= 0");
    need(tree.maintenance_period > 0, "tree.maintenance_period must be > 0");
    need(tree.buffer_capacity >= 1, "tree.buffer_capacity must be >= 1");
    need(tree.report_bits > 0, "tree.report_bits must be > 0");
    check(v, "energy", [&] { energy.validate(); });
    check(v, "mac", [&] { mac.validate(); });
    check(v, "mac channels", [&] { channels.validate(); });
    check(v, "sink_plane", [&] { sink_plane.validate(); });
    check(v, "localization", [&] { localization.path_loss.validate(); });
    need(localization.rounds >= 0, "localization.rounds must be >= 0");
    need(localization.start >= 0, "localization.start must be >= 0");
    need(localization.freshness > 0, "localization.freshness must be > 0");
    need(hotspot_sample_period > 0, "traffic.hotspot_sample_period must be > 0");
    need(coverage_k >= 1, "metrics.coverage_k must be >= 1");
    need(lifetime_percent > 0 && lifetime_percent <= 100, "metrics.lifetime_percent must be in (0, 100]");
    need(random_queries >= 0, "traffic.random_queries must be >= 0");
    for (const auto& q : queries) {
        need(q.t >= 0 && q.t <= t_end, fmt::format("query at t = {} lies outside [0, t_end]", q.t));
        need(q.origin >= 0 && q.origin < sink_count, fmt::format("query origin sink {} does not exist", q.origin));
        need(q.region >= 0 && q.region < sink_count, fmt::format("query region {} does not exist", q.region));
    }
    for (const auto& h : hotspots) {
        need(h.t_stop >= h.t_start, fmt::format("hotspot {} stops before it starts", h.id));
    }
    for (const auto& f : failures) {
        need(f.sink >= 0 && f.sink < sink_count, fmt::format("failure of unknown sink {}", f.sink));
        need(f.t >= 0, fmt::format("failure time {} must be >= 0", f.t));
    }
    if (!v.empty()) throw ValidationError(std::move(v));
}

ScenarioConfig parse_config_text(const std::string& text, bool allow_out_of_range) {
    boost::property_tree::ptree tree;
    try {
        std::istringstream in(text);
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(fmt::format("line {}: {}", e.line(), e.message()));
    }
    std::map<std::string, const Field*> index;
    for (const auto& f : fields()) index[f.key] = &f;

    ScenarioConfig cfg;
    std::vector<std::string> violations;
    Sink sink{violations};
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) {
            violations.push_back(fmt::format("key '{}' must live inside a [section]", section));
            continue;
        }
        for (const auto& [name, value] : body) {
            const std::string key = section + "." + name;
            auto it = index.find(key);
            if (it == index.end()) {
                violations.push_back(fmt::format("unknown key '{}'", key));
                continue;
            }
            std::string raw = value.get_value<std::string>();
            boost::algorithm::trim(raw);
            it->second->set(cfg, raw, sink);
        }
    }
    try {
        cfg.validate(allow_out_of_range);
    } catch (const ValidationError& e) {
        violations.insert(violations.end(), e.violations().begin(), e.violations().end());
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path, bool allow_out_of_range) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot read config file '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), allow_out_of_range);
}

std::string describe_defaults() {
    const ScenarioConfig defaults;
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        const auto dot = f.key.find('.');
        const std::string s = f.key.substr(0, dot);
        if (s != section) {
            out += fmt::format("{}[{}]\n", section.empty() ? "" : "\n", s);
            section = s;
        }
        out += fmt::format("{} = {}", f.key.substr(dot + 1), f.get(defaults));
        if (!f.help.empty()) out += fmt::format("    ; {}", f.help);
        out += '\n';
    }
    out += "\nmobility models: ";
    std::vector<std::string> names;
    for (auto n : mobility::model_names()) names.emplace_back(n);
    out += boost::algorithm::join(names, ", ");
    out += "\nbroadcast strategies: flood, probabilistic:P, counter:K, location:THETA\n";
    out += "tree strategies: sink_rooted, access_node_rooted\n";
    return out;
}

}  // namespace msssn::scenario
