#include "msssn/scenario/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "msssn/localization/localization.hpp"
#include "msssn/mobility/mobility.hpp"
#include "msssn/radio/link_layer.hpp"
#include "msssn/radio/medium.hpp"
#include "msssn/sensor/sensor_plane.hpp"
#include "msssn/sim/rng.hpp"
#include "msssn/sim/simulator.hpp"
#include "msssn/sink/sink_plane.hpp"
#include "msssn/sink/transport.hpp"

namespace msssn::scenario {

const char* system_name(SystemKind k) { return k == SystemKind::msssn ? "msssn" : "baseline"; }

Lifetimes compute_lifetimes(const metrics::MetricLog& log, const metrics::SensorLayout& layout,
                            const ScenarioConfig& config, SystemKind system) {
    Lifetimes l;
    // Any p below one sensor's share picks the first death.
    const double first = log.n_sensors > 0 ? 50.0 / log.n_sensors : 100.0;
    l.first_death = metrics::lifetime_fraction(log, std::min(first, 100.0));
    l.fraction = metrics::lifetime_fraction(log, config.lifetime_percent);
    l.coverage = metrics::lifetime_coverage(log, layout, config.coverage_k);
    l.partition = metrics::lifetime_partition(
        log, layout, system == SystemKind::msssn ? metrics::PartitionScope::region : metrics::PartitionScope::global);
    return l;
}

namespace {

constexpr double kBeaconOffset = 1e-4;  // s into the sensor-sink window

std::vector<SensorNode> deploy(const ScenarioConfig& cfg, std::uint64_t seed) {
    switch (cfg.layout) {
        case Layout::uniform: {
            sim::RngStream rng(seed, "deploy/sensors");
            return deploy_sensors(cfg.sensor_count, cfg.field, rng, cfg.sensor);
        }
        case Layout::grid:
            return deploy_sensors_grid(cfg.sensor_count, cfg.field, cfg.sensor);
        case Layout::file: {
            std::vector<SensorNode> out;
            for (const auto& row : load_layout_csv(cfg.layout_file, cfg.field)) {
                SensorNode s;
                s.id = static_cast<NodeId>(out.size());
                s.pos = row.pos;
                s.initial_energy = s.energy = row.energy.value_or(cfg.sensor.energy);
                s.tx_range = cfg.sensor.tx_range;
                s.sense_range = cfg.sensor.sense_range;
                out.push_back(s);
            }
            return out;
        }
    }
    return {};
}

struct SinkMotion {
    mobility::MobilityState state;
    sim::RngStream rng;
    RegionId serving = 0;
    double serve_until = 0.0;
};

class Runner {
public:
    Runner(const ScenarioConfig& cfg, std::uint64_t seed, SystemKind system, const RunOptions& opts)
        : cfg_(cfg),
          seed_(seed),
          system_(system),
          opts_(opts),
          world_(cfg.field, cfg.energy),
          medium_(sim_, cfg.mac),
          link_(sim_, medium_, radio::MacSchedule(cfg.mac, cfg.channels), seed) {}

    RunResult run() {
        const auto wall0 = std::chrono::steady_clock::now();
        build_world();
        build_radio();
        sensors_ = std::make_unique<sensor::SensorPlane>(sim_, world_, medium_, link_, cfg_.channels, log_, cfg_.tree);
        sensors_->set_delivery_hook([this](const DataReport& r, NodeId sink) { on_delivery(r, sink); });
        if (msssn()) build_sink_plane();

        schedule_maintenance();
        schedule_mobility();
        schedule_sensing();
        schedule_hotspots();
        if (msssn()) {
            schedule_queries();
            schedule_failures();
            schedule_localization();
            sink_plane_->start(cfg_.t_end);
        }
        const auto summary = sim_.run_until(cfg_.t_end);

        RunResult res;
        res.system = system_;
        res.seed = seed_;
        log_.t_end = cfg_.t_end;
        res.summary = metrics::summarize(log_);
        res.layout = metrics::SensorLayout::from_world(world_);
        res.lifetimes = compute_lifetimes(log_, res.layout, cfg_, system_);
        res.waypoints = std::move(waypoints_);
        res.deliveries = std::move(deliveries_);
        res.events = summary.events_processed;
        if (sink_plane_) res.replies = sink_plane_->replies();
        for (const auto& s : world_.sensors()) {
            const auto& loc = localizers_.empty() ? localization::Localizer() : localizers_[static_cast<std::size_t>(s.id)];
            LocalizationRow row{s.id, s.pos, std::nullopt, std::numeric_limits<double>::quiet_NaN(), loc.heard()};
            if (loc.fix()) {
                row.estimate = loc.fix()->pos;
                row.error = distance(loc.fix()->pos, s.pos);
            }
            res.localization.push_back(row);
        }
        if (opts_.audit) {
            res.audit = radio::audit_half_duplex(medium_, cfg_.mac.switch_latency);
            res.atim_violations = radio::audit_atim(medium_, link_.schedule());
        }
        res.log = std::move(log_);
        res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        return res;
    }

private:
    [[nodiscard]] bool msssn() const { return system_ == SystemKind::msssn; }
    [[nodiscard]] int n_sinks() const { return msssn() ? cfg_.sink_count : 1; }

    void build_world() {
        world_.set_sensors(deploy(cfg_, seed_));
        std::vector<SinkNode> sinks;
        for (int i = 0; i < n_sinks(); ++i) {
            SinkNode s;
            s.id = i;
            s.tx_range = cfg_.range_ratio * cfg_.sensor.tx_range;
            s.speed_min = msssn() ? cfg_.mobility.v_min : 0.0;
            s.speed_max = msssn() ? cfg_.mobility.v_max : 0.0;
            sinks.push_back(s);
        }
        world_.set_sinks(std::move(sinks));
        world_.partition_and_assign();
        for (auto& s : world_.sinks()) s.pos = world_.regions()[static_cast<std::size_t>(s.home_region_id)].bounds.centroid();

        log_.n_sensors = static_cast<std::int32_t>(world_.sensors().size());
        log_.n_regions = static_cast<std::int32_t>(world_.regions().size());
        log_.deployment_hash = deployment_hash(world_.sensors());

        const auto params = cfg_.mobility;
        for (const auto& s : world_.sinks()) {
            const auto model = msssn() ? cfg_.model_for(s.id) : mobility::Model::stationary;
            const auto& bounds = world_.regions()[static_cast<std::size_t>(s.home_region_id)].bounds;
            SinkMotion m{mobility::init_state(model, s.pos, bounds, params),
                         sim::RngStream(seed_, fmt::format("mobility/sink{}", s.id)), s.home_region_id,
                         cfg_.region_dwell};
            motion_.push_back(std::move(m));
        }
        for (auto& s : world_.sinks()) {
            s.pos = motion_[static_cast<std::size_t>(s.id)].state.pos;
            waypoints_.push_back({0.0, s.id, s.pos});
        }
    }

    void build_radio() {
        medium_.enable_activity_log(opts_.audit);
        sim_.set_trace(opts_.trace);
        medium_.set_trace(opts_.trace);
        book_.n_sensors = static_cast<std::int32_t>(world_.sensors().size());
        for (const auto& s : world_.sensors()) {
            const auto a = medium_.add_node(radio::NodeRole::sensor, s.pos, s.tx_range, cfg_.channels.sensor_sensor);
            link_.register_node(a, cfg_.channels.sensor_sensor);
        }
        const int sink_home = link_.schedule().sink_channel_at(0.0);
        std::vector<radio::Address> sink_addrs;
        for (const auto& s : world_.sinks()) {
            const auto a = medium_.add_node(radio::NodeRole::sink, s.pos, s.tx_range, sink_home);
            link_.register_node(a, sink_home);
            sink_addrs.push_back(a);
        }
        link_.drive_sink_channels(sink_addrs, cfg_.t_end);

        medium_.set_energy_hook([this](radio::Address a, double bits, double dist, RadioMode mode, double now) {
            if (book_.is_sink(a)) return true;
            world_.drain(a, bits, dist, mode, now, &log_);
            if (world_.sensors()[static_cast<std::size_t>(a)].alive) return true;
            if (mode == RadioMode::tx) {
                // Last gasp: the packet on air still goes out.
                sim_.schedule(now + cfg_.mac.airtime(bits), "sensor_death", [this, a] { kill_sensor(a); }, a);
            } else {
                kill_sensor(a);
            }
            return false;
        });
        medium_.set_tx_observer([this](const radio::TxResult& r) {
            log_.tx_counts.push_back({r.channel, r.start});
            if (!opts_.record_deliveries) return;
            for (const auto& v : r.verdicts) deliveries_.push_back({r.start, r.src, v.receiver, r.channel, v.delivered});
        });
        medium_.set_receive_handler([this](radio::Address rcv, const Packet& p, radio::Address from) {
            if (book_.is_sink(rcv)) {
                if (mac_transport_) mac_transport_->on_receive(rcv, p, from);
            } else if (const auto* b = std::get_if<Beacon>(&p.body)) {
                on_beacon(rcv, *b);
            }
        });
    }

    void kill_sensor(radio::Address a) {
        if (!medium_.alive(a)) return;
        medium_.kill(a);
        link_.drop_all(a);
    }

    void build_sink_plane() {
        if (cfg_.ideal_sink_links) {
            transport_ = std::make_unique<sink::IdealTransport>(sim_, world_.sinks(), cfg_.mac.bitrate);
        } else {
            auto t = std::make_unique<sink::MacTransport>(link_, book_, cfg_.channels.sink_sink);
            mac_transport_ = t.get();
            transport_ = std::move(t);
        }
        sink_plane_ = std::make_unique<sink::SinkPlane>(sim_, world_, *transport_, log_, cfg_.sink_plane, seed_);
        sink_plane_->set_coverage_hook([this](RegionId r, NodeId taker) {
            if (taker >= 0) motion_[static_cast<std::size_t>(taker)].serve_until = sim_.now();
            sensors_->maintain(r);
        });
    }

    void on_delivery(const DataReport& r, NodeId sink) {
        if (!msssn()) return;
        sink_plane_->on_report(r, sink);
        const auto& src = world_.sensors()[static_cast<std::size_t>(r.source)];
        mobility::record_collection(motion_[static_cast<std::size_t>(sink)].state, src.pos, 1.0, sim_.now(),
                                    cfg_.mobility);
        if (r.hotspot_id >= 0) sink_plane_->observe_hotspot(sink, r.hotspot_id, r.created_at, r.stimulus);
    }

    void schedule_maintenance() {
        sim_.schedule(0.0, "maintain", [this] { maintain_tick(); });
    }
    void maintain_tick() {
        sensors_->maintain_all();
        const double next = sim_.now() + cfg_.tree.maintenance_period;
        if (next <= cfg_.t_end) sim_.schedule(next, "maintain", [this] { maintain_tick(); });
    }

    void schedule_mobility() {
        if (!msssn() || cfg_.mobility_step > cfg_.t_end) return;
        sim_.schedule(cfg_.mobility_step, "mobility", [this] { mobility_tick(); });
    }

    std::vector<int> sensors_per_area(const Rect& bounds) const {
        const int g = cfg_.mobility.area_grid;
        std::vector<int> counts(static_cast<std::size_t>(g * g), 0);
        for (const auto& s : world_.sensors()) {
            if (s.alive && bounds.contains(s.pos)) ++counts[static_cast<std::size_t>(mobility::area_of(bounds, g, s.pos))];
        }
        return counts;
    }

    void mobility_tick() {
        const double now = sim_.now();
        const double dt = cfg_.mobility_step;
        for (auto& sink : world_.sinks()) {
            if (!sink.alive) continue;
            auto& m = motion_[static_cast<std::size_t>(sink.id)];
            const bool was_transit = m.state.transit_to.has_value();
            const auto& covered = sink.covered_regions;
            if (!covered.empty() && !was_transit && (!covered.contains(m.serving) || (covered.size() > 1 && now >= m.serve_until))) {
                auto it = covered.upper_bound(m.serving);
                const RegionId next = it == covered.end() ? *covered.begin() : *it;
                if (next != m.serving) {
                    m.serving = next;
                    m.state = mobility::retarget(m.state, world_.regions()[static_cast<std::size_t>(next)].bounds,
                                                 cfg_.mobility);
                }
                m.serve_until = now + cfg_.region_dwell;
            }
            mobility::WorldView view{now, {}};
            if (m.state.model == mobility::Model::biased_sensor_density) view.sensors_per_area = sensors_per_area(m.state.bounds);
            m.state = mobility::step(m.state, dt, m.rng, view, cfg_.mobility);
            if (was_transit && !m.state.transit_to) m.serve_until = now + cfg_.region_dwell;
            sink.pos = m.state.pos;
            medium_.set_position(book_.sink(sink.id), sink.pos);
            waypoints_.push_back({now, sink.id, sink.pos});
        }
        const double next = now + dt;
        if (next <= cfg_.t_end) sim_.schedule(next, "mobility", [this] { mobility_tick(); });
    }

    void schedule_sensing() {
        if (!(cfg_.sensing_period > 0)) return;
        for (const auto& s : world_.sensors()) {
            traffic_rng_.emplace_back(seed_, fmt::format("traffic/sensor{}", s.id));
            const double phase = traffic_rng_.back().uniform(0.0, cfg_.sensing_period);
            if (phase <= cfg_.t_end) {
                sim_.schedule(phase, "sense", [this, id = s.id] { sense(id); }, s.id);
            }
        }
    }
    void sense(NodeId id) {
        const auto& s = world_.sensors()[static_cast<std::size_t>(id)];
        if (!s.alive) return;
        const double reading = traffic_rng_[static_cast<std::size_t>(id)].uniform01();
        sensors_->generate_report(id, s.pos, reading);
        const double next = sim_.now() + cfg_.sensing_period;
        if (next <= cfg_.t_end) sim_.schedule(next, "sense", [this, id] { sense(id); }, id);
    }

    void schedule_hotspots() {
        for (std::size_t i = 0; i < cfg_.hotspots.size(); ++i) {
            const auto& h = cfg_.hotspots[i];
            if (h.t_start <= cfg_.t_end) sim_.schedule(h.t_start, "hotspot", [this, i] { hotspot_tick(i); });
        }
    }
    void hotspot_tick(std::size_t i) {
        const auto& h = cfg_.hotspots[i];
        const Position p = h.at(sim_.now());
        for (const auto& s : world_.sensors()) {
            if (s.alive && distance(s.pos, p) <= s.sense_range) sensors_->generate_report(s.id, p, 1.0, h.id);
        }
        const double next = sim_.now() + cfg_.hotspot_sample_period;
        if (next <= std::min(h.t_stop, cfg_.t_end)) sim_.schedule(next, "hotspot", [this, i] { hotspot_tick(i); });
    }

    void schedule_queries() {
        auto queries = cfg_.queries;
        sim::RngStream rng(seed_, "queries/random");
        for (int i = 0; i < cfg_.random_queries; ++i) {
            QueryEvent q;
            q.t = rng.uniform(0.0, cfg_.t_end);
            q.origin = static_cast<NodeId>(rng.int_below(cfg_.sink_count));
            q.region = static_cast<RegionId>(rng.int_below(static_cast<std::int64_t>(world_.regions().size())));
            queries.push_back(q);
        }
        std::stable_sort(queries.begin(), queries.end(), [](const QueryEvent& a, const QueryEvent& b) { return a.t < b.t; });
        for (const auto& q : queries) {
            sim_.schedule(q.t, "query", [this, q] { sink_plane_->issue_query(q.origin, q.region); }, q.origin);
        }
    }

    void schedule_failures() {
        for (const auto& f : cfg_.failures) {
            if (f.t > cfg_.t_end) continue;
            sim_.schedule(f.t, "sink_failure", [this, s = f.sink] {
                auto& sink = world_.sinks()[static_cast<std::size_t>(s)];
                if (!sink.alive) return;
                sink.alive = false;
                medium_.kill(book_.sink(s));
                link_.drop_all(book_.sink(s));
                for (RegionId r : sink.covered_regions) sensors_->maintain(r);
            }, f.sink);
        }
    }

    void schedule_localization() {
        if (!cfg_.localization.enabled || cfg_.localization.rounds == 0) return;
        localizers_.assign(world_.sensors().size(), localization::Localizer(cfg_.localization.freshness));
        for (const auto& s : world_.sensors()) loc_rng_.emplace_back(seed_, fmt::format("localization/sensor{}", s.id));
        std::vector<NodeId> ids;
        for (const auto& s : world_.sinks()) ids.push_back(s.id);
        const auto sched = localization::schedule_beacons(ids, cfg_.mac.beacon_interval, cfg_.localization.rounds,
                                                          cfg_.localization.start);
        const double air = cfg_.mac.airtime(cfg_.localization.beacon_bits);
        const double lat = cfg_.mac.switch_latency;
        for (const auto& slot : sched.slots) {
            const double tb = link_.schedule().earliest_start(cfg_.channels.sensor_sink, slot.start, air + kBeaconOffset) +
                              kBeaconOffset;
            if (!std::isfinite(tb) || tb > cfg_.t_end) continue;
            sim_.schedule(std::max(0.0, tb - 2 * lat), "beacon_listen", [this, tb, air] {
                for (const auto& s : world_.sensors()) {
                    const auto a = book_.sensor(s.id);
                    if (!s.alive || medium_.receiving(a)) continue;  // busy nodes miss the beacon
                    link_.hold_channel(a, cfg_.channels.sensor_sink, tb + air + cfg_.mac.jitter);
                }
            });
            sim_.schedule(tb, "beacon", [this, sink = slot.sink] { send_beacon(sink); }, slot.sink);
        }
    }
    void send_beacon(NodeId s) {
        const auto& sink = world_.sinks()[static_cast<std::size_t>(s)];
        const auto a = book_.sink(s);
        // Beacons go straight to the medium so the advertised position is the
        // position at transmission; a busy sink skips its slot.
        if (!sink.alive || medium_.transmitting(a) || medium_.receiving(a) ||
            !medium_.is_tuned(a, cfg_.channels.sensor_sink)) {
            return;
        }
        medium_.transmit(a, Packet{cfg_.localization.beacon_bits, Beacon{s, sink.pos}}, cfg_.channels.sensor_sink,
                         radio::kBroadcast, nullptr);
    }
    void on_beacon(radio::Address rcv, const Beacon& b) {
        if (localizers_.empty()) return;
        const auto id = static_cast<std::size_t>(rcv);
        const auto& model = cfg_.localization.path_loss;
        const double d = std::max(distance(world_.sensors()[id].pos, b.pos), 1e-9 * model.d0);
        const double rssi = localization::sample_rssi(d, model, loc_rng_[id]);
        localizers_[id].observe({b.pos, rssi, localization::rssi_to_distance(rssi, model), sim_.now()});
    }

    const ScenarioConfig& cfg_;
    std::uint64_t seed_;
    SystemKind system_;
    RunOptions opts_;

    sim::Simulator sim_;
    World world_;
    metrics::MetricLog log_;
    radio::Medium medium_;
    radio::LinkLayer link_;
    radio::AddressBook book_;
    std::unique_ptr<sensor::SensorPlane> sensors_;
    std::unique_ptr<sink::SinkTransport> transport_;
    sink::MacTransport* mac_transport_ = nullptr;
    std::unique_ptr<sink::SinkPlane> sink_plane_;

    std::vector<SinkMotion> motion_;
    std::vector<sim::RngStream> traffic_rng_;
    std::vector<sim::RngStream> loc_rng_;
    std::vector<localization::Localizer> localizers_;
    std::vector<Waypoint> waypoints_;
    std::vector<DeliveryEvent> deliveries_;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, std::uint64_t seed, SystemKind system, const RunOptions& options) {
    config.validate(true);
    Runner runner(config, seed, system, options);
    return runner.run();
}

}  // namespace msssn::scenario
