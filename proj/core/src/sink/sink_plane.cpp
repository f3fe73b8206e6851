#include "msssn/sink/sink_plane.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "msssn/error.hpp"

namespace msssn::sink {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRetryGap = 0.005;  // s between hop retries
}  // namespace

void SinkPlaneConfig::validate() const {
    strategy.validate();
    hotspot.validate();
    if (!(heartbeat_period > 0)) throw InvalidArgument("heartbeat_period must be > 0");
    if (missed_heartbeats < 1) throw InvalidArgument("missed_heartbeats must be >= 1");
    if (!(failure_check_period > 0)) throw InvalidArgument("failure_check_period must be > 0");
    if (!(discovery_timeout > 0)) throw InvalidArgument("discovery_timeout must be > 0");
    if (hop_retries < 0) throw InvalidArgument("hop_retries must be >= 0");
    if (!(aggregate_period > 0)) throw InvalidArgument("aggregate_period must be > 0");
    if (!(control_bits > 0) || !(aggregate_bits > 0) || !(alert_bits > 0)) {
        throw InvalidArgument("sink packet sizes must be > 0");
    }
}

SinkPlane::SinkPlane(sim::Simulator& sim, World& world, SinkTransport& transport, metrics::MetricLog& log,
                     SinkPlaneConfig cfg, std::uint64_t master_seed)
    : sim_(sim),
      world_(world),
      transport_(transport),
      log_(log),
      cfg_(cfg),
      rng_(master_seed, "sink/plane"),
      broadcaster_(sim, transport, world.sinks(), cfg.strategy, master_seed),
      detector_(static_cast<int>(world.sinks().size()), cfg.heartbeat_period, cfg.missed_heartbeats),
      tracker_(cfg.hotspot) {
    cfg_.validate();
    transport_.set_receive([this](NodeId to, const Packet& p, NodeId from) { on_packet(to, p, from); });
    broadcaster_.set_deliver([this](NodeId at, const Flooded& f) { on_flooded(at, f); });
}

bool SinkPlane::covers(NodeId s, RegionId r) const {
    const auto& sink = world_.sinks().at(static_cast<std::size_t>(s));
    return sink.alive && sink.covered_regions.contains(r);
}

std::optional<Aggregate> SinkPlane::latest_aggregate(NodeId at, RegionId region) const {
    if (auto it = latest_.find({at, region}); it != latest_.end()) return it->second;
    return std::nullopt;
}

void SinkPlane::start(double t_end) {
    for (const auto& s : world_.sinks()) {
        const NodeId id = s.id;
        // Spread periodic sink traffic so peers do not all key up together.
        const double hb = rng_.uniform(0.0, 0.5 * cfg_.heartbeat_period);
        const double agg = cfg_.aggregate_period + rng_.uniform(0.0, 0.1 * cfg_.aggregate_period);
        if (hb <= t_end) sim_.schedule(hb, "heartbeat", [this, id, t_end] { heartbeat(id, t_end); }, id);
        if (agg <= t_end) sim_.schedule(agg, "aggregate", [this, id, t_end] { share_aggregates(id, t_end); }, id);
    }
    if (cfg_.failure_check_period <= t_end) {
        sim_.schedule(cfg_.failure_check_period, "failure_check", [this, t_end] { check_failures(t_end); });
    }
}

void SinkPlane::heartbeat(NodeId s, double t_end) {
    if (!alive(s)) return;
    transport_.broadcast(s, Packet{cfg_.control_bits, Heartbeat{s}});
    const double next = sim_.now() + cfg_.heartbeat_period;
    if (next <= t_end) sim_.schedule(next, "heartbeat", [this, s, t_end] { heartbeat(s, t_end); }, s);
}

void SinkPlane::check_failures(double t_end) {
    const double now = sim_.now();
    std::vector<bool> up;
    for (const auto& s : world_.sinks()) up.push_back(s.alive);
    for (NodeId failed : detector_.check(now, up)) {
        if (!cfg_.takeover) continue;
        const auto regions = world_.sinks()[static_cast<std::size_t>(failed)].covered_regions;
        try {
            for (const auto& [r, taker] : takeover(world_, failed)) {
                log_.coverage_changes.push_back({r, taker, now});
                if (on_coverage_) on_coverage_(r, taker);
            }
        } catch (const NoSinkAvailable&) {
            headless_ = true;
            if (log_.headless_since < 0) log_.headless_since = now;
            for (RegionId r : regions) {
                log_.coverage_changes.push_back({r, -1, now});
                if (on_coverage_) on_coverage_(r, -1);
            }
        }
    }
    const double next = now + cfg_.failure_check_period;
    if (next <= t_end) sim_.schedule(next, "failure_check", [this, t_end] { check_failures(t_end); });
}

void SinkPlane::on_report(const DataReport& report, NodeId sink) {
    samples_[{sink, report.region_id}].push_back({sim_.now(), report.reading});
}

void SinkPlane::share_aggregates(NodeId s, double t_end) {
    if (!alive(s)) return;
    const double now = sim_.now();
    const double t0 = now - cfg_.aggregate_period;
    for (RegionId r : world_.sinks()[static_cast<std::size_t>(s)].covered_regions) {
        auto& bucket = samples_[{s, r}];
        Aggregate a = aggregate_window(s, r, bucket, t0, now);
        std::erase_if(bucket, [t0](const ReadingSample& x) { return x.t < t0; });
        latest_[{s, r}] = a;
        broadcaster_.originate(s, a, cfg_.aggregate_bits);
    }
    const double next = now + cfg_.aggregate_period;
    if (next <= t_end) sim_.schedule(next, "aggregate", [this, s, t_end] { share_aggregates(s, t_end); }, s);
}

void SinkPlane::on_packet(NodeId to, const Packet& p, NodeId from) {
    if (!alive(to)) return;
    if (const auto* f = std::get_if<Flooded>(&p.body)) {
        broadcaster_.on_receive(to, *f);
    } else if (std::holds_alternative<Heartbeat>(p.body)) {
        detector_.heard(to, from, sim_.now());
    } else if (const auto* r = std::get_if<RouteReply>(&p.body)) {
        RouteReply reply = *r;
        reply.traversed.push_back(to);
        if (to == reply.origin) {
            complete_discovery(reply);
        } else {
            relay_reply(to, std::move(reply));
        }
    } else if (const auto* a = std::get_if<Alert>(&p.body)) {
        Alert alert = *a;
        alert.hop += 1;
        if (alert.hop + 1 >= alert.route.size()) {
            if (auto it = alert_rows_.find(alert.alert_id); it != alert_rows_.end()) {
                auto& row = log_.alerts[it->second];
                if (std::isnan(row.t_received)) row.t_received = sim_.now();
            }
        } else {
            relay_alert(to, std::move(alert));
        }
    }
}

void SinkPlane::on_flooded(NodeId at, const Flooded& f) {
    if (const auto* a = std::get_if<Aggregate>(&f.body)) {
        auto& slot = latest_[{at, a->region_id}];
        if (slot.producing_sink < 0 || a->t1 >= slot.t1) slot = *a;
    } else if (const auto* rr = std::get_if<RouteRequest>(&f.body)) {
        if (covers(at, rr->target_region)) answer_request(at, f, *rr);
    }
}

void SinkPlane::answer_request(NodeId responder, const Flooded& f, const RouteRequest& rr) {
    if (!answered_.insert({responder, rr.request_id}).second) return;
    RouteReply reply;
    reply.request_id = rr.request_id;
    reply.origin = f.origin;
    reply.route = f.path;
    reply.route.push_back(responder);
    reply.traversed = {responder};
    if (rr.query_id) {
        QueryAnswer ans;
        ans.query_id = *rr.query_id;
        if (auto agg = latest_aggregate(responder, rr.target_region)) {
            ans.aggregate = *agg;
            ans.stale = sim_.now() - agg->t1 > cfg_.stale_after;
        } else {
            ans.aggregate.region_id = rr.target_region;
            ans.aggregate.producing_sink = responder;
            ans.stale = true;
        }
        ans.snapshot_bytes = cfg_.snapshot_bytes;
        reply.answer = ans;
    }
    relay_reply(responder, std::move(reply));
}

void SinkPlane::relay_reply(NodeId holder, RouteReply reply) {
    // Position of the holder in the recorded route, walked backwards.
    const std::size_t idx = reply.route.size() - reply.traversed.size();
    if (idx == 0 || reply.route[idx] != holder) return;
    const NodeId next = reply.route[idx - 1];
    double bits = cfg_.control_bits + 32.0 * static_cast<double>(reply.route.size());
    if (reply.answer) bits += cfg_.aggregate_bits + 8.0 * reply.answer->snapshot_bytes;
    send_hop(holder, next, Packet{bits, std::move(reply)}, 0, nullptr);
}

void SinkPlane::send_hop(NodeId from, NodeId to, Packet packet, int attempt, std::function<void(bool)> done) {
    if (!alive(from) || !alive(to)) {
        // PathBroken: the requester times out and may rediscover.
        if (done) done(false);
        return;
    }
    Packet copy = packet;
    transport_.unicast(from, to, std::move(copy),
                       [this, from, to, packet = std::move(packet), attempt, done = std::move(done)](bool ok) mutable {
                           if (ok) {
                               if (done) done(true);
                               return;
                           }
                           if (attempt >= cfg_.hop_retries) {
                               if (done) done(false);
                               return;
                           }
                           sim_.schedule_in(kRetryGap * (attempt + 1), "sink_retry",
                                            [this, from, to, packet = std::move(packet), attempt,
                                             done = std::move(done)]() mutable {
                                                send_hop(from, to, std::move(packet), attempt + 1, std::move(done));
                                            },
                                            {from, to});
                       });
}

void SinkPlane::complete_discovery(const RouteReply& reply) {
    replies_.push_back({reply.request_id, reply.answer ? std::optional(reply.answer->query_id) : std::nullopt,
                        reply.route, reply.traversed, sim_.now()});
    auto it = discoveries_.find(reply.request_id);
    if (it == discoveries_.end() || it->second.done) return;
    Discovery& d = it->second;
    d.done = true;
    sim_.cancel(d.timer);
    route_cache_[{d.src, d.target}] = reply.route;
    if (d.query_id) {
        auto& row = log_.queries[query_rows_.at(*d.query_id)];
        row.t_answered = sim_.now();
        row.success = true;
        row.stale = reply.answer && reply.answer->stale;
    }
    auto cb = std::move(d.cb);
    if (cb) cb(reply.route);
}

std::int64_t SinkPlane::start_discovery(NodeId src, RegionId target, RouteCallback cb,
                                        std::optional<std::int64_t> query_id) {
    const std::int64_t id = next_request_++;
    Discovery d{src, target, std::move(cb), query_id};
    d.timer = sim_.schedule_in(cfg_.discovery_timeout, "discovery_timeout", [this, id] {
        auto it = discoveries_.find(id);
        if (it == discoveries_.end() || it->second.done) return;
        it->second.done = true;
        auto cb = std::move(it->second.cb);
        if (cb) cb(std::nullopt);
    }, src);
    discoveries_.emplace(id, std::move(d));
    broadcaster_.originate(src, RouteRequest{id, target, query_id}, cfg_.control_bits);
    return id;
}

void SinkPlane::discover_route(NodeId src, RegionId target, RouteCallback cb) {
    if (!alive(src)) throw NodeDead(fmt::format("sink {} is dead", src));
    if (covers(src, target)) {
        sim_.schedule(sim_.now(), "route_local", [cb = std::move(cb), src] { cb(std::vector<NodeId>{src}); }, src);
        return;
    }
    if (auto it = route_cache_.find({src, target}); it != route_cache_.end()) {
        const auto& route = it->second;
        const bool intact = std::all_of(route.begin(), route.end(), [this](NodeId s) { return alive(s); }) &&
                            covers(route.back(), target);
        if (intact) {
            sim_.schedule(sim_.now(), "route_cached", [cb = std::move(cb), route] { cb(route); }, src);
            return;
        }
        route_cache_.erase(it);
    }
    start_discovery(src, target, std::move(cb), std::nullopt);
}

std::int64_t SinkPlane::issue_query(NodeId origin, RegionId region) {
    const std::int64_t qid = next_query_++;
    const double now = sim_.now();
    query_rows_[qid] = log_.queries.size();
    log_.queries.push_back({qid, origin, region, now, kNaN, false, false});
    if (!alive(origin)) return qid;
    if (covers(origin, region)) {
        auto& row = log_.queries.back();
        row.t_answered = now;
        row.success = true;
        const auto agg = latest_aggregate(origin, region);
        row.stale = !agg || now - agg->t1 > cfg_.stale_after;
        return qid;
    }
    start_discovery(origin, region, nullptr, qid);
    return qid;
}

void SinkPlane::observe_hotspot(NodeId observer, std::int64_t hotspot_id, double t, const Position& pos) {
    if (!alive(observer)) return;
    const auto decision = tracker_.observe(world_, hotspot_id, t, pos);
    if (!decision || covers(observer, decision->to_region)) return;
    const std::int64_t alert_id = static_cast<std::int64_t>(log_.alerts.size());
    alert_rows_[alert_id] = log_.alerts.size();
    log_.alerts.push_back({hotspot_id, observer, decision->to_region, sim_.now(), kNaN});
    Alert alert;
    alert.alert_id = alert_id;
    alert.hotspot_id = hotspot_id;
    alert.from_sink = observer;
    alert.target_region = decision->to_region;
    alert.t_sent = sim_.now();
    alert.history = tracker_.track(hotspot_id);
    discover_route(observer, decision->to_region,
                   [this, alert = std::move(alert)](std::optional<std::vector<NodeId>> route) mutable {
                       if (!route) return;
                       alert.route = std::move(*route);
                       alert.hop = 0;
                       const NodeId holder = alert.route.front();
                       relay_alert(holder, std::move(alert));
                   });
}

void SinkPlane::relay_alert(NodeId holder, Alert alert) {
    if (alert.hop + 1 >= alert.route.size()) return;
    const NodeId next = alert.route[alert.hop + 1];
    const double bits = cfg_.alert_bits + 64.0 * static_cast<double>(alert.history.size());
    const auto key = std::make_pair(alert.route.front(), alert.target_region);
    send_hop(holder, next, Packet{bits, std::move(alert)}, 0, [this, key](bool ok) {
        if (!ok) route_cache_.erase(key);
    });
}

}  // namespace msssn::sink
