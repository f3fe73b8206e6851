#include "msssn/sensor/sensor_plane.hpp"

#include <fmt/format.h>

#include <limits>

#include "msssn/error.hpp"

namespace msssn::sensor {

SensorPlane::SensorPlane(sim::Simulator& sim, World& world, radio::Medium& medium, radio::LinkLayer& link,
                         radio::ChannelPlan plan, metrics::MetricLog& log, SensorPlaneConfig cfg)
    : sim_(sim),
      world_(world),
      medium_(medium),
      link_(link),
      plan_(plan),
      book_{static_cast<std::int32_t>(world.sensors().size())},
      log_(log),
      cfg_(cfg),
      graph_(world) {
    if (cfg_.retry_limit < 0) throw InvalidArgument("retry_limit must be >= 0");
    if (!(cfg_.report_bits > 0)) throw InvalidArgument("report_bits must be > 0");
    buffers_.resize(world.sensors().size());
    for (const auto& r : world.regions()) {
        CollectionTree t;
        t.region_id = r.id;
        t.strategy = cfg_.strategy;
        trees_.push_back(std::move(t));
    }
}

NodeId SensorPlane::region_sink(RegionId r) const {
    const auto sinks = world_.covering_sinks(r);
    return sinks.empty() ? -1 : sinks.front();
}

std::optional<DataReport> SensorPlane::generate_report(NodeId sensor, const Position& stimulus, double reading,
                                                       std::int64_t hotspot_id) {
    const auto& s = world_.sensors().at(static_cast<std::size_t>(sensor));
    if (!s.alive) throw NodeDead(fmt::format("sensor {} is dead", sensor));
    if (distance(s.pos, stimulus) > s.sense_range) return std::nullopt;
    DataReport rep;
    rep.report_id = next_report_id_++;
    rep.source = sensor;
    rep.region_id = s.region_id;
    rep.reading = reading;
    rep.payload_bits = cfg_.report_bits;
    rep.created_at = sim_.now();
    rep.hop_count = 0;
    rep.hotspot_id = hotspot_id;
    rep.stimulus = stimulus;
    log_.generated.push_back({rep.report_id, sensor, rep.region_id, rep.created_at});
    advance(InFlight{rep, sensor});
    return rep;
}

void SensorPlane::maintain(RegionId r) {
    auto& tree = trees_.at(static_cast<std::size_t>(r));
    const NodeId sink = region_sink(r);
    // With no covering sink, an unreachable position leaves the tree without a proxy.
    const Position sink_pos = sink >= 0 ? world_.sinks()[static_cast<std::size_t>(sink)].pos
                                        : Position{std::numeric_limits<double>::infinity(), 0.0};
    if (maintain_tree(tree, world_, graph_, sink_pos)) {
        log_.tree_versions.push_back({r, sim_.now(), tree.version});
    }
    if (!tree.has_sink_path()) return;
    for (NodeId id : world_.regions()[static_cast<std::size_t>(r)].member_sensor_ids) {
        auto& buf = buffers_[static_cast<std::size_t>(id)];
        if (buf.empty()) continue;
        auto pending = std::move(buf);
        buf.clear();
        for (auto& f : pending) advance(std::move(f));
    }
}

void SensorPlane::maintain_all() {
    for (const auto& r : world_.regions()) maintain(r.id);
}

void SensorPlane::buffer(InFlight f) {
    auto& buf = buffers_.at(static_cast<std::size_t>(f.holder));
    if (buf.size() >= cfg_.buffer_capacity) {
        drop(buf.front(), metrics::DropReason::buffer_overflow);
        buf.pop_front();
    }
    buf.push_back(std::move(f));
}

void SensorPlane::drop(const InFlight& f, metrics::DropReason why) {
    log_.drops.push_back({f.report.report_id, sim_.now(), why, f.report.hop_count});
}

void SensorPlane::advance(InFlight f) {
    if (!world_.sensors()[static_cast<std::size_t>(f.holder)].alive) {
        drop(f, metrics::DropReason::node_dead);
        return;
    }
    const auto& tree = trees_.at(static_cast<std::size_t>(f.report.region_id));
    if (!tree.has_sink_path()) {
        buffer(std::move(f));
        return;
    }
    const NodeId sink = region_sink(f.report.region_id);
    if (f.holder == tree.proxy && (f.on_uplink || tree.strategy == TreeStrategy::sink_rooted ||
                                   f.holder == tree.root)) {
        send_to_sink(std::move(f), sink);
        return;
    }
    if (tree.strategy == TreeStrategy::access_node_rooted && (f.on_uplink || f.holder == tree.root)) {
        const NodeId next = tree.uplink_next(f.holder);
        if (next >= 0) {
            f.on_uplink = true;
            send_to_sensor(std::move(f), next);
            return;
        }
        // The uplink moved away from this relay; fall back to the tree.
        f.on_uplink = false;
        if (f.holder == tree.root) {
            buffer(std::move(f));
            return;
        }
    }
    const NodeId parent = tree.next_hop(f.holder);
    if (parent < 0) {
        drop(f, metrics::DropReason::detached);
        return;
    }
    send_to_sensor(std::move(f), parent);
}

void SensorPlane::send_to_sensor(InFlight f, NodeId next) {
    Packet pkt{f.report.payload_bits, f.report};
    const NodeId holder = f.holder;
    link_.send(book_.sensor(holder), std::move(pkt), plan_.sensor_sensor, book_.sensor(next),
               [this, f = std::move(f), next](bool ok) mutable {
                   if (!ok) {
                       retry_or_drop(std::move(f));
                       return;
                   }
                   f.holder = next;
                   f.attempts = 0;
                   ++f.report.hop_count;
                   if (on_relay_) on_relay_(f.report, next);
                   advance(std::move(f));
               });
}

void SensorPlane::send_to_sink(InFlight f, NodeId sink) {
    if (cfg_.proxy_wired) {
        deliver(std::move(f), sink);
        return;
    }
    Packet pkt{f.report.payload_bits, f.report};
    const NodeId holder = f.holder;
    link_.send(book_.sensor(holder), std::move(pkt), plan_.sensor_sink, book_.sink(sink),
               [this, f = std::move(f), sink](bool ok) mutable {
                   if (!ok) {
                       retry_or_drop(std::move(f));
                       return;
                   }
                   deliver(std::move(f), sink);
               });
}

void SensorPlane::retry_or_drop(InFlight f) {
    if (!world_.sensors()[static_cast<std::size_t>(f.holder)].alive) {
        drop(f, metrics::DropReason::node_dead);
        return;
    }
    if (++f.attempts > cfg_.retry_limit) {
        drop(f, metrics::DropReason::retries_exhausted);
        return;
    }
    advance(std::move(f));
}

void SensorPlane::deliver(InFlight f, NodeId sink) {
    ++f.report.hop_count;
    const double now = sim_.now();
    log_.deliveries.push_back({f.report.report_id, f.report.source, f.report.region_id, sink, f.report.created_at,
                               now, f.report.hop_count});
    if (on_delivered_) on_delivered_(f.report, sink);
}

}  // namespace msssn::sensor
