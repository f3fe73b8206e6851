#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "msssn/metrics/metric_log.hpp"
#include "msssn/packet.hpp"
#include "msssn/sim/rng.hpp"
#include "msssn/sim/simulator.hpp"
#include "msssn/sink/aggregate.hpp"
#include "msssn/sink/broadcast.hpp"
#include "msssn/sink/hotspot.hpp"
#include "msssn/sink/takeover.hpp"
#include "msssn/sink/transport.hpp"
#include "msssn/world/world.hpp"

namespace msssn::sink {

struct SinkPlaneConfig {
    BroadcastStrategy strategy;
    double heartbeat_period = 1.0;
    int missed_heartbeats = 3;
    double failure_check_period = 0.25;
    double discovery_timeout = 2.0;
    int hop_retries = 2;
    double aggregate_period = 10.0;
    double control_bits = 512.0;
    double aggregate_bits = 1024.0;
    double alert_bits = 1024.0;
    double snapshot_bytes = 0.0;  // opaque camera payload attached to query answers
    double stale_after = 20.0;    // s; older cached aggregates are flagged stale
    bool takeover = true;
    HotspotConfig hotspot;

    void validate() const;
};

/// A RouteReply that reached its requester, with the hops it actually took.
struct ReplyTrace {
    std::int64_t request_id = 0;
    std::optional<std::int64_t> query_id;
    std::vector<NodeId> route;      // request path, origin .. responder
    std::vector<NodeId> traversed;  // responder .. origin as walked
    double t = 0.0;
};

/// Sink MANET behaviour: aggregate sharing, route discovery with
/// reverse-path replies, remote-user queries, heartbeat failure detection
/// with takeover, and hotspot alerts.
class SinkPlane {
public:
    using RouteCallback = std::function<void(std::optional<std::vector<NodeId>>)>;
    using CoverageHook = std::function<void(RegionId, NodeId new_sink)>;

    SinkPlane(sim::Simulator& sim, World& world, SinkTransport& transport, metrics::MetricLog& log,
              SinkPlaneConfig cfg, std::uint64_t master_seed);

    /// Schedules heartbeats, failure checks and aggregate sharing up to t_end.
    void start(double t_end);

    /// Delivery hook for reports that reached `sink`.
    void on_report(const DataReport& report, NodeId sink);

    /// Floods a RouteRequest for `target` unless `src` covers it or holds a
    /// cached route whose hops are all alive. `cb` gets the first route
    /// (src .. responder) or std::nullopt after the discovery timeout.
    void discover_route(NodeId src, RegionId target, RouteCallback cb);

    /// Remote-user query about `region` entering at `origin`. Returns its id.
    std::int64_t issue_query(NodeId origin, RegionId region);

    /// Feeds a hotspot sighting made by `observer`; may trigger an alert.
    void observe_hotspot(NodeId observer, std::int64_t hotspot_id, double t, const Position& pos);

    void set_coverage_hook(CoverageHook h) { on_coverage_ = std::move(h); }

    [[nodiscard]] const std::vector<ReplyTrace>& replies() const { return replies_; }
    [[nodiscard]] const Broadcaster& broadcaster() const { return broadcaster_; }
    [[nodiscard]] const HotspotTracker& tracker() const { return tracker_; }
    [[nodiscard]] std::optional<Aggregate> latest_aggregate(NodeId at, RegionId region) const;
    [[nodiscard]] bool headless() const { return headless_; }
    [[nodiscard]] const SinkPlaneConfig& config() const { return cfg_; }

private:
    struct Discovery {
        NodeId src;
        RegionId target;
        RouteCallback cb;
        std::optional<std::int64_t> query_id;
        sim::EventId timer = 0;
        bool done = false;
    };

    void on_packet(NodeId to, const Packet& p, NodeId from);
    void on_flooded(NodeId at, const Flooded& f);
    void answer_request(NodeId responder, const Flooded& f, const RouteRequest& rr);
    void relay_reply(NodeId holder, RouteReply reply);
    void complete_discovery(const RouteReply& reply);
    void relay_alert(NodeId holder, Alert alert);
    void send_hop(NodeId from, NodeId to, Packet packet, int attempt, std::function<void(bool)> done);
    std::int64_t start_discovery(NodeId src, RegionId target, RouteCallback cb, std::optional<std::int64_t> query_id);

    void heartbeat(NodeId s, double t_end);
    void check_failures(double t_end);
    void share_aggregates(NodeId s, double t_end);
    [[nodiscard]] bool alive(NodeId s) const { return world_.sinks().at(static_cast<std::size_t>(s)).alive; }
    [[nodiscard]] bool covers(NodeId s, RegionId r) const;

    sim::Simulator& sim_;
    World& world_;
    SinkTransport& transport_;
    metrics::MetricLog& log_;
    SinkPlaneConfig cfg_;
    sim::RngStream rng_;
    Broadcaster broadcaster_;
    FailureDetector detector_;
    HotspotTracker tracker_;

    std::int64_t next_request_ = 0;
    std::int64_t next_query_ = 0;
    std::map<std::int64_t, Discovery> discoveries_;
    std::set<std::pair<NodeId, std::int64_t>> answered_;
    std::map<std::pair<NodeId, RegionId>, std::vector<NodeId>> route_cache_;
    std::map<std::int64_t, std::size_t> query_rows_;  // query id -> log row
    std::map<std::int64_t, std::size_t> alert_rows_;  // alert id -> log row

    std::map<std::pair<NodeId, RegionId>, std::vector<ReadingSample>> samples_;
    std::map<std::pair<NodeId, RegionId>, Aggregate> latest_;
    std::vector<ReplyTrace> replies_;
    bool headless_ = false;
    CoverageHook on_coverage_;
};

}  // namespace msssn::sink
