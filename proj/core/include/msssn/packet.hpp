#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "msssn/world/geometry.hpp"
#include "msssn/world/world.hpp"

namespace msssn {

struct DataReport {
    std::int64_t report_id = 0;
    NodeId source = 0;
    RegionId region_id = 0;
    double reading = 0.0;
    double payload_bits = 0.0;
    double created_at = 0.0;
    std::int32_t hop_count = 0;
    std::int64_t hotspot_id = -1;  // >= 0 when triggered by a tracked hotspot
    Position stimulus;
};

/// Summary a sink shares with its peers. `mean` is only meaningful when
/// count > 0.
struct Aggregate {
    RegionId region_id = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    std::int64_t report_count = 0;
    double mean = 0.0;
    bool has_mean = false;
    NodeId producing_sink = -1;
};

struct Beacon {
    NodeId sink = 0;
    Position pos;
};

struct Heartbeat {
    NodeId sink = 0;
};

struct RouteRequest {
    std::int64_t request_id = 0;
    RegionId target_region = 0;
    std::optional<std::int64_t> query_id;
};

struct OpaquePayload {
    std::int64_t tag = 0;
};

using FloodBody = std::variant<Aggregate, RouteRequest, OpaquePayload>;

/// Network-wide broadcast envelope. `path` lists the sinks that carried
/// this copy, origin first; `sender_pos` is the GPS position of the last
/// forwarder (used by location-based suppression).
struct Flooded {
    NodeId origin = 0;
    std::int64_t broadcast_id = 0;
    NodeId sender = 0;
    Position sender_pos;
    std::vector<NodeId> path;
    FloodBody body;
};

struct QueryAnswer {
    std::int64_t query_id = 0;
    Aggregate aggregate;
    bool stale = false;
    double snapshot_bytes = 0.0;
};

/// Source-routed unicast back to the requester. `route` is the request's
/// recorded path (origin .. responder); the reply walks it in reverse.
struct RouteReply {
    std::int64_t request_id = 0;
    NodeId origin = 0;
    std::vector<NodeId> route;
    std::vector<NodeId> traversed;
    std::optional<QueryAnswer> answer;
};

struct HotspotObservation {
    double t = 0.0;
    Position pos;
};

/// Source-routed along `route` (origin first).
struct Alert {
    std::int64_t alert_id = 0;
    std::int64_t hotspot_id = 0;
    NodeId from_sink = 0;
    RegionId target_region = 0;
    double t_sent = 0.0;
    std::vector<HotspotObservation> history;
    std::vector<NodeId> route;
    std::size_t hop = 0;
};

using PacketBody = std::variant<DataReport, Beacon, Heartbeat, Flooded, RouteReply, Alert, OpaquePayload>;

struct Packet {
    double bits = 0.0;
    PacketBody body;
};

}  // namespace msssn
