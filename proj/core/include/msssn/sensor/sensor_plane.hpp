#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "msssn/metrics/metric_log.hpp"
#include "msssn/packet.hpp"
#include "msssn/radio/link_layer.hpp"
#include "msssn/radio/medium.hpp"
#include "msssn/sensor/collection_tree.hpp"
#include "msssn/sim/simulator.hpp"
#include "msssn/world/world.hpp"

namespace msssn::sensor {

struct SensorPlaneConfig {
    TreeStrategy strategy = TreeStrategy::sink_rooted;
    int retry_limit = 2;
    double maintenance_period = 1.0;
    std::size_t buffer_capacity = 64;
    double report_bits = 2000.0;
    /// Proxy wired to its sink: the final hop is free and collision-exempt.
    bool proxy_wired = false;
};

/// Event-driven intra-region collection: report generation, hop-by-hop
/// forwarding along the region's collection tree (sensor-sensor channel),
/// the final hop to the covering sink (sensor-sink channel), and tree
/// maintenance as sinks move or sensors die.
class SensorPlane {
public:
    using DeliveryHook = std::function<void(const DataReport&, NodeId sink)>;
    using RelayObserver = std::function<void(const DataReport&, NodeId relay)>;

    SensorPlane(sim::Simulator& sim, World& world, radio::Medium& medium, radio::LinkLayer& link,
                radio::ChannelPlan plan, metrics::MetricLog& log, SensorPlaneConfig cfg);

    void set_delivery_hook(DeliveryHook h) { on_delivered_ = std::move(h); }
    void set_relay_observer(RelayObserver o) { on_relay_ = std::move(o); }

    /// Senses a stimulus. Detection uses the closed disk |stimulus - pos| <=
    /// sense_range; std::nullopt when out of range. Throws NodeDead.
    std::optional<DataReport> generate_report(NodeId sensor, const Position& stimulus, double reading,
                                              std::int64_t hotspot_id = -1);

    /// Recomputes region r's tree for its covering sink (or none). Logs a
    /// tree version record and flushes buffered reports when data can flow.
    void maintain(RegionId r);
    void maintain_all();

    [[nodiscard]] const CollectionTree& tree(RegionId r) const { return trees_.at(static_cast<std::size_t>(r)); }
    [[nodiscard]] const RegionGraph& graph() const { return graph_; }
    [[nodiscard]] std::size_t buffered(NodeId s) const { return buffers_.at(static_cast<std::size_t>(s)).size(); }
    [[nodiscard]] const SensorPlaneConfig& config() const { return cfg_; }

    /// Covering sink whose position roots region r's tree, -1 if none.
    [[nodiscard]] NodeId region_sink(RegionId r) const;

private:
    struct InFlight {
        DataReport report;
        NodeId holder;
        int attempts = 0;
        bool on_uplink = false;
    };

    void advance(InFlight f);
    void send_to_sensor(InFlight f, NodeId next);
    void send_to_sink(InFlight f, NodeId sink);
    void deliver(InFlight f, NodeId sink);
    void drop(const InFlight& f, metrics::DropReason why);
    void buffer(InFlight f);
    void retry_or_drop(InFlight f);

    sim::Simulator& sim_;
    World& world_;
    radio::Medium& medium_;
    radio::LinkLayer& link_;
    radio::ChannelPlan plan_;
    radio::AddressBook book_;
    metrics::MetricLog& log_;
    SensorPlaneConfig cfg_;
    RegionGraph graph_;
    std::vector<CollectionTree> trees_;
    std::vector<std::deque<InFlight>> buffers_;
    std::int64_t next_report_id_ = 0;
    DeliveryHook on_delivered_;
    RelayObserver on_relay_;
};

}  // namespace msssn::sensor
