#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "msssn/world/world.hpp"

namespace msssn::sensor {

enum class TreeStrategy { sink_rooted, access_node_rooted };

/// Sensor-sensor connectivity restricted to region members: u ~ v iff both
/// are in the same region and within the (shared) sensor tx range.
/// Built once; sensors never move.
class RegionGraph {
public:
    RegionGraph() = default;
    explicit RegionGraph(const World& world);

    /// Sorted neighbor ids of `s` inside its own region (alive or not).
    [[nodiscard]] const std::vector<NodeId>& neighbors(NodeId s) const {
        return adj_.at(static_cast<std::size_t>(s));
    }

private:
    std::vector<std::vector<NodeId>> adj_;
};

struct CollectionTree {
    RegionId region_id = 0;
    TreeStrategy strategy = TreeStrategy::sink_rooted;
    /// Tree root: the proxy (sink_rooted) or the access node. -1 when the
    /// region has no alive member or no proxy is in reach of the sink.
    NodeId root = -1;
    /// Sensor nearest the sink that can reach it directly; -1 when none.
    NodeId proxy = -1;
    std::map<NodeId, NodeId> parent;  // child -> parent
    std::map<NodeId, int> depth;      // attached members only
    std::set<NodeId> detached;        // alive members with no path to root
    /// access_node_rooted: min-hop sensor path access node .. proxy.
    std::vector<NodeId> uplink;
    std::int64_t version = 0;

    [[nodiscard]] bool empty() const { return root < 0 && detached.empty(); }
    [[nodiscard]] bool attached(NodeId s) const { return depth.contains(s); }
    /// Directed edge set (parent map plus uplink hops), used to detect changes.
    [[nodiscard]] std::set<std::pair<NodeId, NodeId>> edges() const;
    /// Tree parent of an attached non-root member, else -1.
    [[nodiscard]] NodeId next_hop(NodeId s) const;
    /// Uplink successor of `s` (access_node_rooted), -1 at the proxy or when
    /// `s` is not on the uplink.
    [[nodiscard]] NodeId uplink_next(NodeId s) const;
    /// Sensor hops a report from `s` takes before the final sink hop.
    [[nodiscard]] int sensor_hops(NodeId s) const;
    /// Whether data can reach the sink at all.
    [[nodiscard]] bool has_sink_path() const {
        return root >= 0 && proxy >= 0 && (strategy == TreeStrategy::sink_rooted || !uplink.empty());
    }
};

/// Alive member of `region` nearest `sink_pos` that is within its own tx
/// range of the sink (sensor -> sink link exists). Lowest id on ties.
NodeId choose_proxy(const World& world, RegionId region, const Position& sink_pos);

/// Alive member of `region` with the most residual energy, lowest id on ties.
NodeId choose_access_node(const World& world, RegionId region);

/// BFS shortest-hop tree over alive region members. Each child's parent is
/// its lowest-id neighbor one level closer to the root. Throws EmptyRegion
/// when the region has no alive member (the returned-by-value alternative
/// is build_collection_tree_or_empty).
CollectionTree build_collection_tree(const World& world, const RegionGraph& graph, RegionId region,
                                     TreeStrategy strategy, const Position& sink_pos);

/// As build_collection_tree, but an empty region yields an empty tree.
CollectionTree build_collection_tree_or_empty(const World& world, const RegionGraph& graph, RegionId region,
                                              TreeStrategy strategy, const Position& sink_pos);

/// Re-evaluates a tree after sink motion or deaths. sink_rooted trees are
/// regrown from the current proxy; access_node_rooted trees keep their access
/// node until it dies, regrow only when a death broke an edge, and always
/// recompute the uplink. Returns true (and bumps version) iff the edge set
/// changed.
bool maintain_tree(CollectionTree& tree, const World& world, const RegionGraph& graph, const Position& sink_pos);

}  // namespace msssn::sensor
