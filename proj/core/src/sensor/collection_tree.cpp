#include "msssn/sensor/collection_tree.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <limits>

#include "msssn/error.hpp"

namespace msssn::sensor {

RegionGraph::RegionGraph(const World& world) {
    const auto& sensors = world.sensors();
    adj_.assign(sensors.size(), {});
    for (const auto& region : world.regions()) {
        const auto& m = region.member_sensor_ids;
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t j = i + 1; j < m.size(); ++j) {
                const auto& a = sensors[static_cast<std::size_t>(m[i])];
                const auto& b = sensors[static_cast<std::size_t>(m[j])];
                if (distance(a.pos, b.pos) <= std::min(a.tx_range, b.tx_range)) {
                    adj_[static_cast<std::size_t>(a.id)].push_back(b.id);
                    adj_[static_cast<std::size_t>(b.id)].push_back(a.id);
                }
            }
        }
    }
    for (auto& v : adj_) std::sort(v.begin(), v.end());
}

std::set<std::pair<NodeId, NodeId>> CollectionTree::edges() const {
    std::set<std::pair<NodeId, NodeId>> e;
    for (const auto& [child, par] : parent) e.emplace(child, par);
    for (std::size_t i = 0; i + 1 < uplink.size(); ++i) e.emplace(uplink[i], uplink[i + 1]);
    return e;
}

NodeId CollectionTree::next_hop(NodeId s) const {
    auto it = parent.find(s);
    return it == parent.end() ? -1 : it->second;
}

NodeId CollectionTree::uplink_next(NodeId s) const {
    for (std::size_t i = 0; i + 1 < uplink.size(); ++i) {
        if (uplink[i] == s) return uplink[i + 1];
    }
    return -1;
}

int CollectionTree::sensor_hops(NodeId s) const {
    auto it = depth.find(s);
    if (it == depth.end()) return -1;
    int hops = it->second;
    if (strategy == TreeStrategy::access_node_rooted && !uplink.empty()) {
        hops += static_cast<int>(uplink.size()) - 1;
    }
    return hops;
}

NodeId choose_proxy(const World& world, RegionId region, const Position& sink_pos) {
    NodeId best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId id : world.regions().at(static_cast<std::size_t>(region)).member_sensor_ids) {
        const auto& s = world.sensors()[static_cast<std::size_t>(id)];
        if (!s.alive) continue;
        const double d = distance(s.pos, sink_pos);
        if (d > s.tx_range) continue;
        if (d < best_d || (d == best_d && id < best)) {
            best = id;
            best_d = d;
        }
    }
    return best;
}

NodeId choose_access_node(const World& world, RegionId region) {
    NodeId best = -1;
    double best_e = -1.0;
    for (NodeId id : world.regions().at(static_cast<std::size_t>(region)).member_sensor_ids) {
        const auto& s = world.sensors()[static_cast<std::size_t>(id)];
        if (!s.alive) continue;
        if (s.energy > best_e || (s.energy == best_e && id < best)) {
            best = id;
            best_e = s.energy;
        }
    }
    return best;
}

namespace {

bool alive(const World& w, NodeId id) { return w.sensors()[static_cast<std::size_t>(id)].alive; }

/// Hop distances from `root` over alive region members.
std::map<NodeId, int> bfs_depths(const World& world, const RegionGraph& graph, NodeId root) {
    std::map<NodeId, int> depth;
    std::deque<NodeId> q{root};
    depth[root] = 0;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        for (NodeId v : graph.neighbors(u)) {
            if (!alive(world, v) || depth.contains(v)) continue;
            depth[v] = depth[u] + 1;
            q.push_back(v);
        }
    }
    return depth;
}

/// Fills parent/depth/detached of `tree` for a BFS rooted at tree.root.
void grow(CollectionTree& tree, const World& world, const RegionGraph& graph) {
    tree.parent.clear();
    tree.depth.clear();
    tree.detached.clear();
    const auto& members = world.regions().at(static_cast<std::size_t>(tree.region_id)).member_sensor_ids;
    if (tree.root >= 0) {
        tree.depth = bfs_depths(world, graph, tree.root);
        for (const auto& [v, d] : tree.depth) {
            if (d == 0) continue;
            for (NodeId u : graph.neighbors(v)) {  // ascending id
                auto it = tree.depth.find(u);
                if (it != tree.depth.end() && it->second == d - 1) {
                    tree.parent[v] = u;
                    break;
                }
            }
        }
    }
    for (NodeId id : members) {
        if (alive(world, id) && !tree.depth.contains(id)) tree.detached.insert(id);
    }
}

/// Min-hop path from `from` to `to` over alive region members, lowest-id
/// predecessor on ties. Empty when unreachable.
std::vector<NodeId> min_hop_path(const World& world, const RegionGraph& graph, NodeId from, NodeId to) {
    if (from < 0 || to < 0) return {};
    const auto depth = bfs_depths(world, graph, to);
    if (!depth.contains(from)) return {};
    std::vector<NodeId> path{from};
    NodeId cur = from;
    while (cur != to) {
        const int d = depth.at(cur);
        for (NodeId u : graph.neighbors(cur)) {
            auto it = depth.find(u);
            if (it != depth.end() && it->second == d - 1) {
                cur = u;
                break;
            }
        }
        path.push_back(cur);
    }
    return path;
}

void set_uplink(CollectionTree& tree, const World& world, const RegionGraph& graph) {
    tree.uplink.clear();
    if (tree.strategy != TreeStrategy::access_node_rooted) return;
    tree.uplink = min_hop_path(world, graph, tree.root, tree.proxy);
}

}  // namespace

CollectionTree build_collection_tree_or_empty(const World& world, const RegionGraph& graph, RegionId region,
                                              TreeStrategy strategy, const Position& sink_pos) {
    CollectionTree tree;
    tree.region_id = region;
    tree.strategy = strategy;
    tree.proxy = choose_proxy(world, region, sink_pos);
    tree.root = strategy == TreeStrategy::sink_rooted ? tree.proxy : choose_access_node(world, region);
    grow(tree, world, graph);
    set_uplink(tree, world, graph);
    return tree;
}

CollectionTree build_collection_tree(const World& world, const RegionGraph& graph, RegionId region,
                                     TreeStrategy strategy, const Position& sink_pos) {
    const auto& members = world.regions().at(static_cast<std::size_t>(region)).member_sensor_ids;
    const bool any_alive = std::any_of(members.begin(), members.end(), [&](NodeId id) { return alive(world, id); });
    if (!any_alive) throw EmptyRegion(fmt::format("region {} has no alive sensor", region));
    return build_collection_tree_or_empty(world, graph, region, strategy, sink_pos);
}

bool maintain_tree(CollectionTree& tree, const World& world, const RegionGraph& graph, const Position& sink_pos) {
    const auto before = tree.edges();

    tree.proxy = choose_proxy(world, tree.region_id, sink_pos);
    if (tree.strategy == TreeStrategy::sink_rooted) {
        tree.root = tree.proxy;
        grow(tree, world, graph);
    } else {
        const bool root_gone = tree.root < 0 || !alive(world, tree.root);
        if (root_gone) {
            tree.root = choose_access_node(world, tree.region_id);
            grow(tree, world, graph);
        } else {
            // Only rebuild the tree body when a death broke one of its edges.
            bool broken = false;
            for (const auto& [c, p] : tree.parent) {
                if (!alive(world, c) || !alive(world, p)) {
                    broken = true;
                    break;
                }
            }
            if (broken) grow(tree, world, graph);
        }
        set_uplink(tree, world, graph);
    }

    const bool changed = tree.edges() != before;
    if (changed) ++tree.version;
    return changed;
}

}  // namespace msssn::sensor
