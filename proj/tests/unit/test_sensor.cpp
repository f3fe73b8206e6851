#include <deque>
#include <map>

#include "doctest.h"
#include "msssn/error.hpp"
#include "msssn/sensor/collection_tree.hpp"
#include "msssn/sensor/sensor_plane.hpp"
#include "msssn/sim/rng.hpp"
#include "support/harness.hpp"

using namespace msssn;
using namespace msssn::sensor;
using msssn::testing::make_sensor;
using msssn::testing::make_sink;
using msssn::testing::Net;

namespace {

radio::MacConfig unphased() {
    radio::MacConfig m;
    m.phased = false;
    return m;
}

// Hop distance from root over alive same-region sensors within range.
std::map<NodeId, int> oracle_bfs(const World& w, NodeId root) {
    std::map<NodeId, int> d{{root, 0}};
    std::deque<NodeId> q{root};
    const auto& ss = w.sensors();
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop_front();
        for (const auto& v : ss) {
            if (!v.alive || v.region_id != ss[static_cast<std::size_t>(u)].region_id || d.contains(v.id)) continue;
            if (distance(v.pos, ss[static_cast<std::size_t>(u)].pos) <= 15.0) {
                d[v.id] = d[u] + 1;
                q.push_back(v.id);
            }
        }
    }
    return d;
}

// Every attached node reaches the root by following parents, without revisiting.
bool acyclic_and_rooted(const CollectionTree& t) {
    for (const auto& [v, dep] : t.depth) {
        NodeId cur = v;
        int steps = 0;
        while (cur != t.root) {
            cur = t.next_hop(cur);
            if (cur < 0 || ++steps > static_cast<int>(t.depth.size())) return false;
        }
        if (steps != dep) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("sensing disk is closed") {
    Net net({0, 0, 100, 100}, {make_sensor(0, {50, 50})}, {make_sink(0, {50, 55})});
    SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, {});
    CHECK(plane.generate_report(0, {60, 50}, 1.0).has_value());
    CHECK_FALSE(plane.generate_report(0, {60 + 1e-9, 50}, 1.0).has_value());
    net.kill_sensor(0);
    CHECK_THROWS_AS(plane.generate_report(0, {50, 50}, 1.0), NodeDead);
    CHECK(net.log.generated.size() == 1);
}

TEST_CASE("tree shapes") {
    SUBCASE("single sensor") {
        Net net({0, 0, 100, 100}, {make_sensor(0, {50, 50})}, {make_sink(0, {52, 50})});
        RegionGraph g(net.world);
        const auto t = build_collection_tree(net.world, g, 0, TreeStrategy::sink_rooted, {52, 50});
        CHECK(t.root == 0);
        CHECK(t.parent.empty());
        CHECK(t.edges().empty());
    }
    SUBCASE("line topology") {
        Net net({0, 0, 100, 100}, {make_sensor(0, {10, 50}), make_sensor(1, {20, 50}), make_sensor(2, {30, 50})},
                {make_sink(0, {5, 50})});
        RegionGraph g(net.world);
        const auto t = build_collection_tree(net.world, g, 0, TreeStrategy::sink_rooted, {5, 50});
        CHECK(t.root == 0);
        CHECK(t.next_hop(1) == 0);
        CHECK(t.next_hop(2) == 1);
        CHECK(t.sensor_hops(2) == 2);
    }
    SUBCASE("equal-energy access nodes") {
        Net net({0, 0, 100, 100}, {make_sensor(0, {10, 50}, 0.5), make_sensor(1, {20, 50}, 0.9),
                                   make_sensor(2, {30, 50}, 0.9)},
                {make_sink(0, {5, 50})});
        RegionGraph g(net.world);
        const auto t = build_collection_tree(net.world, g, 0, TreeStrategy::access_node_rooted, {5, 50});
        CHECK(t.root == 1);
        CHECK(t.proxy == 0);
        CHECK(t.uplink == std::vector<NodeId>{1, 0});
        CHECK(t.has_sink_path());
    }
    SUBCASE("empty region") {
        Net net({0, 0, 100, 100}, {make_sensor(0, {10, 10})}, {make_sink(0, {25, 25}), make_sink(1, {75, 75})});
        RegionGraph g(net.world);
        CHECK_THROWS_AS(build_collection_tree(net.world, g, 1, TreeStrategy::sink_rooted, {75, 25}), EmptyRegion);
        CHECK(build_collection_tree_or_empty(net.world, g, 1, TreeStrategy::sink_rooted, {75, 25}).empty());
    }
}

TEST_CASE("one relay plus the sink hop: two airtimes and one retune") {
    Net net({0, 0, 100, 100}, {make_sensor(0, {10, 50}), make_sensor(1, {20, 50})}, {make_sink(0, {5, 50})}, 10.0,
            unphased());
    SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, {});
    plane.maintain_all();
    net.sim.schedule(1.0, "sense", [&] { plane.generate_report(1, {20, 50}, 3.0); });
    net.sim.run_until(5.0);
    REQUIRE(net.log.deliveries.size() == 1);
    const auto& d = net.log.deliveries[0];
    CHECK(d.hops == 2);
    const double bits = plane.config().report_bits;
    // Proxy 0 must retune 6 -> 1 before the final hop.
    CHECK(d.t_delivered - d.t_created == doctest::Approx(2 * bits / 2e6 + 224e-6).epsilon(1e-9));
}

TEST_CASE("detached source drops") {
    Net net({0, 0, 100, 100}, {make_sensor(0, {10, 50}), make_sensor(1, {45, 50})}, {make_sink(0, {5, 50})});
    SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, {});
    plane.maintain_all();
    CHECK(plane.tree(0).detached.contains(1));
    plane.generate_report(1, {45, 50}, 0.0);
    net.sim.run_until(1.0);
    REQUIRE(net.log.drops.size() == 1);
    CHECK(net.log.drops[0].reason == metrics::DropReason::detached);
}

TEST_CASE("dead parent exhausts retries") {
    Net net({0, 0, 100, 100}, {make_sensor(0, {10, 50}), make_sensor(1, {20, 50}), make_sensor(2, {30, 50})},
            {make_sink(0, {5, 50})});
    SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, {});
    plane.maintain_all();
    net.kill_sensor(1);
    plane.generate_report(2, {30, 50}, 0.0);
    net.sim.run_until(2.0);
    REQUIRE(net.log.drops.size() == 1);
    CHECK(net.log.drops[0].reason == metrics::DropReason::retries_exhausted);
    CHECK(net.log.drops[0].hop_index == 0);
    // One attempt plus two retries, each paid by the sender.
    int tx = 0;
    for (const auto& dr : net.log.drains) tx += dr.node == 2 && dr.reason == metrics::DrainReason::tx;
    CHECK(tx == 3);
}

TEST_CASE("maintenance versions") {
    std::vector<SensorNode> ss;
    for (int i = 0; i < 5; ++i) ss.push_back(make_sensor(i, {10.0 + 10 * i, 50}, 1.0 - 0.1 * i));
    SUBCASE("sink_rooted") {
        Net net({0, 0, 100, 100}, ss, {make_sink(0, {5, 50})});
        RegionGraph g(net.world);
        auto t = build_collection_tree(net.world, g, 0, TreeStrategy::sink_rooted, {5, 50});
        const auto v0 = t.version;
        CHECK_FALSE(maintain_tree(t, net.world, g, {5, 50}));
        CHECK(t.version == v0);
        CHECK(maintain_tree(t, net.world, g, {55, 50}));
        CHECK(t.version == v0 + 1);
        CHECK(t.root == 4);
    }
    SUBCASE("access node dies") {
        Net net({0, 0, 100, 100}, ss, {make_sink(0, {5, 50})});
        RegionGraph g(net.world);
        auto t = build_collection_tree(net.world, g, 0, TreeStrategy::access_node_rooted, {5, 50});
        CHECK(t.root == 0);
        net.world.sensors()[4].alive = false;  // unrelated leaf death: tree edge broken, root kept
        CHECK(maintain_tree(t, net.world, g, {5, 50}));
        CHECK(t.root == 0);
        net.world.sensors()[0].alive = false;
        const auto v = t.version;
        CHECK(maintain_tree(t, net.world, g, {5, 50}));
        CHECK(t.version == v + 1);
        CHECK(t.root == 1);  // max residual energy among survivors
        CHECK(t.proxy == 1);
    }
}

TEST_CASE("random regions: trees match an independent BFS and delivered hops equal depth + 1") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        sim::RngStream rng(seed, "test/sensor");
        std::vector<SensorNode> ss;
        for (int i = 0; i < 80; ++i) ss.push_back(make_sensor(i, {rng.uniform(0, 100), rng.uniform(0, 100)}));
        std::vector<SinkNode> sinks;
        for (int k = 0; k < 4; ++k) sinks.push_back(make_sink(k, {25.0 + 50 * (k % 2), 25.0 + 50 * (k / 2)}));
        Net net({0, 0, 100, 100}, ss, sinks, 300.0);
        SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, {});
        plane.maintain_all();

        bool foreign_relay = false;
        plane.set_relay_observer([&](const DataReport& r, NodeId relay) {
            foreign_relay |= net.world.sensors()[static_cast<std::size_t>(relay)].region_id != r.region_id;
        });
        std::map<NodeId, int> expected_hops;
        for (RegionId r = 0; r < 4; ++r) {
            const auto& t = plane.tree(r);
            if (t.root < 0) continue;
            CHECK(acyclic_and_rooted(t));
            const auto d = oracle_bfs(net.world, t.root);
            CHECK(d == t.depth);
            for (const auto& [v, dep] : d) expected_hops[v] = dep + 1;
        }
        // Spread the reports out so contention stays low.
        for (int i = 0; i < 80; ++i) {
            net.sim.schedule(1.0 + 0.5 * i, "sense", [&, i] {
                plane.generate_report(i, net.world.sensors()[static_cast<std::size_t>(i)].pos, 1.0);
            });
        }
        net.sim.run_until(100.0);
        CHECK_FALSE(foreign_relay);
        CHECK(net.log.deliveries.size() > 0);
        for (const auto& del : net.log.deliveries) CHECK(del.hops == expected_hops.at(del.source));
        CHECK(net.log.deliveries.size() + net.log.drops.size() <= net.log.generated.size());
    }
}

TEST_CASE("route transitions equal version bumps under sink motion") {
    sim::RngStream rng(3, "test/motion");
    std::vector<SensorNode> ss;
    for (int i = 0; i < 60; ++i) ss.push_back(make_sensor(i, {rng.uniform(0, 100), rng.uniform(0, 100)}));
    Net net({0, 0, 100, 100}, ss, {make_sink(0, {0, 0})}, 200.0);
    SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, {});
    for (int step = 0; step < 100; ++step) {
        net.sim.schedule(step, "move", [&, step] {
            net.move_sink(0, {double(step), 50 + 30 * std::sin(step * 0.2)});
            plane.maintain(0);
        });
    }
    net.sim.run_until(101.0);
    CHECK(static_cast<std::int64_t>(net.log.tree_versions.size()) == plane.tree(0).version);
    CHECK(plane.tree(0).version > 5);
}

TEST_CASE("reports wait for a sink and the buffer drops oldest first") {
    std::vector<SensorNode> ss{make_sensor(0, {90, 90}), make_sensor(1, {80, 90})};
    Net net({0, 0, 100, 100}, ss, {make_sink(0, {0, 0})}, 50.0);
    SensorPlaneConfig cfg;
    cfg.buffer_capacity = 3;
    SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, cfg);
    plane.maintain_all();
    CHECK_FALSE(plane.tree(0).has_sink_path());
    for (int i = 0; i < 5; ++i) plane.generate_report(1, {80, 90}, i);
    CHECK(plane.buffered(1) == 3);
    REQUIRE(net.log.drops.size() == 2);
    CHECK(net.log.drops[0].report_id == 0);
    CHECK(net.log.drops[1].report_id == 1);
    CHECK(net.log.drops[0].reason == metrics::DropReason::buffer_overflow);
    net.sim.schedule(1.0, "arrive", [&] {
        net.move_sink(0, {95, 95});
        plane.maintain(0);
    });
    net.sim.run_until(5.0);
    CHECK(plane.buffered(1) == 0);
    CHECK(net.log.deliveries.size() == 3);
}

TEST_CASE("wired proxy makes the last hop free") {
    Net net({0, 0, 100, 100}, {make_sensor(0, {10, 50})}, {make_sink(0, {5, 50})});
    SensorPlaneConfig cfg;
    cfg.proxy_wired = true;
    SensorPlane plane(net.sim, net.world, net.medium, net.link, net.plan, net.log, cfg);
    plane.maintain_all();
    plane.generate_report(0, {10, 50}, 0.0);
    net.sim.run_until(1.0);
    CHECK(net.log.deliveries.size() == 1);
    CHECK(net.log.drains.empty());
}
