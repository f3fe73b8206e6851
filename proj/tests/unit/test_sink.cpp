#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "msssn/error.hpp"
#include "msssn/sink/aggregate.hpp"
#include "msssn/sink/broadcast.hpp"
#include "msssn/sink/hotspot.hpp"
#include "msssn/sink/sink_plane.hpp"
#include "msssn/sink/takeover.hpp"
#include "msssn/sink/transport.hpp"
#include "support/harness.hpp"

using namespace msssn;
using namespace msssn::sink;
using msssn::testing::make_sink;

namespace {

std::vector<SinkNode> chain(int n, double spacing, double range) {
    std::vector<SinkNode> s;
    for (int i = 0; i < n; ++i) s.push_back(make_sink(i, {spacing * i, 0}, range));
    return s;
}

// Four sinks at the centroids of a 2 x 2 grid; range 60 links the sides
// but not the diagonals.
World square_world(double range = 60) {
    World w({0, 0, 100, 100}, EnergyModel{});
    w.set_sinks({make_sink(0, {25, 25}, range), make_sink(1, {75, 25}, range), make_sink(2, {25, 75}, range),
                 make_sink(3, {75, 75}, range)});
    w.partition_and_assign();
    return w;
}

double lens_uncovered_fraction(double r, double d) {
    if (d >= 2 * r) return 1.0;
    const double lens = 2 * r * r * std::acos(d / (2 * r)) - 0.5 * d * std::sqrt(4 * r * r - d * d);
    return 1.0 - lens / (std::numbers::pi * r * r);
}

}  // namespace

TEST_CASE("strategy parsing round-trips and validates") {
    CHECK(BroadcastStrategy::parse("flood").kind == StrategyKind::flood);
    CHECK(BroadcastStrategy::parse(" Probabilistic:0.7 ").p == doctest::Approx(0.7));
    CHECK(BroadcastStrategy::parse("counter:3").k == 3);
    CHECK(BroadcastStrategy::parse("location:0.4").theta == doctest::Approx(0.4));
    CHECK(BroadcastStrategy::parse("counter:2").describe() == "counter:2");
    CHECK_THROWS_AS(BroadcastStrategy::parse("gossip"), InvalidArgument);
    CHECK_THROWS_AS(BroadcastStrategy::parse("probabilistic:1.5"), InvalidArgument);
    CHECK_THROWS_AS(BroadcastStrategy::parse("counter:0"), InvalidArgument);
    CHECK_THROWS_AS(BroadcastStrategy::parse("location:x"), InvalidArgument);
}

TEST_CASE("additional coverage matches the circle-lens area") {
    CHECK(additional_coverage({0, 0}, 10, {}) == doctest::Approx(1.0));
    CHECK(additional_coverage({0, 0}, 10, {{0, 0}}) == doctest::Approx(0.0));
    for (double d : {2.0, 5.0, 10.0, 15.0, 19.0, 25.0}) {
        CAPTURE(d);
        CHECK(additional_coverage({d, 0}, 10, {{0, 0}}) == doctest::Approx(lens_uncovered_fraction(10, d)).epsilon(0.02));
    }
}

TEST_CASE("flooding a chain reaches everyone with one send each") {
    const auto sinks = chain(6, 100, 120);
    const auto out = run_broadcast(sinks, 2, BroadcastStrategy::flood(), 1);
    CHECK(out.reached.size() == 6);
    CHECK(out.transmissions == 6);
    const auto p1 = run_broadcast(sinks, 2, BroadcastStrategy::probabilistic(1.0), 1);
    CHECK(p1.reached == out.reached);
    CHECK(p1.transmissions == out.transmissions);
}

TEST_CASE("probability zero stops after the origin's own send") {
    const auto out = run_broadcast(chain(6, 100, 120), 0, BroadcastStrategy::probabilistic(0.0), 1);
    CHECK(out.transmissions == 1);
    CHECK(out.reached == std::set<NodeId>{0, 1});
}

TEST_CASE("counter and location suppress on a dense clique") {
    // Eight sinks all within range of each other.
    std::vector<SinkNode> clique;
    for (int i = 0; i < 8; ++i) clique.push_back(make_sink(i, {10.0 * i, 5.0 * (i % 2)}, 375));
    const auto flood = run_broadcast(clique, 0, BroadcastStrategy::flood(), 3);
    const auto counter = run_broadcast(clique, 0, BroadcastStrategy::counter(1), 3);
    const auto loc = run_broadcast(clique, 0, BroadcastStrategy::location(0.5), 3);
    CHECK(flood.transmissions == 8);
    for (const auto* o : {&counter, &loc}) {
        CHECK(o->reached.size() == 8);
        CHECK(o->transmissions < flood.transmissions);
    }
    // With a generous k the counter scheme degenerates to flooding.
    CHECK(run_broadcast(clique, 0, BroadcastStrategy::counter(100), 3).transmissions == 8);
}

TEST_CASE("broadcast outcomes are reproducible per seed") {
    std::vector<SinkNode> sinks;
    msssn::sim::RngStream rng(5, "layout");
    for (int i = 0; i < 10; ++i) sinks.push_back(make_sink(i, {rng.uniform(0, 600), rng.uniform(0, 600)}, 250));
    const auto s = BroadcastStrategy::probabilistic(0.6);
    const auto a = run_broadcast(sinks, 0, s, 42);
    const auto b = run_broadcast(sinks, 0, s, 42);
    CHECK(a.reached == b.reached);
    CHECK(a.transmissions == b.transmissions);
}

TEST_CASE("dead origin cannot broadcast") {
    auto sinks = chain(3, 100, 120);
    sinks[1].alive = false;
    CHECK_THROWS_AS(run_broadcast(sinks, 1, BroadcastStrategy::flood(), 1), NodeDead);
    // A dead relay cuts the chain.
    CHECK(run_broadcast(sinks, 0, BroadcastStrategy::flood(), 1).reached == std::set<NodeId>{0});
}

TEST_CASE("aggregate windows are half-open") {
    const std::vector<ReadingSample> s{{0.0, 1.0}, {5.0, 2.0}, {9.999, 3.0}, {10.0, 100.0}};
    const auto a = aggregate_window(4, 2, s, 0, 10);
    CHECK(a.report_count == 3);
    CHECK(a.has_mean);
    CHECK(a.mean == doctest::Approx(2.0));
    CHECK(a.producing_sink == 4);
    CHECK(a.region_id == 2);
    const auto empty = aggregate_window(4, 2, s, 20, 30);
    CHECK(empty.report_count == 0);
    CHECK_FALSE(empty.has_mean);
    CHECK_THROWS_AS(aggregate_window(0, 0, s, 5, 5), InvalidArgument);
}

TEST_CASE("takeover picks the alive sink nearest the orphaned centroid") {
    auto w = square_world();
    const RegionId r0 = w.sinks()[0].home_region_id;
    // Sinks 1 and 2 are equidistant from region 0's centroid; the lower id wins.
    CHECK(choose_takeover_sink(w, r0, 0) == 1);
    w.sinks()[1].pos = {90, 90};
    CHECK(choose_takeover_sink(w, r0, 0) == 2);
    w.sinks()[0].alive = false;
    const auto moves = takeover(w, 0);
    REQUIRE(moves.size() == 1);
    CHECK(moves[0] == std::pair<RegionId, NodeId>{r0, 2});
    CHECK(w.sinks()[0].covered_regions.empty());
    CHECK(w.sinks()[2].covered_regions.count(r0) == 1);
    CHECK(w.covering_sinks(r0) == std::vector<NodeId>{2});
    for (auto& s : w.sinks()) s.alive = false;
    CHECK_THROWS_AS(choose_takeover_sink(w, r0), NoSinkAvailable);
}

TEST_CASE("a falsely suspected sink shares its region") {
    auto w = square_world();
    const RegionId r0 = w.sinks()[0].home_region_id;
    takeover(w, 0);
    CHECK(w.sinks()[0].covered_regions.count(r0) == 1);
    CHECK(w.covering_sinks(r0).size() == 2);
}

TEST_CASE("failure detector declares after the missed-heartbeat window") {
    FailureDetector fd(3, 1.0, 3);
    const std::vector<bool> all{true, true, true};
    for (int t = 1; t <= 5; ++t) {
        for (NodeId a = 0; a < 3; ++a) {
            for (NodeId b = 0; b < 3; ++b) {
                if (a != b) fd.heard(a, b, t);
            }
        }
    }
    CHECK(fd.check(7.9, all).empty());
    // Sink 2 stops at t = 5; peers keep hearing each other.
    for (int t = 6; t <= 9; ++t) {
        fd.heard(0, 1, t);
        fd.heard(1, 0, t);
    }
    CHECK(fd.check(8.0, all).empty());
    CHECK(fd.check(8.01, all) == std::vector<NodeId>{2});
    CHECK(fd.declared(2));
    CHECK(fd.check(20, all) == std::vector<NodeId>{0, 1});
    CHECK_THROWS_AS(FailureDetector(3, 0.0, 3), InvalidArgument);
    CHECK_THROWS_AS(FailureDetector(3, 1.0, 0), InvalidArgument);
}

TEST_CASE("track fit extrapolates two points five seconds ahead") {
    const std::vector<HotspotObservation> obs{{0, {48, 50}}, {1, {49, 50}}};
    const auto fit = fit_track(obs, 5);
    REQUIRE(fit);
    CHECK(fit->velocity.x == doctest::Approx(1));
    CHECK(fit->velocity.y == doctest::Approx(0));
    const double tau = 5;
    CHECK(fit->at_last.x + fit->velocity.x * tau == doctest::Approx(54));
    CHECK(fit->at_last.y + fit->velocity.y * tau == doctest::Approx(50));
    CHECK_FALSE(fit_track({obs[0]}, 5));
    CHECK_FALSE(fit_track({{1, {0, 0}}, {1, {1, 1}}}, 5));
}

TEST_CASE("least-squares fit matches a closed-form slope on noisy tracks") {
    msssn::sim::RngStream rng(9, "fit");
    std::vector<HotspotObservation> obs;
    for (int i = 0; i < 8; ++i) obs.push_back({double(i), {3.0 + 0.7 * i + rng.uniform(-0.1, 0.1), 2.0 - 0.3 * i}});
    const auto fit = fit_track(obs, 4);
    REQUIRE(fit);
    // Slope over the last four points by the textbook formula.
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (int i = 4; i < 8; ++i) {
        st += obs[i].t;
        sx += obs[i].pos.x;
        stt += obs[i].t * obs[i].t;
        stx += obs[i].t * obs[i].pos.x;
    }
    CHECK(fit->velocity.x == doctest::Approx((4 * stx - st * sx) / (4 * stt - st * st)));
    CHECK(fit->velocity.y == doctest::Approx(-0.3));
}

TEST_CASE("tracker alerts the neighbour region once per cooldown") {
    World w({0, 0, 100, 50}, EnergyModel{});
    w.set_sinks({make_sink(0, {25, 25}), make_sink(1, {75, 25})});
    w.partition_and_assign();
    HotspotConfig cfg;
    cfg.horizon = 5;
    HotspotTracker tr(cfg);
    CHECK_FALSE(tr.observe(w, 1, 0, {48, 50 - 1e-9}));
    const auto alert = tr.observe(w, 1, 1, {49, 50 - 1e-9});
    REQUIRE(alert);
    CHECK(alert->predicted.x == doctest::Approx(54));
    CHECK(alert->from_region == w.region_of({25, 25}));
    CHECK(alert->to_region == w.region_of({75, 25}));
    CHECK_FALSE(tr.observe(w, 1, 2, {49.5, 50 - 1e-9}));  // cooldown
    CHECK(tr.track(1).size() == 3);

    HotspotTracker still(cfg);
    for (int t = 0; t < 50; ++t) CHECK_FALSE(still.observe(w, 7, t, {49, 25}));
}

TEST_CASE("ideal transport respects range and serialises per sender") {
    msssn::sim::Simulator sim;
    auto sinks = chain(3, 100, 120);
    IdealTransport tr(sim, sinks, 1000);
    std::vector<std::pair<NodeId, double>> got;
    tr.set_receive([&](NodeId to, const Packet&, NodeId) { got.push_back({to, sim.now()}); });
    tr.broadcast(1, Packet{100, Heartbeat{1}});
    tr.broadcast(1, Packet{100, Heartbeat{1}});
    bool far_ok = true;
    tr.unicast(0, 2, Packet{100, Heartbeat{0}}, [&](bool ok) { far_ok = ok; });
    sim.run_until(10);
    CHECK(tr.transmissions() == 3);
    REQUIRE(got.size() == 4);
    CHECK(got[0].second == doctest::Approx(0.1));
    CHECK(got[2].second == doctest::Approx(0.2));
    CHECK_FALSE(far_ok);
}

TEST_CASE("queries discover a route and the reply walks it backwards") {
    msssn::sim::Simulator sim;
    auto w = square_world();
    IdealTransport tr(sim, w.sinks(), 2e6);
    metrics::MetricLog log;
    SinkPlaneConfig cfg;
    SinkPlane plane(sim, w, tr, log, cfg, 11);
    plane.start(60);
    const RegionId far = w.sinks()[3].home_region_id;
    sim.schedule(5, "q", [&] { plane.issue_query(0, far); });
    sim.schedule(6, "q", [&] { plane.issue_query(0, w.sinks()[0].home_region_id); });
    std::optional<std::vector<NodeId>> found;
    sim.schedule(7, "d", [&] { plane.discover_route(0, far, [&](auto r) { found = r; }); });
    sim.run_until(60);

    REQUIRE(log.queries.size() == 2);
    CHECK(log.queries[0].success);
    CHECK(log.queries[0].t_answered > 5);
    CHECK(log.queries[1].success);
    CHECK(log.queries[1].t_answered == 6);  // local region answers at once
    REQUIRE(found);
    CHECK(found->size() == 3);
    CHECK(found->front() == 0);
    CHECK(found->back() == 3);
    REQUIRE_FALSE(plane.replies().empty());
    for (const auto& r : plane.replies()) {
        auto rev = r.route;
        std::reverse(rev.begin(), rev.end());
        CHECK(r.traversed == rev);
    }
    // Periodic aggregates reach every peer.
    for (NodeId s = 0; s < 4; ++s) CHECK(plane.latest_aggregate(s, far));
}

TEST_CASE("a dead sink is taken over and its region stays covered") {
    msssn::sim::Simulator sim;
    auto w = square_world();
    IdealTransport tr(sim, w.sinks(), 2e6);
    metrics::MetricLog log;
    SinkPlane plane(sim, w, tr, log, SinkPlaneConfig{}, 4);
    std::vector<std::pair<RegionId, NodeId>> moves;
    plane.set_coverage_hook([&](RegionId r, NodeId s) { moves.push_back({r, s}); });
    plane.start(30);
    const RegionId r3 = w.sinks()[3].home_region_id;
    sim.schedule(10, "kill", [&] { w.sinks()[3].alive = false; });
    sim.run_until(30);
    REQUIRE(moves.size() == 1);
    CHECK(moves[0].first == r3);
    CHECK(moves[0].second == 1);
    CHECK(w.covering_sinks(r3) == std::vector<NodeId>{1});
    CHECK(log.coverage_changes.size() == 1);
    CHECK(log.coverage_changes[0].t <= 10 + 3 * 1.0 + 2.0);
}

TEST_CASE("sink plane config validation") {
    SinkPlaneConfig c;
    CHECK_NOTHROW(c.validate());
    c.heartbeat_period = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    HotspotConfig h;
    h.fit_window = 1;
    CHECK_THROWS_AS(h.validate(), InvalidArgument);
}
