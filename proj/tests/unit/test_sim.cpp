#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "msssn/error.hpp"
#include "msssn/sim/rng.hpp"
#include "msssn/sim/simulator.hpp"

using msssn::sim::RngFactory;
using msssn::sim::RngStream;
using msssn::sim::Simulator;

TEST_CASE("events pop by time") {
    Simulator sim;
    std::string order;
    sim.schedule(5.0, "a", [&] { order += 'A'; });
    sim.schedule(3.0, "b", [&] { order += 'B'; });
    sim.run_until(10.0);
    CHECK(order == "BA");
}

TEST_CASE("equal times pop in scheduling order") {
    Simulator sim;
    std::string order;
    sim.schedule(2.0, "a", [&] { order += 'A'; });
    sim.schedule(2.0, "b", [&] { order += 'B'; });
    sim.run_until(10.0);
    CHECK(order == "AB");
}

TEST_CASE("scheduling in the past is rejected") {
    Simulator sim;
    sim.schedule(4.0, "x", [] {});
    sim.run_until(4.0);
    CHECK_THROWS_AS(sim.schedule(3.0, "late", [] {}), msssn::SchedulingInPast);
    CHECK_NOTHROW(sim.schedule(4.0, "now", [] {}));
}

TEST_CASE("run_until stops at the horizon") {
    Simulator sim;
    for (double t : {1.0, 2.0, 9.0}) sim.schedule(t, "e", [] {});
    const auto s = sim.run_until(5.0);
    CHECK(s.events_processed == 2);
    CHECK(s.final_clock == 5.0);
    CHECK(sim.pending() == 1);

    Simulator empty;
    CHECK(empty.run_until(10.0).events_processed == 0);
}

TEST_CASE("cancelled events never run") {
    Simulator sim;
    int hits = 0;
    const auto id = sim.schedule(1.0, "x", [&] { ++hits; });
    sim.schedule(2.0, "y", [&] { ++hits; });
    sim.cancel(id);
    sim.run_until(3.0);
    CHECK(hits == 1);
    sim.cancel(id);  // no-op
}

TEST_CASE("events scheduled from inside handlers keep order") {
    Simulator sim;
    std::vector<double> seen;
    sim.schedule(1.0, "p", [&] {
        seen.push_back(sim.now());
        sim.schedule_in(0.0, "child", [&] { seen.push_back(sim.now() + 100); });
        sim.schedule_in(0.5, "later", [&] { seen.push_back(sim.now()); });
    });
    sim.schedule(1.0, "q", [&] { seen.push_back(-1.0); });
    sim.run_until(5.0);
    CHECK(seen == std::vector<double>{1.0, -1.0, 101.0, 1.5});
}

namespace {

std::string traced_run(std::uint64_t seed) {
    Simulator sim;
    std::ostringstream out;
    sim.set_trace(&out);
    RngStream rng(seed, "test/trace");
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(0.0, 50.0);
        sim.schedule(t, "tick", [] {}, {i, i + 1});
    }
    sim.run_until(60.0);
    return out.str();
}

}  // namespace

TEST_CASE("identical seeds give byte-identical traces") {
    const auto a = traced_run(7);
    const auto b = traced_run(7);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a != traced_run(8));
}

TEST_CASE("int_below bounds") {
    RngStream r(1, "x");
    for (int i = 0; i < 100; ++i) CHECK(r.int_below(1) == 0);
    CHECK_THROWS_AS(r.int_below(0), msssn::InvalidBound);
    CHECK_THROWS_AS(r.int_below(-3), msssn::InvalidBound);
}

TEST_CASE("uniform01 stays in [0,1)") {
    RngStream r(3, "u");
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("gaussian sample mean") {
    RngStream r(11, "g");
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += r.gaussian(0.0, 1.0);
    CHECK(std::abs(sum / n) < 0.02);
}

TEST_CASE("labelled streams are independent") {
    RngFactory f(42);
    auto y1 = f.stream("Y");
    std::vector<double> solo;
    for (int i = 0; i < 50; ++i) solo.push_back(y1.uniform01());

    auto x = f.stream("X");
    auto y2 = f.stream("Y");
    std::vector<double> mixed;
    for (int i = 0; i < 50; ++i) {
        x.uniform01();
        x.gaussian(0, 1);
        mixed.push_back(y2.uniform01());
    }
    CHECK(solo == mixed);
    CHECK(msssn::sim::derive_seed(42, "X") != msssn::sim::derive_seed(42, "Y"));
    CHECK(msssn::sim::derive_seed(42, "X") != msssn::sim::derive_seed(43, "X"));
}
