#include "doctest.h"

#include "evcoord/errors.hpp"
#include "evcoord/rng.hpp"
#include "evcoord/station.hpp"

using namespace evcoord;

namespace {

ForecastModel toy_model(std::initializer_list<double> bin_values,
                        double bin_width = 10.0) {
    ForecastModel m(bin_width, bin_width * bin_values.size());
    int bin = 0;
    for (double v : bin_values) {
        if (v > 0)
            m.record({bin * bin_width + bin_width / 2.0, v, 0, "T"});
        ++bin;
    }
    m.set_phase(StationPhase::Nominal);
    return m;
}

}  // namespace

TEST_CASE("nearby waiting time compares the best port with the arrival") {
    PortSchedule sched(2);
    REQUIRE(sched.assign_port(70.0, true, 30.0).has_value());   // port 0 -> 100
    REQUIRE(sched.assign_port(100.0, true, 20.0).has_value());  // port 1 -> 120
    CHECK(sched.available_from(0) == 100.0);
    CHECK(sched.available_from(1) == 120.0);
    CHECK(sched.nearby_waiting_time(90.0) == 10.0);
}

TEST_CASE("a free port means zero waiting") {
    PortSchedule sched(3);
    REQUIRE(sched.assign_port(0.0, true, 400.0).has_value());
    CHECK(sched.nearby_waiting_time(10.0) == 0.0);  // two ports still free
}

TEST_CASE("boundary equality waits zero") {
    PortSchedule sched(1);
    REQUIRE(sched.assign_port(20.0, true, 30.0).has_value());  // available at 50
    CHECK(sched.nearby_waiting_time(50.0) == 0.0);
}

TEST_CASE("committing books the best port from arrival plus wait") {
    PortSchedule sched(2);
    sched.assign_port(70.0, true, 30.0);   // port 0 -> 100
    sched.assign_port(100.0, true, 20.0);  // port 1 -> 120
    const auto port = sched.assign_port(90.0, true, 30.0);
    REQUIRE(port.has_value());
    CHECK(*port == 0);
    CHECK(sched.available_from(0) == 130.0);  // 90 + 10 wait + 30 charge
    CHECK(sched.available_from(1) == 120.0);
}

TEST_CASE("declining leaves the schedule untouched") {
    PortSchedule sched(2);
    sched.assign_port(70.0, true, 30.0);
    const double before0 = sched.available_from(0);
    const double before1 = sched.available_from(1);
    CHECK_FALSE(sched.assign_port(90.0, false, 55.0).has_value());
    CHECK(sched.available_from(0) == before0);
    CHECK(sched.available_from(1) == before1);
}

TEST_CASE("availability ties resolve to the lowest port index") {
    PortSchedule sched(2, 100.0);
    const auto port = sched.assign_port(100.0, true, 10.0);
    REQUIRE(port.has_value());
    CHECK(*port == 0);
}

TEST_CASE("schedule times never decrease") {
    PortSchedule sched(2);
    SplitMix64 rng(5);
    double prev_wait = sched.nearby_waiting_time(50.0);
    for (int i = 0; i < 200; ++i) {
        sched.assign_port(50.0, true, rng.uniform(1.0, 30.0));
        const double now = sched.nearby_waiting_time(50.0);
        CHECK(now >= prev_wait);
        prev_wait = now;
    }
}

TEST_CASE("empty model reads zero everywhere") {
    ForecastModel m(5.0, 1440.0);
    CHECK(m.lookup(0.0) == 0.0);
    CHECK(m.lookup(1000.0) == 0.0);
    m.set_phase(StationPhase::Nominal);
    CHECK(max_waiting_since(m, 0.0) == 0.0);
    CHECK(window_waiting_estimate(m, 100.0, 300.0) == 0.0);
}

TEST_CASE("max waiting time is the periodic maximum") {
    const ForecastModel m = toy_model({5.0, 10.0, 7.0});
    CHECK(max_waiting_since(m, 0.0) == 10.0);
    CHECK(max_waiting_since(m, 25.0) == 10.0);
    CHECK(max_waiting_since(m, 1e6) == 10.0);
}

TEST_CASE("a single nonzero bin dominates every query") {
    ForecastModel m(5.0, 1440.0);
    m.record({300.0, 42.0, 0, "T"});
    m.set_phase(StationPhase::Nominal);
    CHECK(max_waiting_since(m, 0.0) == 42.0);
    CHECK(max_waiting_since(m, 1200.0) == 42.0);
}

TEST_CASE("window average of a constant model is that constant") {
    ForecastModel m(10.0, 30.0);
    for (double t : {5.0, 15.0, 25.0}) m.record({t, 6.0, 0, "T"});
    m.set_phase(StationPhase::Nominal);
    CHECK(window_waiting_estimate(m, 3.0, 11.0) == doctest::Approx(6.0));
    CHECK(window_waiting_estimate(m, 0.0, 30.0) == doctest::Approx(6.0));
    CHECK(window_waiting_estimate(m, 12.0, 95.0) == doctest::Approx(6.0));
}

TEST_CASE("window covering exactly one bin reads that bin") {
    const ForecastModel m = toy_model({0.0, 10.0});
    CHECK(window_waiting_estimate(m, 10.0, 20.0) == doctest::Approx(10.0));
}

TEST_CASE("window spanning two bins equally averages them") {
    const ForecastModel m = toy_model({0.0, 10.0});
    CHECK(window_waiting_estimate(m, 5.0, 15.0) == doctest::Approx(5.0));
}

TEST_CASE("degenerate window reads the point value") {
    const ForecastModel m = toy_model({3.0, 9.0});
    CHECK(window_waiting_estimate(m, 12.0, 12.0) == doctest::Approx(9.0));
}

TEST_CASE("window bounds sit between the covered bins") {
    ForecastModel m(5.0, 1440.0);
    SplitMix64 rng(77);
    for (int i = 0; i < 500; ++i)
        m.record({rng.uniform(0.0, 1440.0), rng.uniform(0.0, 60.0), 0, "T"});
    m.set_phase(StationPhase::Nominal);
    double lo_bin = 1e9, hi_bin = -1e9;
    for (int b = 0; b < m.bin_count(); ++b) {
        lo_bin = std::min(lo_bin, m.bin_mean(b));
        hi_bin = std::max(hi_bin, m.bin_mean(b));
    }
    for (int i = 0; i < 200; ++i) {
        const double lo = rng.uniform(0.0, 2000.0);
        const double hi = lo + rng.uniform(0.0, 2000.0);
        const double est = window_waiting_estimate(m, lo, hi);
        REQUIRE(est >= lo_bin - 1e-9);
        REQUIRE(est <= hi_bin + 1e-9);
        REQUIRE(max_waiting_since(m, lo) >= est - 1e-9);
    }
}

TEST_CASE("window averages agree with numeric integration") {
    ForecastModel m(5.0, 1440.0);
    SplitMix64 rng(404);
    for (int i = 0; i < 400; ++i)
        m.record({rng.uniform(0.0, 1440.0), rng.uniform(0.0, 45.0), 0, "T"});
    m.set_phase(StationPhase::Nominal);
    for (int i = 0; i < 100; ++i) {
        const double lo = rng.uniform(0.0, 3000.0);
        const double hi = lo + rng.uniform(0.1, 4000.0);
        const int steps = 200000;
        const double dt = (hi - lo) / steps;
        double integral = 0.0;
        for (int k = 0; k < steps; ++k)
            integral += m.lookup(lo + (k + 0.5) * dt) * dt;
        const double expected = integral / (hi - lo);
        REQUIRE(window_waiting_estimate(m, lo, hi) ==
                doctest::Approx(expected).epsilon(5e-3));
    }
}

TEST_CASE("recording averages within a bin and preserves the others") {
    ForecastModel m(5.0, 1440.0);
    m.record({7 * 60 + 2.0, 10.0, 0, "T1"});  // 07:02
    m.record({7 * 60 + 3.0, 20.0, 1, "T2"});  // 07:03
    CHECK(m.lookup(7 * 60 + 1.0) == doctest::Approx(15.0));
    for (int b = 0; b < m.bin_count(); ++b) {
        if (b == (7 * 60) / 5) continue;
        CHECK(m.bin_mean(b) == 0.0);
        CHECK(m.bin_observations(b) == 0);
    }
}

TEST_CASE("collection phase answers zero to distant queries") {
    ForecastModel m(5.0, 1440.0);
    m.record({430.0, 25.0, 0, "T"});
    REQUIRE(m.phase() == StationPhase::Collection);
    CHECK(max_waiting_since(m, 0.0) == 0.0);
    CHECK(window_waiting_estimate(m, 0.0, 500.0) == 0.0);
}

TEST_CASE("nominal phase delegates the two protocol rounds to the model") {
    const ForecastModel m = toy_model({5.0, 10.0, 7.0});
    CHECK(max_waiting_since(m, 4.0) == 10.0);                      // round 1
    CHECK(window_waiting_estimate(m, 12.0, 12.0) ==
          doctest::Approx(10.0));                                  // round 2
}

TEST_CASE("an inverted window is a protocol error") {
    const ForecastModel m = toy_model({1.0});
    CHECK_THROWS_AS(window_waiting_estimate(m, 10.0, 5.0), ValidationError);
}

TEST_CASE("learning stops when the model is frozen") {
    ForecastModel m(5.0, 1440.0);
    m.record({100.0, 10.0, 0, "T"});
    m.set_phase(StationPhase::Nominal);
    m.record({100.0, 50.0, 0, "T"});  // ignored by default
    CHECK(m.lookup(100.0) == doctest::Approx(10.0));
    m.set_learn_in_nominal(true);
    m.record({100.0, 50.0, 0, "T"});
    CHECK(m.lookup(100.0) == doctest::Approx(30.0));
}

TEST_CASE("identical observation streams build identical models") {
    SplitMix64 rng(31);
    std::vector<WaitObservation> stream;
    for (int i = 0; i < 300; ++i)
        stream.push_back({rng.uniform(0.0, 1440.0), rng.uniform(0.0, 90.0),
                          static_cast<int>(rng.uniform_int(0, 3)), "T"});
    ForecastModel a(5.0, 1440.0), b(5.0, 1440.0);
    for (const auto& obs : stream) {
        a.record(obs);
        b.record(obs);
    }
    for (int bin = 0; bin < a.bin_count(); ++bin) {
        CHECK(a.bin_mean(bin) == b.bin_mean(bin));
        CHECK(a.bin_observations(bin) == b.bin_observations(bin));
    }
}

TEST_CASE("bin width must divide the day") {
    CHECK_THROWS_AS(ForecastModel(7.0, 1440.0), ValidationError);
}
