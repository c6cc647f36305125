#include "doctest.h"

#include <cmath>

#include "evcoord/planner.hpp"
#include "evcoord/rng.hpp"
#include "support/instances.hpp"

using namespace evcoord;
using evcoord::testing::random_state;

namespace {

// A hand-sized world with explicit numbers for closed-form checks.
struct World {
    Scenario s;

    World(int stations, double charge_power = 5.0) {
        for (int i = 0; i < stations; ++i) {
            StationSpec st;
            st.id = "S" + std::to_string(i + 1);
            st.port_count = 1;
            st.charge_power = charge_power;
            st.electricity_price = 0.36;
            s.stations.push_back(st);
        }
        TruckSpec t;
        t.id = "T1";
        t.battery_full = 624.0;
        t.battery_initial = 624.0;
        t.safety_margin = 156.0;
        t.consumption_rate = 1.83;
        t.max_charge_power = 350.0 / 60.0;
        t.labor_rate = 2.0;
        t.deadline_penalty_rate = 10.0;
        t.departure_time = 420.0;
        t.deadline = 2000.0;
        s.trucks.push_back(t);
        RouteSpec r;
        r.lead_travel = 60.0;
        for (int i = 0; i < stations; ++i) {
            RouteLeg leg;
            leg.station = i;
            leg.detour = 4.0;
            leg.travel = 100.0;
            r.legs.push_back(leg);
        }
        s.routes.push_back(r);
    }

    TruckState state(int ramp, double arrival, double battery,
                     double deadline = 2000.0) {
        TruckState st;
        st.truck = &s.trucks[0];
        st.route = &s.routes[0];
        st.ramp = ramp;
        st.arrival = arrival;
        st.battery = battery;
        st.deadline = deadline;
        return st;
    }
};

// Small-magnitude world so grid oracles stay tractable.
Scenario tiny_scenario(std::uint64_t seed, int stations) {
    SplitMix64 rng(mix64(seed ^ 0xabcdefULL));
    Scenario s;
    for (int i = 0; i < stations; ++i) {
        StationSpec st;
        st.id = "S" + std::to_string(i + 1);
        st.port_count = 1;
        st.charge_power = rng.uniform(0.8, 1.2);
        st.electricity_price = rng.uniform(0.04, 0.1);
        s.stations.push_back(st);
    }
    TruckSpec t;
    t.id = "T1";
    t.consumption_rate = rng.uniform(0.25, 0.4);
    t.safety_margin = rng.uniform(2.0, 3.0);
    t.max_charge_power = rng.uniform(0.9, 1.3);
    t.labor_rate = rng.uniform(0.04, 0.1);
    t.deadline_penalty_rate = rng.uniform(0.08, 0.2);
    t.departure_time = 0.0;
    RouteSpec r;
    r.lead_travel = rng.uniform(5.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < stations; ++i) {
        RouteLeg leg;
        leg.station = i;
        leg.detour = rng.uniform(0.5, 2.0);
        leg.travel = rng.uniform(5.0, 14.0);
        leg.travel_uncertainty = rng.uniform(0.0, 0.06);
        leg.energy_uncertainty = rng.uniform(0.0, 0.06);
        r.legs.push_back(leg);
        worst = std::max(worst, t.consumption_rate *
                                    (2.0 + leg.travel * 1.06 + 2.0));
    }
    t.battery_full = t.safety_margin + worst + rng.uniform(2.0, 5.0);
    t.battery_initial = t.battery_full;
    t.deadline = 100.0;
    s.trucks.push_back(t);
    s.routes.push_back(r);
    return s;
}

TruckState tiny_state(Scenario& s, std::uint64_t seed) {
    SplitMix64 rng(mix64(seed ^ 0x515151ULL));
    TruckState st;
    st.truck = &s.trucks[0];
    st.route = &s.routes[0];
    st.ramp = 1;
    st.arrival = rng.uniform(0.0, 30.0);
    const double floor = s.trucks[0].safety_margin +
                         s.trucks[0].consumption_rate * s.routes[0].detour(1);
    st.battery = rng.uniform(floor + 1.0, s.trucks[0].battery_full);
    st.deadline = st.arrival + rng.uniform(20.0, 80.0);
    return st;
}

}  // namespace

TEST_CASE("earliest arrival with ample battery is travel minus jitter") {
    World w(2);
    w.s.routes[0].legs[0].travel_uncertainty = 0.05;
    const TruckState st = w.state(1, 500.0, 624.0);
    const auto earliest = earliest_ramp_arrivals(w.s, st);
    REQUIRE(earliest.size() == 1);
    REQUIRE(earliest[0].has_value());
    CHECK(*earliest[0] == doctest::Approx(500.0 + 100.0 - 5.0).epsilon(1e-9));
}

TEST_CASE("earliest arrival with one forced stop matches the closed form") {
    World w(2);
    w.s.routes[0].legs[0].energy_uncertainty = 0.04;
    const double battery = 250.0;
    const TruckState st = w.state(1, 500.0, battery);
    // e2 = e - P(2d + tau) + d2*P*tau + rate*t >= es + P*d2
    const double rate = 5.0;
    const double t_min = (156.0 + 1.83 * 4.0 -
                          (battery - 1.83 * (2 * 4.0 + 100.0) +
                           0.04 * 1.83 * 100.0)) /
                         rate;
    REQUIRE(t_min > 0);
    const auto earliest = earliest_ramp_arrivals(w.s, st);
    REQUIRE(earliest[0].has_value());
    CHECK(*earliest[0] ==
          doctest::Approx(500.0 + 2 * 4.0 + t_min + 100.0).epsilon(1e-9));
}

TEST_CASE("stations beyond full-battery range are reported unreachable") {
    World w(2);
    w.s.routes[0].legs[0].travel = 300.0;  // 549 kWh > usable from full
    const TruckState st = w.state(1, 500.0, 400.0);
    const auto earliest = earliest_ramp_arrivals(w.s, st);
    REQUIRE(earliest.size() == 1);
    CHECK_FALSE(earliest[0].has_value());

    WaitingEstimates est = WaitingEstimates::zeros(2);
    est.reachable[1] = 0;
    CHECK_THROWS_AS(optimize_plan(w.s, st, est), PlanInfeasible);
}

TEST_CASE("earliest arrivals match subset enumeration on random instances") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Scenario s = tiny_scenario(seed, 3);
        TruckState st = tiny_state(s, seed);
        const auto earliest = earliest_ramp_arrivals(s, st);
        for (int target = 2; target <= 3; ++target) {
            const MixedPlanProblem p = make_earliest_problem(s, st, target);
            const MixedPlanSolution grid = brute_force_oracle(p, 0.01);
            REQUIRE(earliest[target - 2].has_value() ==
                    (grid.status == LpStatus::Optimal));
            if (grid.status != LpStatus::Optimal) continue;
            double expected = st.arrival + grid.objective;
            for (int h = 1; h < target; ++h)
                expected += s.routes[0].travel(h) -
                            s.routes[0].travel_uncertainty(h) * s.routes[0].travel(h);
            CHECK(std::abs(*earliest[target - 2] - expected) <= 0.05);
            ++checked;
        }
    }
    CHECK(checked >= 150);
}

TEST_CASE("latest arrival single distant station formula") {
    World w(2);
    w.s.routes[0].legs[0].travel_uncertainty = 0.05;
    const double battery = 400.0;
    const TruckState st = w.state(1, 500.0, battery);
    const double wait_cap[] = {12.0};
    const auto latest = latest_ramp_arrivals(w.s, st, wait_cap, 7.0);
    REQUIRE(latest.size() == 1);
    const double gain = 624.0 - (battery - 1.83 * 4.0);
    CHECK(latest[0] == doctest::Approx(500.0 + 2 * 4.0 + gain / 5.0 + 7.0 +
                                       100.0 + 5.0)
                           .epsilon(1e-9));
}

TEST_CASE("latest arrivals, two segments, hand-computed") {
    World w(3);
    for (RouteLeg& leg : w.s.routes[0].legs) leg.detour = 0.0;
    const TruckState st = w.state(1, 100.0, 624.0);  // full battery
    const double caps[] = {0.0, 0.0};
    const auto latest = latest_ramp_arrivals(w.s, st, caps, 0.0);
    REQUIRE(latest.size() == 2);
    // Full battery and no detours: nothing can be added at station 1; at
    // station 2 the gain is what segment 1 consumed.
    CHECK(latest[0] == doctest::Approx(100.0 + 100.0).epsilon(1e-9));
    CHECK(latest[1] ==
          doctest::Approx(100.0 + 100.0 + 1.83 * 100.0 / 5.0 + 100.0)
              .epsilon(1e-9));
}

TEST_CASE("windows are ordered: earliest never exceeds latest") {
    SplitMix64 rng(2024);
    int produced = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto draw = random_state(seed);
        TruckState st;
        st.truck = &draw.world.scenario.trucks[0];
        st.route = &draw.world.scenario.routes[0];
        st.ramp = draw.ramp;
        st.arrival = draw.arrival;
        st.battery = draw.battery;
        st.deadline = draw.arrival + 1000.0;
        const auto earliest = earliest_ramp_arrivals(draw.world.scenario, st);
        std::vector<double> caps(earliest.size());
        for (double& c : caps) c = rng.uniform(0.0, 30.0);
        const auto latest = latest_ramp_arrivals(draw.world.scenario, st, caps,
                                                 rng.uniform(0.0, 20.0));
        for (std::size_t i = 0; i < earliest.size(); ++i) {
            if (!earliest[i].has_value()) break;
            REQUIRE(latest[i] >= *earliest[i] - 1e-9);
            if (i > 0 && earliest[i - 1].has_value())
                REQUIRE(*earliest[i] >= *earliest[i - 1] - 1e-9);
            REQUIRE(latest[i] >= (i > 0 ? latest[i - 1] : 0.0));
            ++produced;
        }
    }
    CHECK(produced > 1000);
}

TEST_CASE("no charging needed gives the all-zero plan at zero cost") {
    World w(2);
    w.s.routes[0].legs[0].travel = 60.0;
    w.s.routes[0].legs[1].travel = 60.0;
    const TruckState st = w.state(1, 500.0, 624.0);
    const ChargingPlan plan =
        optimize_plan(w.s, st, WaitingEstimates::zeros(2));
    CHECK(plan.charge == std::vector<std::uint8_t>{0, 0});
    CHECK(plan.duration[0] == 0.0);
    CHECK(plan.duration[1] == 0.0);
    CHECK(plan.objective == 0.0);
}

TEST_CASE("single forced stop objective algebra") {
    World w(1);
    const double battery = 300.0;
    const TruckState st = w.state(1, 500.0, battery);
    WaitingEstimates est = WaitingEstimates::zeros(1);
    est.wait[0] = 10.0;
    const ChargingPlan plan = optimize_plan(w.s, st, est);
    REQUIRE(plan.charge[0] == 1);
    const double t_min = (156.0 + 1.83 * (2 * 4.0 + 100.0) - battery) / 5.0;
    const double theta = 0.36 * 5.0;
    CHECK(plan.duration[0] == doctest::Approx(t_min).epsilon(1e-9));
    CHECK(plan.objective ==
          doctest::Approx(2.0 * (2 * 4.0 + t_min + 10.0) + theta * t_min)
              .epsilon(1e-9));
}

TEST_CASE("plans match the grid oracle on small instances") {
    const double step = 0.05;
    int kept = 0;
    std::uint64_t seed = 0;
    while (kept < 40 && seed < 400) {
        Scenario s = tiny_scenario(seed, 3);
        TruckState st = tiny_state(s, seed++);
        WaitingEstimates est = WaitingEstimates::zeros(3);
        SplitMix64 rng(seed * 31 + 7);
        for (double& v : est.wait) v = rng.uniform(0.0, 8.0);
        const MixedPlanProblem p = make_plan_problem(s, st, est, true);
        std::vector<VectorOutcome> outcomes;
        const MixedPlanSolution grid = brute_force_oracle(p, step, &outcomes);
        if (grid.status != LpStatus::Optimal) continue;
        if (!evcoord::testing::grid_ranking_valid(p, step, outcomes)) continue;
        if (evcoord::testing::grid_vector_gap(outcomes) <
            2.0 * evcoord::testing::mixed_grid_error(p, step) + 0.02)
            continue;
        ++kept;
        const ChargingPlan plan = optimize_plan(s, st, est);
        CHECK(plan.charge == grid.charge);
        CHECK(std::abs(plan.objective - grid.objective) <= 0.1);
    }
    CHECK(kept == 40);
}

TEST_CASE("evaluating a plan at its own estimates returns the planned cost") {
    World w(2);
    const TruckState st = w.state(1, 500.0, 300.0);
    WaitingEstimates est = WaitingEstimates::zeros(2);
    est.wait[0] = 5.0;
    est.wait[1] = 12.0;
    const ChargingPlan plan = optimize_plan(w.s, st, est);
    const double replayed = evaluate_cost(w.s, st, plan, est.wait);
    CHECK(replayed == doctest::Approx(plan.objective).epsilon(1e-9));
}

TEST_CASE("an all-zero plan costs exactly the deadline hinge") {
    World w(2);
    const TruckState st = w.state(1, 500.0, 624.0, 690.0);
    ChargingPlan plan;
    plan.first_ramp = 1;
    plan.charge = {0, 0};
    plan.duration = {0.0, 0.0};
    const double waits[] = {30.0, 40.0};  // ignored: nothing is charged
    const double arrival = 500.0 + 100.0 + 100.0;
    CHECK(evaluate_cost(w.s, st, plan, waits) ==
          doctest::Approx(10.0 * (arrival - 690.0)).epsilon(1e-12));
    const TruckState relaxed = w.state(1, 500.0, 624.0, 1500.0);
    CHECK(evaluate_cost(w.s, relaxed, plan, waits) == 0.0);
}

TEST_CASE("cost error bound arithmetic") {
    const double zeros[] = {0.0, 0.0};
    CHECK(cost_bound(zeros, 2.0, 10.0) == 0.0);
    const double dw[] = {3.0, 1.0};
    CHECK(cost_bound(dw, 2.0, 10.0) == 48.0);
    CHECK(cost_bound({}, 2.0, 10.0) == 0.0);  // empty sum at the last ramp
}

TEST_CASE("cost error is bounded by the waiting-error bound") {
    SplitMix64 rng(555);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto draw = random_state(seed);
        TruckState st;
        st.truck = &draw.world.scenario.trucks[0];
        st.route = &draw.world.scenario.routes[0];
        st.ramp = draw.ramp;
        st.arrival = draw.arrival;
        st.battery = draw.battery;
        st.deadline = draw.arrival + rng.uniform(100.0, 400.0);
        const int remaining = st.remaining();
        WaitingEstimates est = WaitingEstimates::zeros(remaining);
        for (double& v : est.wait) v = rng.uniform(0.0, 25.0);
        const ChargingPlan plan = optimize_plan(draw.world.scenario, st, est);

        std::vector<double> actual(est.wait);
        for (std::size_t i = 1; i < actual.size(); ++i)
            actual[i] = std::max(0.0, actual[i] + rng.uniform(-15.0, 15.0));
        const double replayed =
            evaluate_cost(draw.world.scenario, st, plan, actual);
        std::vector<double> dw;
        for (std::size_t i = 1; i < actual.size(); ++i)
            dw.push_back(std::abs(actual[i] - est.wait[i]));
        const double bound = cost_bound(dw, st.truck->labor_rate,
                                        st.truck->deadline_penalty_rate);
        REQUIRE(std::abs(replayed - plan.objective) <= bound + 1e-9);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("first executed step is safe under any energy noise") {
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        auto draw = random_state(seed);
        const Scenario& s = draw.world.scenario;
        TruckState st;
        st.truck = &s.trucks[0];
        st.route = &s.routes[0];
        st.ramp = draw.ramp;
        st.arrival = draw.arrival;
        st.battery = draw.battery;
        st.deadline = draw.arrival + 500.0;
        const int remaining = st.remaining();
        const ChargingPlan plan =
            optimize_plan(s, st, WaitingEstimates::zeros(remaining));
        const RouteSpec& r = s.routes[0];
        const TruckSpec& t = s.trucks[0];
        const int k = st.ramp;
        const double rate = effective_charge_rate(
            t, s.stations[r.station(k)]);
        const double bonus_bound =
            r.energy_uncertainty(k) * t.consumption_rate * r.travel(k);
        for (double noise : {-bonus_bound, bonus_bound}) {
            double next = st.battery - t.consumption_rate * r.travel(k) + noise;
            if (plan.charge[0])
                next += plan.duration[0] * rate -
                        t.consumption_rate * 2.0 * r.detour(k);
            const double floor =
                k + 1 <= r.station_count()
                    ? t.safety_margin + t.consumption_rate * r.detour(k + 1)
                    : t.safety_margin;
            REQUIRE(next >= floor - 1e-9);
        }
    }
}

TEST_CASE("lower waiting estimates cannot raise the cost by more than the bound") {
    SplitMix64 rng(808);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto draw = random_state(seed);
        TruckState st;
        st.truck = &draw.world.scenario.trucks[0];
        st.route = &draw.world.scenario.routes[0];
        st.ramp = draw.ramp;
        st.arrival = draw.arrival;
        st.battery = draw.battery;
        st.deadline = draw.arrival + rng.uniform(150.0, 500.0);
        const int remaining = st.remaining();
        WaitingEstimates high = WaitingEstimates::zeros(remaining);
        for (double& v : high.wait) v = rng.uniform(5.0, 30.0);
        WaitingEstimates low = high;
        double shrink = 0.0;
        for (double& v : low.wait) {
            const double delta = rng.uniform(0.0, v);
            v -= delta;
            shrink += delta;
        }
        const double j_high =
            optimize_plan(draw.world.scenario, st, high).objective;
        const double j_low =
            optimize_plan(draw.world.scenario, st, low).objective;
        const double slack = (st.truck->labor_rate +
                              st.truck->deadline_penalty_rate) *
                             shrink;
        REQUIRE(j_low <= j_high + slack + 1e-9);
    }
}
