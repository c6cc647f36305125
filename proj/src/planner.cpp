#include "evcoord/planner.hpp"

#include <algorithm>
#include <cmath>

#include "evcoord/errors.hpp"

namespace evcoord {

double effective_charge_rate(const TruckSpec& truck, const StationSpec& station) {
    return std::min(station.charge_power, truck.max_charge_power);
}

double charge_cost_per_minute(const TruckSpec& truck, const StationSpec& station) {
    return station.electricity_price * effective_charge_rate(truck, station);
}

MixedPlanProblem make_earliest_problem(const Scenario& scenario,
                                       const TruckState& state, int target_ramp) {
    const TruckSpec& truck = *state.truck;
    const RouteSpec& route = *state.route;
    const int k = state.ramp;
    MixedPlanProblem p;
    p.mode = PlanMode::Earliest;
    for (int h = k; h < target_ramp; ++h) {
        const StationSpec& st = scenario.stations[route.station(h)];
        p.charge_rate.push_back(effective_charge_rate(truck, st));
        p.detour.push_back(route.detour(h));
        p.travel.push_back(route.travel(h));
        p.energy_bonus.push_back(route.energy_uncertainty(h) *
                                 truck.consumption_rate * route.travel(h));
        p.required_after.push_back(truck.safety_margin +
                                   truck.consumption_rate * route.detour(h + 1));
        p.forbid_charge.push_back(0);
    }
    p.battery_initial = state.battery;
    p.battery_full = truck.battery_full;
    p.consumption_rate = truck.consumption_rate;
    return p;
}

MixedPlanProblem make_plan_problem(const Scenario& scenario,
                                   const TruckState& state,
                                   const WaitingEstimates& estimates,
                                   bool robust_first_margin) {
    const TruckSpec& truck = *state.truck;
    const RouteSpec& route = *state.route;
    const int k = state.ramp;
    const int n = route.station_count();
    if (static_cast<int>(estimates.wait.size()) != n - k + 1 ||
        estimates.reachable.size() != estimates.wait.size())
        throw ValidationError("optimize_plan: estimates must cover every remaining station");

    MixedPlanProblem p;
    p.mode = PlanMode::Plan;
    for (int l = k; l <= n; ++l) {
        const StationSpec& st = scenario.stations[route.station(l)];
        p.charge_rate.push_back(effective_charge_rate(truck, st));
        p.detour.push_back(route.detour(l));
        p.travel.push_back(route.travel(l));
        p.energy_bonus.push_back(0.0);
        double floor = truck.safety_margin;
        if (l + 1 <= n) floor += truck.consumption_rate * route.detour(l + 1);
        if (robust_first_margin) {
            if (l == k && l < n)
                floor += route.energy_uncertainty(k) * truck.consumption_rate *
                         route.travel(k);
            if (l == n) {
                // The destination floor carries the worst-case energy noise of
                // every remaining segment. The last replanning step enforces
                // the imminent-segment inflation at the destination anyway;
                // anticipating it (and its successors) here keeps the plan
                // sequence consistent, otherwise half the trips discover a
                // small deficit at the final ramp and buy a forced top-up stop.
                for (int h = k; h <= n; ++h)
                    floor += route.energy_uncertainty(h) *
                             truck.consumption_rate * route.travel(h);
            }
        }
        p.required_after.push_back(floor);
        p.wait_estimate.push_back(estimates.wait[l - k]);
        p.charge_cost_rate.push_back(charge_cost_per_minute(truck, st));
        p.forbid_charge.push_back(estimates.reachable[l - k] ? 0 : 1);
    }
    p.battery_initial = state.battery;
    p.battery_full = truck.battery_full;
    p.consumption_rate = truck.consumption_rate;
    p.arrival_time = state.arrival;
    p.labor_rate = truck.labor_rate;
    p.deadline_penalty_rate = truck.deadline_penalty_rate;
    p.deadline = state.deadline;
    return p;
}

std::vector<std::optional<double>> earliest_ramp_arrivals(
    const Scenario& scenario, const TruckState& state,
    const PlannerOptions& options) {
    const RouteSpec& route = *state.route;
    const int k = state.ramp;
    const int n = route.station_count();
    std::vector<std::optional<double>> out;
    for (int target = k + 1; target <= n; ++target) {
        const MixedPlanProblem p = make_earliest_problem(scenario, state, target);
        const MixedPlanSolution sol =
            solve_mixed(p, SolveOptions{options.enumeration_cap});
        if (sol.status != LpStatus::Optimal) {
            out.push_back(std::nullopt);
            continue;
        }
        double arrival = state.arrival;
        for (int h = k; h < target; ++h) {
            const std::size_t i = static_cast<std::size_t>(h - k);
            if (sol.charge[i])
                arrival += 2.0 * route.detour(h) + sol.duration[i];
            arrival += route.travel(h) -
                       route.travel_uncertainty(h) * route.travel(h);
        }
        out.push_back(arrival);
    }
    return out;
}

std::vector<double> latest_ramp_arrivals(const Scenario& scenario,
                                         const TruckState& state,
                                         std::span<const double> max_waits,
                                         double nearby_wait) {
    const TruckSpec& truck = *state.truck;
    const RouteSpec& route = *state.route;
    const int k = state.ramp;
    std::vector<double> out;
    double sum = 0.0;
    for (std::size_t i = 0; i < max_waits.size(); ++i) {
        const int h = k + static_cast<int>(i);  // station whose term is added
        const StationSpec& st = scenario.stations[route.station(h)];
        const double rate = effective_charge_rate(truck, st);
        double max_gain;  // most battery the truck could take on at station h
        if (h == k) {
            max_gain = truck.battery_full -
                       (state.battery - truck.consumption_rate * route.detour(k));
        } else {
            max_gain = truck.consumption_rate *
                           (route.detour(h - 1) + route.travel(h - 1) +
                            route.detour(h)) +
                       route.energy_uncertainty(h - 1) * truck.consumption_rate *
                           route.travel(h - 1);
        }
        const double wait_cap = h == k ? nearby_wait : max_waits[i - 1];
        sum += 2.0 * route.detour(h) + max_gain / rate + wait_cap +
               route.travel(h) +
               route.travel_uncertainty(h) * route.travel(h);
        out.push_back(state.arrival + sum);
    }
    return out;
}

ChargingPlan optimize_plan(const Scenario& scenario, const TruckState& state,
                           const WaitingEstimates& estimates,
                           const PlannerOptions& options) {
    const MixedPlanProblem p =
        make_plan_problem(scenario, state, estimates, options.robust_first_margin);
    const MixedPlanSolution sol =
        solve_mixed(p, SolveOptions{options.enumeration_cap});
    if (sol.status != LpStatus::Optimal)
        throw PlanInfeasible("no feasible plan for truck " + state.truck->id +
                             " at ramp " + std::to_string(state.ramp));
    ChargingPlan plan;
    plan.first_ramp = state.ramp;
    plan.charge = sol.charge;
    plan.duration = sol.duration;
    plan.objective = sol.objective;
    return plan;
}

double evaluate_cost(const Scenario& scenario, const TruckState& state,
                     const ChargingPlan& plan,
                     std::span<const double> actual_waits) {
    const TruckSpec& truck = *state.truck;
    const RouteSpec& route = *state.route;
    const int k = plan.first_ramp;
    const int n = route.station_count();
    if (static_cast<int>(actual_waits.size()) != n - k + 1)
        throw ValidationError("evaluate_cost: waits must cover every remaining station");

    double cost = 0.0;
    double arrival = state.arrival;
    for (int l = k; l <= n; ++l) {
        const std::size_t i = static_cast<std::size_t>(l - k);
        if (plan.charge[i]) {
            const StationSpec& st = scenario.stations[route.station(l)];
            cost += truck.labor_rate * (2.0 * route.detour(l) + plan.duration[i] +
                                        actual_waits[i]) +
                    charge_cost_per_minute(truck, st) * plan.duration[i];
            arrival += plan.duration[i] + actual_waits[i] + 2.0 * route.detour(l);
        }
        arrival += route.travel(l);
    }
    cost += std::max(truck.deadline_penalty_rate * (arrival - state.deadline), 0.0);
    return cost;
}

double cost_bound(std::span<const double> wait_errors, double labor_rate,
                  double deadline_penalty_rate) {
    double sum = 0.0;
    for (double dw : wait_errors) sum += dw;
    return (labor_rate + deadline_penalty_rate) * sum;
}

}  // namespace evcoord
