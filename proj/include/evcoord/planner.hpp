#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "evcoord/scenario.hpp"
#include "evcoord/solver.hpp"

namespace evcoord {

/// A truck that has just reached ramp `ramp` (1..N) on its route.
struct TruckState {
    const TruckSpec* truck = nullptr;
    const RouteSpec* route = nullptr;
    int ramp = 1;            // k
    double arrival = 0.0;    // a_k, absolute minutes
    double battery = 0.0;    // e_k, kWh
    double deadline = 0.0;   // absolute minutes for this trip

    int remaining() const { return route->station_count() - ramp + 1; }
};

/// Waiting-time estimates for the stations still ahead (index 0 = the nearby
/// station at the current ramp). Unreachable stations carry estimate 0 and
/// reachable = false; the planner then forbids charging there.
struct WaitingEstimates {
    std::vector<double> wait;
    std::vector<std::uint8_t> reachable;

    static WaitingEstimates zeros(std::size_t n) {
        return {std::vector<double>(n, 0.0), std::vector<std::uint8_t>(n, 1)};
    }
};

struct ChargingPlan {
    int first_ramp = 1;                  // k of the ramp the plan was made at
    std::vector<std::uint8_t> charge;    // b, index 0 = station at first_ramp
    std::vector<double> duration;        // t, minutes
    double objective = 0.0;              // planned cost J*
};

struct PlannerOptions {
    // Inflate the battery floor of the imminent segment by the worst-case
    // energy noise so the executed first step stays safe under any
    // realization. Off for the open-loop offline baseline.
    bool robust_first_margin = true;
    std::size_t enumeration_cap = 16;
};

struct PlanInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double effective_charge_rate(const TruckSpec& truck, const StationSpec& station);
/// Electricity cost per minute of charging: price times the effective rate.
double charge_cost_per_minute(const TruckSpec& truck, const StationSpec& station);

/// Best-case ramp arrival times at each station ahead of the nearby one
/// (index 0 = ramp k+1). nullopt marks stations the battery cannot reach even
/// with maximal charging; callers treat those as absent windows.
std::vector<std::optional<double>> earliest_ramp_arrivals(
    const Scenario& scenario, const TruckState& state,
    const PlannerOptions& options = {});

/// Worst-case ramp arrival times, one per supplied maximum wait (index 0 =
/// ramp k+1). max_waits holds the stations' capped-wait responses for the
/// reachable prefix; the nearby station's wait estimate stands in for its cap.
std::vector<double> latest_ramp_arrivals(const Scenario& scenario,
                                         const TruckState& state,
                                         std::span<const double> max_waits,
                                         double nearby_wait);

/// Globally optimal charging plan for the remaining route under the supplied
/// waiting-time estimates. Throws PlanInfeasible when no plan exists (a
/// scenario-generation bug in simulation).
ChargingPlan optimize_plan(const Scenario& scenario, const TruckState& state,
                           const WaitingEstimates& estimates,
                           const PlannerOptions& options = {});

/// Cost of executing `plan` when the waits turn out to be `actual_waits`
/// (index 0 = the plan's first station); same recursion the planner used.
double evaluate_cost(const Scenario& scenario, const TruckState& state,
                     const ChargingPlan& plan,
                     std::span<const double> actual_waits);

/// Bound on the cost error caused by waiting-time estimate errors at the
/// stations ahead of the nearby one: (labor + penalty rate) * sum of errors.
/// Exactly zero for an empty list (last ramp).
double cost_bound(std::span<const double> wait_errors, double labor_rate,
                  double deadline_penalty_rate);

// Problem builders, exposed for tests and the engine.
MixedPlanProblem make_plan_problem(const Scenario& scenario,
                                   const TruckState& state,
                                   const WaitingEstimates& estimates,
                                   bool robust_first_margin);
MixedPlanProblem make_earliest_problem(const Scenario& scenario,
                                       const TruckState& state, int target_ramp);

}  // namespace evcoord
