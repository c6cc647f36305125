#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evcoord/lp.hpp"

namespace evcoord {

enum class PlanMode {
    Plan,      // minimize labor + electricity + soft-deadline penalty
    Earliest,  // minimize time spent off the main road (detours + charging)
};

/// One charging-plan instance over the stations still ahead of the truck.
/// Index h = 0..H-1 walks those stations in route order; travel[h] is the
/// road segment AFTER station h. `required_after[h]` is the battery the truck
/// must still hold at the next ramp (or at the trip target for the last h).
/// `energy_bonus[h]` is an additive battery term on that segment (used for
/// the favorable-noise variant of the dynamics).
struct MixedPlanProblem {
    PlanMode mode = PlanMode::Plan;
    std::vector<double> charge_rate;       // effective kWh/min at each station
    std::vector<double> detour;            // minutes, one way
    std::vector<double> travel;            // minutes
    std::vector<double> energy_bonus;      // kWh per transition
    std::vector<double> required_after;    // kWh floor at each next ramp
    std::vector<double> wait_estimate;     // minutes (Plan mode)
    std::vector<double> charge_cost_rate;  // EUR/min of charging (Plan mode)
    std::vector<std::uint8_t> forbid_charge;
    double battery_initial = 0.0;  // kWh at the current ramp
    double battery_full = 0.0;
    double consumption_rate = 0.0;  // kWh/min
    double arrival_time = 0.0;      // minutes (Plan mode)
    double labor_rate = 0.0;        // EUR/min (Plan mode)
    double deadline_penalty_rate = 0.0;
    double deadline = 0.0;

    std::size_t horizon() const { return charge_rate.size(); }
};

struct MixedPlanSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<std::uint8_t> charge;    // b
    std::vector<double> duration;        // t, minutes; zero wherever b is zero
    double objective = 0.0;
};

// Objective ties between binary vectors are broken toward fewer charging
// stops, then toward the lexicographically smaller vector.
inline constexpr double kObjectiveTieTol = 1e-6;

struct SolveOptions {
    std::size_t enumeration_cap = 16;
};

/// Globally optimal plan by enumerating every binary vector and solving the
/// remaining LP in the durations. Throws CapacityError when the horizon
/// exceeds the enumeration cap.
MixedPlanSolution solve_mixed(const MixedPlanProblem& problem,
                              const SolveOptions& options = {});

/// LP relaxation for one fixed binary vector; nullopt when infeasible.
struct FixedDecisionResult {
    std::vector<double> duration;
    double objective;
};
std::optional<FixedDecisionResult> solve_with_decisions(
    const MixedPlanProblem& problem, const std::vector<std::uint8_t>& charge);

/// Exhaustive test oracle: binary vectors crossed with per-variable duration
/// grids anchored at zero (so refining the step only adds candidate points).
/// Horizon is limited to 4. If `per_vector` is given it receives, for every
/// admissible binary vector, the best grid objective found (or nullopt).
struct VectorOutcome {
    std::vector<std::uint8_t> charge;
    std::optional<double> objective;
};
MixedPlanSolution brute_force_oracle(const MixedPlanProblem& problem,
                                     double grid_step,
                                     std::vector<VectorOutcome>* per_vector = nullptr);

}  // namespace evcoord
