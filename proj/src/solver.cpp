#include "evcoord/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evcoord/errors.hpp"

namespace evcoord {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_problem(const MixedPlanProblem& p) {
    const std::size_t h = p.horizon();
    if (h == 0) throw ValidationError("plan problem: empty horizon");
    auto sized = [h](const auto& v) { return v.size() == h; };
    if (!sized(p.detour) || !sized(p.travel) || !sized(p.energy_bonus) ||
        !sized(p.required_after) || !sized(p.forbid_charge))
        throw ValidationError("plan problem: inconsistent array sizes");
    if (p.mode == PlanMode::Plan &&
        (!sized(p.wait_estimate) || !sized(p.charge_cost_rate)))
        throw ValidationError("plan problem: missing wait/cost data");
    for (double r : p.charge_rate)
        if (!(r > 0)) throw ValidationError("plan problem: charge rate must be positive");
    if (!(p.consumption_rate > 0))
        throw ValidationError("plan problem: consumption rate must be positive");
}

// LP over the charging durations for a fixed binary vector. Batteries are
// affine in the durations, so every constraint is a row over (t_0..t_{H-1})
// plus, in Plan mode, the epigraph variable of the deadline hinge.
struct FixedLp {
    LinearProgram lp;
    double constant = 0.0;
};

FixedLp build_fixed_lp(const MixedPlanProblem& p,
                       const std::vector<std::uint8_t>& b) {
    const std::size_t h_count = p.horizon();
    const bool plan = p.mode == PlanMode::Plan;
    const std::size_t n = h_count + (plan ? 1 : 0);

    FixedLp out;
    LinearProgram& lp = out.lp;
    lp.objective.assign(n, 0.0);
    lp.lower.assign(n, 0.0);
    lp.upper.assign(n, 0.0);
    for (std::size_t h = 0; h < h_count; ++h)
        lp.upper[h] = b[h] ? kInf : 0.0;
    if (plan) lp.upper[h_count] = kInf;  // hinge epigraph variable

    // battery_before[h]: battery at ramp h with all durations zero;
    // the coefficient of t_j (j < h) in the affine battery is b_j * rate_j.
    std::vector<double> battery_before(h_count + 1, 0.0);
    battery_before[0] = p.battery_initial;
    for (std::size_t h = 0; h < h_count; ++h) {
        const double drive =
            p.consumption_rate * (2.0 * (b[h] ? p.detour[h] : 0.0) + p.travel[h]);
        battery_before[h + 1] = battery_before[h] - drive + p.energy_bonus[h];
    }

    // Battery floor at each next ramp: -(sum_{j<=h} b_j r_j t_j) <= base - floor.
    for (std::size_t h = 0; h < h_count; ++h) {
        LpRow row;
        row.coeffs.assign(n, 0.0);
        for (std::size_t j = 0; j <= h; ++j)
            if (b[j]) row.coeffs[j] = -p.charge_rate[j];
        row.relation = Relation::LessEq;
        row.rhs = battery_before[h + 1] - p.required_after[h];
        lp.rows.push_back(std::move(row));
    }

    // Charge cap: the battery may only be topped up to full at the station.
    for (std::size_t h = 0; h < h_count; ++h) {
        if (!b[h]) continue;
        LpRow row;
        row.coeffs.assign(n, 0.0);
        row.coeffs[h] = p.charge_rate[h];
        for (std::size_t j = 0; j < h; ++j)
            if (b[j]) row.coeffs[j] += p.charge_rate[j];
        row.relation = Relation::LessEq;
        row.rhs = p.battery_full - battery_before[h] +
                  p.consumption_rate * p.detour[h];
        lp.rows.push_back(std::move(row));
    }

    if (plan) {
        double base_arrival = p.arrival_time;
        for (std::size_t h = 0; h < h_count; ++h) {
            base_arrival += p.travel[h];
            if (b[h]) base_arrival += p.wait_estimate[h] + 2.0 * p.detour[h];
        }
        // z >= gamma * (arrival - deadline), z >= 0.
        LpRow hinge;
        hinge.coeffs.assign(n, 0.0);
        for (std::size_t h = 0; h < h_count; ++h)
            if (b[h]) hinge.coeffs[h] = p.deadline_penalty_rate;
        hinge.coeffs[h_count] = -1.0;
        hinge.relation = Relation::LessEq;
        hinge.rhs = p.deadline_penalty_rate * (p.deadline - base_arrival);
        lp.rows.push_back(std::move(hinge));

        for (std::size_t h = 0; h < h_count; ++h) {
            if (!b[h]) continue;
            lp.objective[h] = p.labor_rate + p.charge_cost_rate[h];
            out.constant +=
                p.labor_rate * (2.0 * p.detour[h] + p.wait_estimate[h]);
        }
        lp.objective[h_count] = 1.0;
    } else {
        for (std::size_t h = 0; h < h_count; ++h) {
            if (!b[h]) continue;
            lp.objective[h] = 1.0;
            out.constant += 2.0 * p.detour[h];
        }
    }
    return out;
}

/// true when `a` should replace `b` as the incumbent.
bool better_candidate(const MixedPlanSolution& a, const MixedPlanSolution& b) {
    if (a.objective < b.objective - kObjectiveTieTol) return true;
    if (a.objective > b.objective + kObjectiveTieTol) return false;
    const auto stops = [](const std::vector<std::uint8_t>& v) {
        return std::count(v.begin(), v.end(), std::uint8_t{1});
    };
    const auto sa = stops(a.charge), sb = stops(b.charge);
    if (sa != sb) return sa < sb;
    return std::lexicographical_compare(a.charge.begin(), a.charge.end(),
                                        b.charge.begin(), b.charge.end());
}

}  // namespace

std::optional<FixedDecisionResult> solve_with_decisions(
    const MixedPlanProblem& problem, const std::vector<std::uint8_t>& charge) {
    check_problem(problem);
    if (charge.size() != problem.horizon())
        throw ValidationError("plan problem: decision vector size mismatch");
    const FixedLp fixed = build_fixed_lp(problem, charge);
    const LpSolution sol = solve_lp(fixed.lp);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    FixedDecisionResult result;
    result.duration.assign(sol.values.begin(),
                           sol.values.begin() + problem.horizon());
    result.objective = sol.objective + fixed.constant;
    return result;
}

MixedPlanSolution solve_mixed(const MixedPlanProblem& problem,
                              const SolveOptions& options) {
    check_problem(problem);
    const std::size_t h = problem.horizon();
    if (h > options.enumeration_cap)
        throw CapacityError(
            "plan horizon " + std::to_string(h) + " exceeds the enumeration cap of " +
            std::to_string(options.enumeration_cap) +
            "; reduce the scenario's route length or raise the cap");

    MixedPlanSolution best;
    bool have_best = false;
    std::vector<std::uint8_t> b(h, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << h); ++mask) {
        bool admissible = true;
        for (std::size_t i = 0; i < h; ++i) {
            b[i] = (mask >> i) & 1u;
            if (b[i] && problem.forbid_charge[i]) admissible = false;
        }
        if (!admissible) continue;
        const FixedLp fixed = build_fixed_lp(problem, b);
        const LpSolution sol = solve_lp(fixed.lp);
        if (sol.status != LpStatus::Optimal) continue;
        MixedPlanSolution cand;
        cand.status = LpStatus::Optimal;
        cand.charge = b;
        cand.duration.assign(sol.values.begin(), sol.values.begin() + h);
        cand.objective = sol.objective + fixed.constant;
        if (!have_best || better_candidate(cand, best)) {
            best = std::move(cand);
            have_best = true;
        }
    }
    if (!have_best) {
        best.status = LpStatus::Infeasible;
        best.charge.assign(h, 0);
        best.duration.assign(h, 0.0);
    }
    return best;
}

namespace {

struct GridSearch {
    const MixedPlanProblem& p;
    double step;
    const std::vector<std::uint8_t>& b;
    std::vector<double> duration;
    std::optional<double> best;
    std::vector<double> best_duration;

    void finish(double battery, double spent, double cost) {
        (void)battery;
        double total = cost;
        if (p.mode == PlanMode::Plan) {
            const double arrival = p.arrival_time + spent;
            total += std::max(p.deadline_penalty_rate * (arrival - p.deadline), 0.0);
        }
        if (!best || total < *best - 1e-12) {
            best = total;
            best_duration = duration;
        }
    }

    // battery: at ramp h; spent: minutes added on top of plain driving
    // (Plan mode tracks waits and detours for the deadline hinge).
    void visit(std::size_t h, double battery, double spent, double cost) {
        if (h == p.horizon()) {
            finish(battery, spent, cost);
            return;
        }
        const double drive_energy = p.consumption_rate * p.travel[h];
        if (!b[h]) {
            const double next = battery - drive_energy + p.energy_bonus[h];
            if (next >= p.required_after[h] - 1e-9)
                visit(h + 1, next, spent + p.travel[h], cost);
            return;
        }
        const double rate = p.charge_rate[h];
        const double detour_energy = p.consumption_rate * p.detour[h];
        const double cap = (p.battery_full - (battery - detour_energy)) / rate;
        const double base_next =
            battery - 2.0 * detour_energy - drive_energy + p.energy_bonus[h];
        const double need = (p.required_after[h] - base_next) / rate;
        long lo_idx = need > 0 ? static_cast<long>(std::ceil(need / step - 1e-9)) : 0;
        const long hi_idx = static_cast<long>(std::floor(cap / step + 1e-9));
        for (long idx = lo_idx; idx <= hi_idx; ++idx) {
            const double t = static_cast<double>(idx) * step;
            const double next = base_next + rate * t;
            double c = cost;
            double extra = 2.0 * p.detour[h] + t;
            if (p.mode == PlanMode::Plan) {
                c += p.labor_rate * (extra + p.wait_estimate[h]) +
                     p.charge_cost_rate[h] * t;
                extra += p.wait_estimate[h];
            } else {
                c += extra;
            }
            duration[h] = t;
            visit(h + 1, next, spent + p.travel[h] + extra, c);
            duration[h] = 0.0;
        }
    }
};

}  // namespace

MixedPlanSolution brute_force_oracle(const MixedPlanProblem& problem,
                                     double grid_step,
                                     std::vector<VectorOutcome>* per_vector) {
    check_problem(problem);
    const std::size_t h = problem.horizon();
    if (h > 4) throw CapacityError("oracle horizon is limited to 4");
    if (!(grid_step > 0)) throw ValidationError("oracle grid step must be positive");

    MixedPlanSolution best;
    bool have_best = false;
    std::vector<std::uint8_t> b(h, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << h); ++mask) {
        bool admissible = true;
        for (std::size_t i = 0; i < h; ++i) {
            b[i] = (mask >> i) & 1u;
            if (b[i] && problem.forbid_charge[i]) admissible = false;
        }
        if (!admissible) continue;
        GridSearch search{problem, grid_step, b, std::vector<double>(h, 0.0),
                          std::nullopt, {}};
        search.visit(0, problem.battery_initial, 0.0, 0.0);
        if (per_vector) per_vector->push_back({b, search.best});
        if (!search.best) continue;
        MixedPlanSolution cand;
        cand.status = LpStatus::Optimal;
        cand.charge = b;
        cand.duration = search.best_duration;
        cand.objective = *search.best;
        if (!have_best || better_candidate(cand, best)) {
            best = std::move(cand);
            have_best = true;
        }
    }
    if (!have_best) {
        best.status = LpStatus::Infeasible;
        best.charge.assign(h, 0);
        best.duration.assign(h, 0.0);
    }
    return best;
}

}  // namespace evcoord
