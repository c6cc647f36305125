#pragma once

#include <span>
#include <string>
#include <vector>

namespace evcoord {

enum class Relation { LessEq, Eq };

struct LpRow {
    std::vector<double> coeffs;
    Relation relation = Relation::LessEq;
    double rhs = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Minimize objective . x subject to the rows and the variable bounds.
/// Bounds may be +-infinity.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t num_vars() const { return objective.size(); }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;  // meaningful only when Optimal
    double objective = 0.0;
};

// Feasibility tolerance, absolute on rows scaled by their largest coefficient.
inline constexpr double kLpFeasTol = 1e-7;

/// Bounded-variable two-phase simplex with Bland's smallest-index rule, so a
/// given input always produces the same output bit for bit. Throws
/// ValidationError on dimension mismatches before solving.
LpSolution solve_lp(const LinearProgram& lp);

/// Largest violation of the scaled rows at the given point (bounds excluded).
double lp_row_violation(const LinearProgram& lp, std::span<const double> x);

/// Plain-text dump for debugging.
std::string lp_to_string(const LinearProgram& lp);

}  // namespace evcoord
