#include "evcoord/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "evcoord/errors.hpp"

namespace evcoord {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTol = 1e-9;   // reduced-cost threshold
constexpr double kPivotTol = 1e-9;  // smallest usable pivot element
constexpr double kRatioTie = 1e-12;
constexpr int kMaxIterations = 50000;

// Dense bounded-variable simplex over the equality system A z = b, where z
// stacks the structural variables and one logical variable per row (slack for
// <=, fixed-at-zero for =). Artificials are appended when the all-logical
// start is out of bounds. Basis inverse is kept explicitly; problems here are
// tiny (tens of variables).
class Simplex {
public:
    explicit Simplex(const LinearProgram& lp) {
        m_ = lp.rows.size();
        n_struct_ = lp.num_vars();

        // Row scaling: divide each row and its rhs by the largest
        // absolute coefficient. Feasibility tolerances apply to these
        // scaled rows.
        std::vector<double> scale(m_, 1.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double s = 0.0;
            for (double a : lp.rows[i].coeffs) s = std::max(s, std::abs(a));
            if (s > 0.0) scale[i] = s;
        }

        cols_.assign(n_struct_ + m_, std::vector<double>(m_, 0.0));
        lo_.assign(n_struct_ + m_, 0.0);
        up_.assign(n_struct_ + m_, 0.0);
        b_.assign(m_, 0.0);
        for (std::size_t j = 0; j < n_struct_; ++j) {
            lo_[j] = lp.lower[j];
            up_[j] = lp.upper[j];
            for (std::size_t i = 0; i < m_; ++i)
                cols_[j][i] = lp.rows[i].coeffs[j] / scale[i];
        }
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t j = n_struct_ + i;
            cols_[j][i] = 1.0;
            lo_[j] = 0.0;
            up_[j] = lp.rows[i].relation == Relation::LessEq ? kInf : 0.0;
            b_[i] = lp.rows[i].rhs / scale[i];
        }

        // Nonbasic start: every variable at its finite bound nearest zero.
        x_.assign(n_struct_ + m_, 0.0);
        at_upper_.assign(n_struct_ + m_, 0);
        for (std::size_t j = 0; j < n_struct_; ++j) {
            if (std::isfinite(lo_[j])) {
                x_[j] = lo_[j];
            } else if (std::isfinite(up_[j])) {
                x_[j] = up_[j];
                at_upper_[j] = 1;
            }
        }

        // Start basis: the logical variable of each row, replaced by an
        // artificial wherever the implied value violates its bounds.
        std::vector<double> beta(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double r = b_[i];
            for (std::size_t j = 0; j < n_struct_; ++j) r -= cols_[j][i] * x_[j];
            beta[i] = r;
        }
        basis_.resize(m_);
        where_.assign(n_struct_ + m_, -1);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t logical = n_struct_ + i;
            const bool fits = beta[i] >= lo_[logical] - kRatioTie &&
                              beta[i] <= up_[logical] + kRatioTie;
            if (fits) {
                basis_[i] = static_cast<int>(logical);
                x_[logical] = beta[i];
            } else {
                const std::size_t art = cols_.size();
                cols_.emplace_back(m_, 0.0);
                cols_.back()[i] = beta[i] >= 0 ? 1.0 : -1.0;
                lo_.push_back(0.0);
                up_.push_back(kInf);
                x_.push_back(std::abs(beta[i]));
                at_upper_.push_back(0);
                where_.push_back(-1);
                basis_[i] = static_cast<int>(art);
                first_artificial_ = std::min(first_artificial_, art);
            }
            where_[basis_[i]] = static_cast<int>(i);
        }

        // The start basis is diagonal (logical +1 or artificial +-1 columns).
        binv_.assign(m_, std::vector<double>(m_, 0.0));
        for (std::size_t i = 0; i < m_; ++i)
            binv_[i][i] = 1.0 / cols_[basis_[i]][i];
    }

    LpStatus run(const LinearProgram& lp) {
        const std::size_t n_total = cols_.size();

        if (first_artificial_ < n_total) {
            std::vector<double> phase1(n_total, 0.0);
            for (std::size_t j = first_artificial_; j < n_total; ++j) phase1[j] = 1.0;
            if (optimize(phase1) == StepResult::Unbounded)
                throw std::logic_error("lp: phase 1 reported unbounded");
            double infeas = 0.0;
            for (std::size_t j = first_artificial_; j < n_total; ++j) infeas += x_[j];
            if (infeas > kLpFeasTol) return LpStatus::Infeasible;
            expel_artificials();
            for (std::size_t j = first_artificial_; j < n_total; ++j) up_[j] = 0.0;
            refresh_basic_values();
        }

        std::vector<double> cost(n_total, 0.0);
        for (std::size_t j = 0; j < n_struct_; ++j) cost[j] = lp.objective[j];
        if (optimize(cost) == StepResult::Unbounded) return LpStatus::Unbounded;
        refresh_basic_values();
        return LpStatus::Optimal;
    }

    std::vector<double> structural_values() const {
        std::vector<double> out(n_struct_);
        for (std::size_t j = 0; j < n_struct_; ++j) {
            double v = x_[j];
            if (std::isfinite(lo_[j])) v = std::max(v, lo_[j]);
            if (std::isfinite(up_[j])) v = std::min(v, up_[j]);
            out[j] = v;
        }
        return out;
    }

private:
    enum class StepResult { Optimal, Unbounded };

    StepResult optimize(const std::vector<double>& cost) {
        for (int iter = 0; iter < kMaxIterations; ++iter) {
            // Prices y = c_B B^-1.
            std::vector<double> y(m_, 0.0);
            for (std::size_t r = 0; r < m_; ++r) {
                const double cb = cost[basis_[r]];
                if (cb == 0.0) continue;
                for (std::size_t i = 0; i < m_; ++i) y[i] += cb * binv_[r][i];
            }

            // Entering variable: Bland, the smallest improving index. A
            // variable free in both directions may move either way.
            int enter = -1;
            int dir = 0;
            for (std::size_t j = 0; j < cols_.size(); ++j) {
                if (where_[j] >= 0) continue;
                if (lo_[j] == up_[j]) continue;
                double d = cost[j];
                for (std::size_t i = 0; i < m_; ++i) d -= y[i] * cols_[j][i];
                const bool may_rise =
                    !at_upper_[j] || !std::isfinite(up_[j]);
                const bool may_fall =
                    at_upper_[j] || !std::isfinite(lo_[j]);
                if (may_rise && d < -kCostTol) {
                    enter = static_cast<int>(j);
                    dir = +1;
                    break;
                }
                if (may_fall && d > kCostTol) {
                    enter = static_cast<int>(j);
                    dir = -1;
                    break;
                }
            }
            if (enter < 0) return StepResult::Optimal;

            std::vector<double> w(m_, 0.0);
            for (std::size_t i = 0; i < m_; ++i) {
                double v = 0.0;
                for (std::size_t r = 0; r < m_; ++r) v += binv_[i][r] * cols_[enter][r];
                w[i] = v;
            }

            // Ratio test. The entering variable moves by t >= 0 in direction
            // dir; basic variable i moves at rate -dir*w[i].
            double limit = up_[enter] - lo_[enter];  // may be +inf
            int block = -1;                          // -1: entering hits its own bound
            for (std::size_t i = 0; i < m_; ++i) {
                const double rate = -dir * w[i];
                if (std::abs(rate) <= kPivotTol) continue;
                const int bv = basis_[i];
                double cand;
                if (rate < 0) {
                    if (!std::isfinite(lo_[bv])) continue;
                    cand = (x_[bv] - lo_[bv]) / (-rate);
                } else {
                    if (!std::isfinite(up_[bv])) continue;
                    cand = (up_[bv] - x_[bv]) / rate;
                }
                if (cand < 0) cand = 0;
                if (cand < limit - kRatioTie) {
                    limit = cand;
                    block = static_cast<int>(i);
                } else if (block >= 0 && std::abs(cand - limit) <= kRatioTie &&
                           basis_[i] < basis_[block]) {
                    block = static_cast<int>(i);  // Bland tie-break
                }
            }
            if (!std::isfinite(limit)) return StepResult::Unbounded;

            for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= dir * limit * w[i];
            x_[enter] += dir * limit;

            if (block < 0) {
                at_upper_[enter] ^= 1;  // bound flip, basis unchanged
                continue;
            }
            const int leave = basis_[block];
            const double rate = -dir * w[block];
            at_upper_[leave] = rate > 0 ? 1 : 0;
            x_[leave] = at_upper_[leave] ? up_[leave] : lo_[leave];
            pivot(static_cast<std::size_t>(block), enter, w);
        }
        throw std::logic_error("lp: iteration limit exceeded");
    }

    void pivot(std::size_t row, int enter, const std::vector<double>& w) {
        const int leave = basis_[row];
        basis_[row] = enter;
        where_[enter] = static_cast<int>(row);
        where_[leave] = -1;
        const double piv = w[row];
        for (std::size_t i = 0; i < m_; ++i) binv_[row][i] /= piv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = w[i];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < m_; ++c) binv_[i][c] -= f * binv_[row][c];
        }
    }

    // Degenerate pivots that remove zero-valued artificials from the basis
    // where a non-artificial column has a usable element. Rows where none
    // exists are redundant; their artificial stays pinned at zero.
    void expel_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (static_cast<std::size_t>(basis_[r]) < first_artificial_) continue;
            int enter = -1;
            std::vector<double> w;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                if (where_[j] >= 0) continue;
                double v = 0.0;
                for (std::size_t i = 0; i < m_; ++i) v += binv_[r][i] * cols_[j][i];
                if (std::abs(v) > 1e-7) {
                    enter = static_cast<int>(j);
                    w.assign(m_, 0.0);
                    for (std::size_t i = 0; i < m_; ++i) {
                        double acc = 0.0;
                        for (std::size_t c = 0; c < m_; ++c)
                            acc += binv_[i][c] * cols_[j][c];
                        w[i] = acc;
                    }
                    break;
                }
            }
            if (enter >= 0) pivot(r, enter, w);
        }
    }

    void refresh_basic_values() {
        std::vector<double> rhs = b_;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (where_[j] >= 0 || x_[j] == 0.0) continue;
            for (std::size_t i = 0; i < m_; ++i) rhs[i] -= cols_[j][i] * x_[j];
        }
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t c = 0; c < m_; ++c) v += binv_[i][c] * rhs[c];
            x_[basis_[i]] = v;
        }
    }

    std::size_t m_ = 0;
    std::size_t n_struct_ = 0;
    std::size_t first_artificial_ = std::numeric_limits<std::size_t>::max();
    std::vector<std::vector<double>> cols_;
    std::vector<double> lo_, up_, b_, x_;
    std::vector<std::uint8_t> at_upper_;
    std::vector<int> basis_, where_;
    std::vector<std::vector<double>> binv_;
};

void check_structure(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    if (lp.lower.size() != n || lp.upper.size() != n)
        throw ValidationError("lp: bounds sizes do not match variable count");
    for (std::size_t j = 0; j < n; ++j)
        if (!(lp.lower[j] <= lp.upper[j]))
            throw ValidationError("lp: lower bound exceeds upper bound");
    for (const LpRow& row : lp.rows)
        if (row.coeffs.size() != n)
            throw ValidationError("lp: row width does not match variable count");
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    check_structure(lp);
    Simplex simplex(lp);
    LpSolution sol;
    sol.status = simplex.run(lp);
    if (sol.status != LpStatus::Optimal) return sol;
    sol.values = simplex.structural_values();
    double obj = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j)
        obj += lp.objective[j] * sol.values[j];
    sol.objective = obj;
#ifndef NDEBUG
    if (lp_row_violation(lp, sol.values) > kLpFeasTol)
        throw std::logic_error("lp: optimal solution violates a constraint");
#endif
    return sol;
}

double lp_row_violation(const LinearProgram& lp, std::span<const double> x) {
    double worst = 0.0;
    for (const LpRow& row : lp.rows) {
        double scale = 0.0;
        for (double a : row.coeffs) scale = std::max(scale, std::abs(a));
        if (scale == 0.0) scale = 1.0;
        double lhs = 0.0;
        for (std::size_t j = 0; j < row.coeffs.size(); ++j) lhs += row.coeffs[j] * x[j];
        const double resid = (lhs - row.rhs) / scale;
        if (row.relation == Relation::LessEq)
            worst = std::max(worst, resid);
        else
            worst = std::max(worst, std::abs(resid));
    }
    return worst;
}

std::string lp_to_string(const LinearProgram& lp) {
    std::ostringstream os;
    os << "min";
    for (double c : lp.objective) os << ' ' << c;
    os << '\n';
    for (const LpRow& row : lp.rows) {
        for (double a : row.coeffs) os << a << ' ';
        os << (row.relation == Relation::LessEq ? "<= " : "== ") << row.rhs << '\n';
    }
    os << "bounds";
    for (std::size_t j = 0; j < lp.num_vars(); ++j)
        os << " [" << lp.lower[j] << ',' << lp.upper[j] << ']';
    os << '\n';
    return os.str();
}

}  // namespace evcoord
