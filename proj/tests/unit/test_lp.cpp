#include "doctest.h"

#include <limits>

#include "evcoord/errors.hpp"
#include "evcoord/lp.hpp"
#include "support/instances.hpp"

using namespace evcoord;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

LinearProgram single_var(double lo_row, double hi_row) {
    // minimize t subject to t >= lo_row, t <= hi_row
    LinearProgram lp;
    lp.objective = {1.0};
    lp.lower = {0.0};
    lp.upper = {kInf};
    lp.rows.push_back({{-1.0}, Relation::LessEq, -lo_row});
    lp.rows.push_back({{1.0}, Relation::LessEq, hi_row});
    return lp;
}
}  // namespace

TEST_CASE("one-variable minimum sits on its lower constraint") {
    const LpSolution s = solve_lp(single_var(3.0, 10.0));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.values[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("contradictory constraints are infeasible") {
    CHECK(solve_lp(single_var(3.0, 2.0)).status == LpStatus::Infeasible);
}

TEST_CASE("missing upper bound makes maximization unbounded") {
    LinearProgram lp;
    lp.objective = {-1.0};
    lp.lower = {0.0};
    lp.upper = {kInf};
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("equality rows") {
    LinearProgram lp;
    lp.objective = {1.0, 0.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {kInf, kInf};
    lp.rows.push_back({{1.0, 1.0}, Relation::Eq, 1.0});
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.values[0] == doctest::Approx(0.0));
    CHECK(s.values[1] == doctest::Approx(1.0));

    lp.rows.push_back({{1.0, 1.0}, Relation::Eq, 3.0});
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("variable bounds are handled without explicit rows") {
    LinearProgram lp;
    lp.objective = {-1.0};
    lp.lower = {0.0};
    lp.upper = {5.0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.values[0] == doctest::Approx(5.0));
}

TEST_CASE("free variables are supported") {
    LinearProgram lp;
    lp.objective = {1.0};
    lp.lower = {-kInf};
    lp.upper = {kInf};
    lp.rows.push_back({{-1.0}, Relation::LessEq, 3.0});  // x >= -3
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.values[0] == doctest::Approx(-3.0));
}

TEST_CASE("dimension mismatches fail before solving") {
    LinearProgram lp;
    lp.objective = {1.0, 2.0};
    lp.lower = {0.0};
    lp.upper = {1.0};
    CHECK_THROWS_AS(solve_lp(lp), ValidationError);

    LinearProgram lp2;
    lp2.objective = {1.0};
    lp2.lower = {2.0};
    lp2.upper = {1.0};
    CHECK_THROWS_AS(solve_lp(lp2), ValidationError);

    LinearProgram lp3;
    lp3.objective = {1.0};
    lp3.lower = {0.0};
    lp3.upper = {1.0};
    lp3.rows.push_back({{1.0, 2.0}, Relation::LessEq, 1.0});
    CHECK_THROWS_AS(solve_lp(lp3), ValidationError);
}

TEST_CASE("degenerate pivoting terminates on the classic cycling instance") {
    // Beale's example cycles under naive most-negative pivoting; the
    // smallest-index rule must terminate at objective -1/20.
    LinearProgram lp;
    lp.objective = {-0.75, 150.0, -0.02, 6.0};
    lp.lower.assign(4, 0.0);
    lp.upper.assign(4, kInf);
    lp.rows.push_back({{0.25, -60.0, -1.0 / 25.0, 9.0}, Relation::LessEq, 0.0});
    lp.rows.push_back({{0.5, -90.0, -1.0 / 50.0, 3.0}, Relation::LessEq, 0.0});
    lp.rows.push_back({{0.0, 0.0, 1.0, 0.0}, Relation::LessEq, 1.0});
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("all-zero rows decide feasibility by their right-hand side") {
    LinearProgram lp;
    lp.objective = {1.0};
    lp.lower = {0.0};
    lp.upper = {5.0};
    lp.rows.push_back({{0.0}, Relation::LessEq, 1.0});
    CHECK(solve_lp(lp).status == LpStatus::Optimal);
    lp.rows.push_back({{0.0}, Relation::LessEq, -1.0});
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("duplicate constraints are harmless") {
    LinearProgram lp = single_var(3.0, 10.0);
    lp.rows.push_back(lp.rows[0]);
    lp.rows.push_back(lp.rows[1]);
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.values[0] == doctest::Approx(3.0));
}

TEST_CASE("fixed variables stay put") {
    LinearProgram lp;
    lp.objective = {-1.0, -1.0};
    lp.lower = {2.0, 0.0};
    lp.upper = {2.0, 4.0};
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.values[0] == 2.0);
    CHECK(s.values[1] == doctest::Approx(4.0));
}

TEST_CASE("random LPs agree with a dense grid search") {
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto inst = evcoord::testing::random_box_lp(seed);
        const LpSolution s = solve_lp(inst.lp);
        REQUIRE(s.status == LpStatus::Optimal);  // built around a witness point
        CHECK(lp_row_violation(inst.lp, s.values) <= kLpFeasTol);
        const auto grid = evcoord::testing::grid_lp_minimum(inst.lp, 1e-2);
        REQUIRE(grid.has_value());
        CHECK(s.objective <= *grid + 1e-9);
        CHECK(*grid - s.objective <= 1e-2);
        ++solved;
    }
    CHECK(solved == 100);
}

TEST_CASE("identical input produces identical solutions") {
    const auto inst = evcoord::testing::random_box_lp(1234);
    const LpSolution a = solve_lp(inst.lp);
    const LpSolution b = solve_lp(inst.lp);
    REQUIRE(a.status == b.status);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(a.values[i] == b.values[i]);
    CHECK(a.objective == b.objective);
}

TEST_CASE("lp debug dump mentions every row") {
    const auto inst = evcoord::testing::random_box_lp(5);
    const std::string dump = lp_to_string(inst.lp);
    CHECK(dump.find("min") != std::string::npos);
    CHECK(dump.find("bounds") != std::string::npos);
}
