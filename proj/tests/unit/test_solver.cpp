#include "oracles.hpp"
#include "tlmp/solver.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

using namespace tlmp;

namespace {

LpProblem fixed_point() {
    LpBuilder b;
    b.add_variable(0.0, 10.0, 1.0);
    b.add_eq_row({{0, 1.0}}, 5.0);
    return b.build();
}

// minimize 2x + 3y  s.t.  x + y = 10,  0 <= x, y <= 6
LpProblem two_var() {
    LpBuilder b;
    b.add_variable(0.0, 6.0, 2.0);
    b.add_variable(0.0, 6.0, 3.0);
    b.add_eq_row({{0, 1.0}, {1, 1.0}}, 10.0);
    return b.build();
}

bool has(const KktReport& r, KktCondition c, double magnitude, double tol = 1e-9) {
    return std::any_of(r.begin(), r.end(),
                       [&](const KktViolation& v) { return v.condition == c && std::abs(v.magnitude - magnitude) < tol; });
}

}  // namespace

TEST(SolveLp, SingleEqualityForcesSolution) {
    const auto s = solve_lp(fixed_point());
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_DOUBLE_EQ(s.x[0], 5.0);
    EXPECT_DOUBLE_EQ(s.objective_value, 5.0);
    EXPECT_NEAR(s.y_eq[0], 1.0, 1e-12);
}

TEST(SolveLp, TwoVariableVertex) {
    const auto s = solve_lp(two_var());
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.x[0], 6.0, 1e-12);
    EXPECT_NEAR(s.x[1], 4.0, 1e-12);
    EXPECT_NEAR(s.objective_value, 24.0, 1e-12);
    EXPECT_NEAR(s.y_eq[0], 3.0, 1e-12);
    EXPECT_NEAR(s.z_upper[0], 1.0, 1e-12);
    EXPECT_NEAR(s.z_lower[1], 0.0, 1e-12);
}

TEST(SolveLp, ContradictoryEqualitiesAreInfeasible) {
    LpBuilder b;
    b.add_variable(-kInfinity, kInfinity, 1.0);
    b.add_eq_row({{0, 1.0}}, 1.0);
    b.add_eq_row({{0, 1.0}}, 2.0);
    EXPECT_EQ(solve_lp(b.build()).status, LpStatus::Infeasible);
}

TEST(SolveLp, UnboundedRay) {
    LpBuilder b;
    b.add_variable(0.0, kInfinity, -1.0);
    EXPECT_EQ(solve_lp(b.build()).status, LpStatus::Unbounded);
}

TEST(SolveLp, MalformedInputThrows) {
    LpProblem p = two_var();
    p.lower_bounds[0] = 7.0;  // crossed
    EXPECT_THROW(solve_lp(p), MalformedProblem);
    p = two_var();
    p.objective[1] = std::nan("");
    EXPECT_THROW(solve_lp(p), MalformedProblem);
    p = two_var();
    p.eq_rhs.resize(2);
    EXPECT_THROW(solve_lp(p), MalformedProblem);
}

TEST(SolveLp, RedundantEqualityKeepsDuals) {
    LpBuilder b;
    b.add_variable(0.0, 6.0, 2.0);
    b.add_variable(0.0, 6.0, 3.0);
    b.add_eq_row({{0, 1.0}, {1, 1.0}}, 10.0);
    b.add_eq_row({{0, 2.0}, {1, 2.0}}, 20.0);
    const auto p = b.build();
    const auto s = solve_lp(p);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_NEAR(s.objective_value, 24.0, 1e-12);
    EXPECT_TRUE(check_kkt(p, s, 1e-9).empty());
}

TEST(SolveLp, BitIdenticalResolve) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 50; ++i) {
        const auto p = oracle::random_bounded_lp(rng);
        const auto a = solve_lp(p);
        const auto b = solve_lp(p);
        ASSERT_EQ(a.status, b.status);
        ASSERT_EQ(a.x.size(), b.x.size());
        EXPECT_EQ(0, std::memcmp(a.x.data(), b.x.data(), sizeof(double) * static_cast<std::size_t>(a.x.size())));
        EXPECT_EQ(0, std::memcmp(a.y_eq.data(), b.y_eq.data(), sizeof(double) * static_cast<std::size_t>(a.y_eq.size())));
        EXPECT_EQ(a.objective_value, b.objective_value);
    }
}

TEST(CheckKkt, SolverOutputSelfCertifies) {
    for (const auto& p : {fixed_point(), two_var()}) EXPECT_TRUE(check_kkt(p, solve_lp(p), 1e-8).empty());
}

TEST(CheckKkt, PerturbedPrimalIsReported) {
    const auto p = fixed_point();
    auto s = solve_lp(p);
    s.x[0] += 0.1;
    EXPECT_TRUE(has(check_kkt(p, s, 1e-8), KktCondition::PrimalFeasibility, 0.1));
}

TEST(CheckKkt, PerturbedDualIsReported) {
    const auto p = two_var();
    auto s = solve_lp(p);
    s.y_eq[0] = 2.9;
    const auto r = check_kkt(p, s, 1e-8);
    const auto it = std::find_if(r.begin(), r.end(), [](const KktViolation& v) { return v.where == "x[1]"; });
    ASSERT_NE(it, r.end());
    EXPECT_EQ(it->condition, KktCondition::Stationarity);
    EXPECT_NEAR(it->magnitude, 0.1, 1e-9);
}

TEST(CheckKkt, NegativeMultiplierIsDualInfeasible) {
    const auto p = two_var();
    auto s = solve_lp(p);
    s.z_upper[0] = -1.0;
    s.z_lower[0] = 0.0;
    EXPECT_TRUE(has(check_kkt(p, s, 1e-8), KktCondition::DualFeasibility, 1.0));
}

TEST(EnumerateVertices, TwoVariableMinimum) {
    const auto v = enumerate_vertices(two_var());
    ASSERT_NE(v.best(), nullptr);
    EXPECT_NEAR(v.best()->objective, 24.0, 1e-12);
    EXPECT_NEAR(v.best()->x[0], 6.0, 1e-12);
    EXPECT_NEAR(v.best()->x[1], 4.0, 1e-12);
    EXPECT_FALSE(v.unbounded);
}

TEST(EnumerateVertices, SingleVertex) {
    const auto v = enumerate_vertices(fixed_point());
    ASSERT_EQ(v.vertices.size(), 1u);
    EXPECT_DOUBLE_EQ(v.vertices[0].x[0], 5.0);
}

TEST(EnumerateVertices, UnboundedIsMarkedNotThrown) {
    LpBuilder b;
    b.add_variable(0.0, kInfinity, -1.0);
    VertexEnumeration v;
    EXPECT_NO_THROW(v = enumerate_vertices(b.build()));
    EXPECT_TRUE(v.unbounded);
}

TEST(EnumerateVertices, TooManyVariables) {
    LpBuilder b;
    for (int i = 0; i < 7; ++i) b.add_variable(0.0, 1.0, 1.0);
    EXPECT_THROW(enumerate_vertices(b.build()), TooLarge);
}

TEST(SolveLp, MatchesVertexOracleOnRandomLps) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const auto p = oracle::random_bounded_lp(rng);
        const auto s = solve_lp(p);
        const auto v = enumerate_vertices(p);
        ASSERT_EQ(s.status, LpStatus::Optimal) << "case " << i;
        ASSERT_NE(v.best(), nullptr);
        const double scale = std::max(1.0, std::abs(v.best()->objective));
        EXPECT_LE(std::abs(s.objective_value - v.best()->objective), 1e-8 * scale) << "case " << i;
        EXPECT_LE(std::abs(s.objective_value - oracle::dual_objective(p, s)), 1e-8 * scale) << "case " << i;
        EXPECT_TRUE(check_kkt(p, s, 1e-7).empty()) << "case " << i;
    }
}

TEST(EqDualRanges, UniqueAndNonUniqueDuals) {
    // Unique: the two-variable problem has y = 3 only.
    {
        const auto p = two_var();
        const auto r = eq_dual_ranges(p, solve_lp(p), {0});
        EXPECT_NEAR(r[0].lo, 3.0, 1e-9);
        EXPECT_NEAR(r[0].hi, 3.0, 1e-9);
    }
    // x + y = 12 with both at their upper bound 6: any y_eq >= 3 works.
    {
        LpBuilder b;
        b.add_variable(0.0, 6.0, 2.0);
        b.add_variable(0.0, 6.0, 3.0);
        b.add_eq_row({{0, 1.0}, {1, 1.0}}, 12.0);
        const auto p = b.build();
        const auto r = eq_dual_ranges(p, solve_lp(p), {0});
        EXPECT_NEAR(r[0].lo, 3.0, 1e-9);
        EXPECT_TRUE(is_infinite(r[0].hi));
    }
}
