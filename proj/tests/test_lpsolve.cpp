#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace nucleo;

namespace {

using Rel = LinearConstraint::Sense;

ConstraintSystem base_system(std::size_t n, const std::vector<Rational>& table) {
    ConstraintSystem sys;
    sys.players = n;
    sys.grand_value = table.back();
    for (std::size_t i = 0; i < n; ++i) sys.singleton_values.push_back(table[std::size_t{1} << i]);
    return sys;
}

RationalVector maximize_epsilon(std::size_t n) {
    RationalVector obj(n + 1);
    obj[n] = 1;
    return obj;
}

// Dense least-core LP: every proper nonempty coalition explicit.
LpSolution dense_least_core(std::size_t n, const std::vector<Rational>& table) {
    LinearProgram lp{n + 1, maximize_epsilon(n), {}};
    RationalVector eff(n + 1);
    for (std::size_t i = 0; i < n; ++i) eff[i] = 1;
    lp.add(eff, Rel::Eq, table.back());
    for (std::size_t i = 0; i < n; ++i) {
        RationalVector row(n + 1);
        row[i] = 1;
        lp.add(row, Rel::Geq, table[std::size_t{1} << i]);
    }
    for (std::uint64_t m = 1; m + 1 < table.size(); ++m) {
        RationalVector row(n + 1);
        for (std::size_t i = 0; i < n; ++i)
            if ((m >> i) & 1U) row[i] = 1;
        row[n] = -1;
        lp.add(row, Rel::Geq, table[m]);
    }
    return solve(lp);
}

std::vector<Rational> majority_table() {
    // w = (1,1,1), T = 2
    std::vector<Rational> t(8);
    for (std::uint64_t m = 0; m < 8; ++m) t[m] = std::popcount(m) >= 2 ? 1 : 0;
    return t;
}

}  // namespace

TEST(Simplex, SymmetricTwoPlayerEpsilon) {
    // max eps s.t. x1 + x2 = 1, x >= 0, eps <= x_i
    LinearProgram lp{3, {0, 0, 1}, {}};
    lp.add({1, 1, 0}, Rel::Eq, 1);
    lp.add({1, 0, 0}, Rel::Geq, 0);
    lp.add({0, 1, 0}, Rel::Geq, 0);
    lp.add({1, 0, -1}, Rel::Geq, 0);
    lp.add({0, 1, -1}, Rel::Geq, 0);
    const auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_EQ(s.value, Rational(1, 2));
    EXPECT_EQ(s.point, (RationalVector{Rational(1, 2), Rational(1, 2), Rational(1, 2)}));
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
    LinearProgram bad{1, {1}, {}};
    bad.add({1}, Rel::Geq, 2);
    bad.add({1}, Rel::Leq, 1);
    EXPECT_EQ(solve(bad).status, LpStatus::Infeasible);

    LinearProgram open{2, {1, 1}, {}};
    open.add({1, -1}, Rel::Eq, 0);
    EXPECT_EQ(solve(open).status, LpStatus::Unbounded);
}

TEST(Simplex, FreeVariablesAndMixedSenses) {
    // min x + y (as max -x - y) s.t. x - y = 3, y >= -2, x <= 10
    LinearProgram lp{2, {-1, -1}, {}};
    lp.add({1, -1}, Rel::Eq, 3);
    lp.add({0, 1}, Rel::Geq, -2);
    lp.add({1, 0}, Rel::Leq, 10);
    const auto s = solve(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_EQ(s.value, Rational(1));
    EXPECT_EQ(s.point, (RationalVector{1, -2}));
}

TEST(Simplex, RandomProgramsAttainTheirOptimum) {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t vars = 1 + rng() % 4;
        LinearProgram lp{vars, {}, {}};
        for (std::size_t j = 0; j < vars; ++j) lp.objective.emplace_back(static_cast<long>(rng() % 7) - 3);
        // a box keeps it bounded
        for (std::size_t j = 0; j < vars; ++j) {
            RationalVector row(vars);
            row[j] = 1;
            lp.add(row, Rel::Leq, 5);
            lp.add(row, Rel::Geq, -5);
        }
        for (std::size_t k = 0, m = rng() % 4; k < m; ++k) {
            RationalVector row(vars);
            for (auto& v : row) v = Rational(static_cast<long>(rng() % 5) - 2);
            lp.add(row, rng() & 1U ? Rel::Geq : Rel::Leq, Rational(static_cast<long>(rng() % 7) - 3));
        }
        const auto s = solve(lp);
        if (s.status != LpStatus::Optimal) {
            EXPECT_EQ(s.status, LpStatus::Infeasible);
            continue;
        }
        Rational v = 0;
        for (std::size_t j = 0; j < vars; ++j) v += lp.objective[j] * s.point[j];
        EXPECT_EQ(v, s.value);
        for (const auto& c : lp.constraints) {
            Rational lhs = 0;
            for (std::size_t j = 0; j < vars; ++j) lhs += c.coeffs[j] * s.point[j];
            switch (c.sense) {
                case Rel::Geq: EXPECT_GE(lhs, c.rhs); break;
                case Rel::Leq: EXPECT_LE(lhs, c.rhs); break;
                case Rel::Eq: EXPECT_EQ(lhs, c.rhs); break;
            }
        }
    }
}

TEST(SolveWithSeparation, TwoPlayerLeastCore) {
    const std::vector<Rational> table{0, 0, 0, 1};
    auto sys = base_system(2, table);
    sys.levels.push_back({{{1, 1}}, std::nullopt, {}});
    const auto r = solve_with_separation(sys, maximize_epsilon(2), fixtures::table_oracle(2, table));
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(*r.epsilon, Rational(1, 2));
    EXPECT_EQ(r.point, (RationalVector{Rational(1, 2), Rational(1, 2)}));
}

TEST(SolveWithSeparation, MajorityLeastCore) {
    const auto table = majority_table();
    auto sys = base_system(3, table);
    sys.levels.push_back({{{1, 1, 1}}, std::nullopt, {}});
    const auto r = solve_with_separation(sys, maximize_epsilon(3), fixtures::table_oracle(3, table));
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.optimum, Rational(-1, 3));
    for (std::uint64_t m : {3, 5, 6})
        EXPECT_EQ(coalition_sum(r.point, mask_to_indicator(m, 3)) - table[m], Rational(-1, 3));
    EXPECT_EQ(r.point, (RationalVector{Rational(1, 3), Rational(1, 3), Rational(1, 3)}));
}

TEST(SolveWithSeparation, NoViolationMeansOneSolveAndNoCuts) {
    const auto table = majority_table();
    auto sys = base_system(3, table);
    sys.levels.push_back({{{1, 1, 1}}, Rational(-1, 3), {}});
    RationalVector obj(3);
    const auto r = solve_with_separation(sys, obj, [&](const RationalVector& x, const LazyLevel& level) {
        auto ans = fixtures::table_oracle(3, table)(x, level);
        ans.min_excess = Rational(100);
        return ans;
    });
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.rounds, 1U);
    EXPECT_TRUE(r.new_cuts.empty());
}

TEST(SolveWithSeparation, InfeasibleWithoutImputation) {
    // nu({i}) = 1 for all i but nu(N) = 1
    std::vector<Rational> table{0, 1, 1, 1, 1, 1, 1, 1};
    auto sys = base_system(3, table);
    sys.levels.push_back({{{1, 1, 1}}, std::nullopt, {}});
    const auto r = solve_with_separation(sys, maximize_epsilon(3), fixtures::table_oracle(3, table));
    EXPECT_EQ(r.status, LpStatus::Infeasible);
}

TEST(SolveWithSeparation, TraceLinePerCut) {
    const auto table = majority_table();
    auto sys = base_system(3, table);
    sys.levels.push_back({{{1, 1, 1}}, std::nullopt, {}});
    std::ostringstream trace;
    const auto r = solve_with_separation(sys, maximize_epsilon(3), fixtures::table_oracle(3, table), {&trace});
    const auto text = trace.str();
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), r.new_cuts.size());
    EXPECT_EQ(text.rfind("level 1: add S = {", 0), 0U);
    EXPECT_NE(text.find("< threshold"), std::string::npos);
}

TEST(SolveWithSeparation, AgreesWithDenseLp) {
    std::mt19937_64 rng(52);
    int solved = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 2 + rng() % 5;
        auto table = fixtures::random_table(rng, n);
        table.back() = Rational(static_cast<long>(n) * 3);
        const auto dense = dense_least_core(n, table);
        auto sys = base_system(n, table);
        sys.levels.push_back({{Indicator(n, 1)}, std::nullopt, {}});
        const auto r = solve_with_separation(sys, maximize_epsilon(n), fixtures::table_oracle(n, table));
        ASSERT_EQ(r.status, dense.status);
        if (r.status != LpStatus::Optimal) continue;
        ++solved;
        EXPECT_EQ(r.optimum, dense.value);
        // the point attains the optimum and satisfies every coalition constraint
        for (std::uint64_t m = 1; m + 1 < table.size(); ++m)
            EXPECT_GE(coalition_sum(r.point, mask_to_indicator(m, n)) - table[m], *r.epsilon);
        // idempotence: the explicit relaxation with all cuts reproduces the optimum
        EXPECT_EQ(solve(sys.relaxation(maximize_epsilon(n))).value, r.optimum);
        // no coalition is cut twice
        std::set<std::vector<std::uint8_t>> seen;
        for (const auto& c : sys.levels[0].cuts) EXPECT_TRUE(seen.insert(c.coalition).second);
    }
    EXPECT_GT(solved, 50);
}

TEST(OptimizeLinearOverRegion, SingletonRegion) {
    const auto table = majority_table();
    auto sys = base_system(3, table);
    sys.levels.push_back({{{1, 1, 1}}, Rational(-1, 3), {}});
    const auto oracle = fixtures::table_oracle(3, table);
    const auto hi = optimize_linear_over_region(sys, {1, 0, 0}, Sense::Maximize, oracle);
    const auto lo = optimize_linear_over_region(sys, {1, 0, 0}, Sense::Minimize, oracle);
    EXPECT_EQ(hi.optimum, Rational(1, 3));
    EXPECT_EQ(lo.optimum, Rational(1, 3));
}

TEST(OptimizeLinearOverRegion, PairValueOverMajorityLeastCore) {
    const auto table = majority_table();
    auto sys = base_system(3, table);
    sys.levels.push_back({{{1, 1, 1}}, Rational(-1, 3), {}});
    const auto oracle = fixtures::table_oracle(3, table);
    const auto hi = optimize_linear_over_region(sys, {1, 1, 0}, Sense::Maximize, oracle);
    const auto lo = optimize_linear_over_region(sys, {1, 1, 0}, Sense::Minimize, oracle);
    ASSERT_EQ(hi.status, LpStatus::Optimal);
    EXPECT_EQ(hi.optimum, Rational(2, 3));
    EXPECT_EQ(lo.optimum, hi.optimum);
}

TEST(OptimizeLinearOverRegion, RejectsFreeEpsilon) {
    const auto table = majority_table();
    auto sys = base_system(3, table);
    sys.levels.push_back({{{1, 1, 1}}, std::nullopt, {}});
    EXPECT_THROW(optimize_linear_over_region(sys, {1, 0, 0}, Sense::Maximize, fixtures::table_oracle(3, table)),
                 LpError);
}

TEST(ConstraintSystem, AtMostOneFreeLevel) {
    ConstraintSystem sys;
    sys.players = 2;
    sys.levels.push_back({{}, std::nullopt, {}});
    EXPECT_TRUE(sys.has_free_epsilon());
    EXPECT_EQ(sys.variable_count(), 3U);
    sys.levels.push_back({{}, std::nullopt, {}});
    EXPECT_THROW((void)sys.has_free_epsilon(), LpError);
}
