#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace nucleo;

namespace {

RationalVector frac(std::initializer_list<std::pair<long, long>> v) {
    RationalVector out;
    for (const auto& [p, q] : v) out.emplace_back(p, q);
    return out;
}

std::vector<Rational> majority_table() {
    std::vector<Rational> t(8);
    for (std::uint64_t m = 0; m < 8; ++m) t[m] = std::popcount(m) >= 2 ? 1 : 0;
    return t;
}

// max and min of x(S) over the least core, with every coalition explicit
std::pair<Rational, Rational> dense_range(std::size_t n, const std::vector<Rational>& table, const Rational& eps,
                                          std::uint64_t mask) {
    using Rel = LinearConstraint::Sense;
    LinearProgram lp{n, detail::mask_row(mask, n), {}};
    const std::uint64_t full = table.size() - 1;
    lp.add(detail::mask_row(full, n), Rel::Eq, table[full]);
    for (std::size_t i = 0; i < n; ++i) lp.add(detail::mask_row(std::uint64_t{1} << i, n), Rel::Geq, table[std::uint64_t{1} << i]);
    for (std::uint64_t m = 1; m < full; ++m) lp.add(detail::mask_row(m, n), Rel::Geq, table[m] + eps);
    const auto hi = solve(lp);
    for (auto& v : lp.objective) v = -v;
    const auto lo = solve(lp);
    return {hi.value, -lo.value};
}

}  // namespace

TEST(BruteForceNucleolus, Examples) {
    EXPECT_EQ(brute_force_nucleolus_allocation(2, {0, 0, 0, 1}), frac({{1, 2}, {1, 2}}));
    EXPECT_EQ(brute_force_nucleolus_allocation(3, majority_table()), frac({{1, 3}, {1, 3}, {1, 3}}));
    EXPECT_EQ(brute_force_nucleolus_allocation(1, {0, 5}), (RationalVector{5}));
    EXPECT_THROW(brute_force_nucleolus(13, {}), NucleolusError);
    EXPECT_THROW(brute_force_nucleolus(2, {0, 1, 1, 1}), NucleolusError);
}

TEST(ComputeNucleolus, MajorityGame) {
    const VotingGame g({1, 1, 1}, 2);
    const auto r = compute_nucleolus(g);
    EXPECT_EQ(r.allocation, frac({{1, 3}, {1, 3}, {1, 3}}));
    ASSERT_FALSE(r.iterations.empty());
    EXPECT_EQ(r.iterations.front().epsilon, Rational(-1, 3));
}

TEST(ComputeNucleolus, WeightedThreePlayerMatchesBruteForce) {
    const VotingGame g({3, 1, 1}, 4);
    const auto r = compute_nucleolus(g);
    EXPECT_EQ(r.allocation, brute_force_nucleolus_allocation(3, explicit_table(g)));
}

TEST(ComputeNucleolus, PathMatchingGame) {
    const BMatchingGame g(WeightedGraph{3, {{0, 1, 1}, {1, 2, 1}}, {1, 1, 1}});
    EXPECT_EQ(compute_nucleolus(g).allocation, (RationalVector{0, 1, 0}));
}

TEST(ComputeNucleolus, FrozenVotingValues) {
    // values from tests/oracles/nucleolus_oracle.py
    struct Case {
        std::vector<long> w;
        long t;
        RationalVector expected;
        Rational first_eps;
    };
    const std::vector<Case> cases{
        {{3, 1, 1}, 4, {1, 0, 0}, 0},
        {{4, 3, 2, 1}, 6, frac({{1, 3}, {1, 3}, {1, 3}, {0, 1}}), Rational(-1, 3)},
        {{5, 3, 3, 1, 1}, 7, frac({{1, 3}, {2, 9}, {2, 9}, {1, 9}, {1, 9}}), Rational(-4, 9)},
        {{2, 2, 1, 1, 1}, 4, frac({{2, 7}, {2, 7}, {1, 7}, {1, 7}, {1, 7}}), Rational(-3, 7)},
    };
    for (const auto& c : cases) {
        const VotingGame g(c.w, c.t);
        const auto r = compute_nucleolus(g);
        EXPECT_EQ(r.allocation, c.expected);
        EXPECT_EQ(r.iterations.front().epsilon, c.first_eps);
        EXPECT_EQ(brute_force_nucleolus(g.players(), explicit_table(g)).epsilons.front(), c.first_eps);
    }
}

TEST(ComputeNucleolus, FrozenMatchingValues) {
    // values from tests/oracles/nucleolus_oracle.py
    const BMatchingGame cycle(WeightedGraph{4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}}, {1, 1, 1, 1}});
    const auto rc = compute_nucleolus(cycle);
    EXPECT_EQ(rc.allocation, frac({{1, 2}, {1, 2}, {1, 2}, {1, 2}}));
    EXPECT_EQ(brute_force_nucleolus(4, explicit_table(cycle)).epsilons, frac({{0, 1}, {1, 2}}));

    const BMatchingGame path(WeightedGraph{4, {{0, 1, 2}, {1, 2, 3}, {2, 3, 2}}, {1, 1, 1, 1}});
    EXPECT_EQ(compute_nucleolus(path).allocation, frac({{1, 3}, {5, 3}, {5, 3}, {1, 3}}));

    const BMatchingGame star(WeightedGraph{4, {{0, 1, 1}, {0, 2, 2}, {0, 3, 3}}, {2, 1, 1, 1}});
    EXPECT_EQ(compute_nucleolus(star).allocation, frac({{7, 2}, {0, 1}, {1, 2}, {1, 1}}));

    const BMatchingGame triangle(WeightedGraph{3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}, {1, 1, 1}});
    const auto rt = compute_nucleolus(triangle);
    EXPECT_EQ(rt.allocation, frac({{1, 3}, {1, 3}, {1, 3}}));
    EXPECT_EQ(rt.iterations.front().epsilon, Rational(-1, 3));
}

TEST(ComputeNucleolus, SinglePlayerAndNoImputation) {
    EXPECT_EQ(compute_nucleolus(VotingGame({4}, 2)).allocation, (RationalVector{1}));
    EXPECT_THROW(compute_nucleolus(VotingGame({1, 1, 0}, 1)), NucleolusError);
}

TEST(ComputeNucleolus, TableGamesMatchBruteForce) {
    std::mt19937_64 rng(61);
    int solved = 0;
    while (solved < 60) {
        const std::size_t n = 2 + rng() % 4;
        auto table = fixtures::random_table(rng, n);
        table.back() = Rational(static_cast<long>(3 * n));
        const fixtures::TableGame g(n, table);
        BruteForceResult brute;
        try {
            brute = brute_force_nucleolus(n, table);
        } catch (const NucleolusError&) {
            continue;
        }
        const auto r = compute_nucleolus(g);
        EXPECT_EQ(r.allocation, brute.allocation);
        ++solved;
    }
}

TEST(ComputeNucleolus, IterationsIncreaseRankByOne) {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = fixtures::random_voting_game(rng, 3 + rng() % 4);
        const auto r = compute_nucleolus(g);
        EXPECT_LE(r.iterations.size(), g.players());
        std::size_t prev = 1;
        std::vector<Indicator> fixed{Indicator(g.players(), 1)};
        for (const auto& it : r.iterations) {
            EXPECT_EQ(it.rank, prev + 1);
            prev = it.rank;
            fixed.push_back(it.coalition);
            EXPECT_EQ(rank_over_q(fixed, g.players()), fixed.size());
            EXPECT_EQ(coalition_sum(r.allocation, it.coalition), it.constant);
        }
        EXPECT_EQ(prev, g.players());
    }
}

TEST(ComputeNucleolus, LevelValuesAreCertified) {
    // at the nucleolus, every coalition outside the span of earlier fixed
    // vectors has excess at least that level's value
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = fixtures::random_voting_game(rng, 3 + rng() % 3);
        const auto n = g.players();
        const auto r = compute_nucleolus(g);
        const auto table = explicit_table(g);
        std::vector<Indicator> span{Indicator(n, 1)};
        for (const auto& it : r.iterations) {
            for (std::uint64_t m = 1; m + 1 < table.size(); ++m) {
                const auto s = mask_to_indicator(m, n);
                if (in_span_over_q(s, span)) continue;
                EXPECT_GE(coalition_sum(r.allocation, s) - table[m], it.epsilon);
            }
            span.push_back(it.coalition);
        }
    }
}

TEST(FindNewFixedVector, SingletonRegionFixesFirstCandidate) {
    const VotingGame g({1, 1, 1}, 2);
    MinExcessOracle oracle(g);
    MpsState state;
    state.region = initial_system(g);
    state.region.levels.push_back({{Indicator(3, 1)}, Rational(-1, 3), {}});
    const auto fv = find_new_fixed_vector(state, 0, frac({{1, 3}, {1, 3}, {1, 3}}), Rational(-1, 3),
                                          oracle.as_function());
    EXPECT_EQ(fv.tests, 1U);
    EXPECT_EQ(std::count(fv.coalition.begin(), fv.coalition.end(), 1), 2);
    EXPECT_EQ(fv.constant, Rational(2, 3));
}

TEST(FindNewFixedVector, ResultIsFixedOnTheLeastCore) {
    std::mt19937_64 rng(64);
    int checked = 0;
    while (checked < 40) {
        const std::size_t n = 3 + rng() % 2;
        auto table = fixtures::random_table(rng, n, 4);
        table.back() = Rational(static_cast<long>(2 * n));
        const fixtures::TableGame g(n, table);
        MpsState state;
        try {
            state.region = initial_system(g);
        } catch (const NucleolusError&) {
            continue;
        }
        state.region.levels.push_back({{Indicator(n, 1)}, std::nullopt, {}});
        const auto oracle = fixtures::table_oracle(n, table);
        RationalVector obj(n + 1);
        obj[n] = 1;
        const auto r = solve_with_separation(state.region, obj, oracle);
        ASSERT_EQ(r.status, LpStatus::Optimal);
        state.region.levels[0].threshold = *r.epsilon;
        const auto fv = find_new_fixed_vector(state, 0, r.point, *r.epsilon, oracle);
        const auto [hi, lo] = dense_range(n, table, *r.epsilon, indicator_to_mask(fv.coalition));
        EXPECT_EQ(hi, fv.constant);
        EXPECT_EQ(lo, fv.constant);
        ++checked;
    }
}

TEST(LeastCore, MajorityGame) {
    const auto lc = least_core(VotingGame({1, 1, 1}, 2));
    EXPECT_EQ(lc.epsilon, Rational(-1, 3));
    EXPECT_EQ(lc.point, frac({{1, 3}, {1, 3}, {1, 3}}));
    EXPECT_THROW(least_core(VotingGame({1}, 1)), NucleolusError);
}

TEST(ExcessProfile, Examples) {
    const auto table = majority_table();
    const auto prof = excess_profile(3, table, frac({{1, 3}, {1, 3}, {1, 3}}));
    ASSERT_EQ(prof.size(), 6U);
    EXPECT_EQ(prof.front().excess, Rational(-1, 3));
    EXPECT_TRUE(std::is_sorted(prof.begin(), prof.end(),
                               [](const ExcessEntry& a, const ExcessEntry& b) { return a.excess < b.excess; }));

    // nu(S) = x(S) for every S
    const RationalVector x = frac({{1, 2}, {3, 4}, {-1, 5}, {2, 1}});
    std::vector<Rational> shifted(16);
    for (std::uint64_t m = 0; m < 16; ++m) shifted[m] = coalition_sum(x, mask_to_indicator(m, 4));
    const auto zero = excess_profile(4, shifted, x);
    EXPECT_EQ(zero.size(), 14U);
    for (const auto& e : zero) EXPECT_TRUE(e.excess.is_zero());
}

TEST(ExcessProfile, NucleolusDominatesRandomImputations) {
    std::mt19937_64 rng(65);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = fixtures::random_voting_game(rng, 3 + rng() % 4);
        const auto n = g.players();
        const auto table = explicit_table(g);
        const auto x = compute_nucleolus(g).allocation;
        const auto best = excess_profile(n, table, x);
        for (int k = 0; k < 100; ++k) {
            const auto y = fixtures::random_imputation(rng, n, table);
            EXPECT_NE(compare_profiles(best, excess_profile(n, table, y)), std::strong_ordering::less);
        }
    }
}

TEST(ExcessProfile, ComparisonIsLexicographic) {
    const ExcessProfile a{{Rational(-1), 1}, {Rational(2), 2}};
    const ExcessProfile b{{Rational(-1), 2}, {Rational(3), 1}};
    EXPECT_EQ(compare_profiles(a, b), std::strong_ordering::less);
    EXPECT_EQ(compare_profiles(b, a), std::strong_ordering::greater);
    EXPECT_EQ(compare_profiles(a, a), std::strong_ordering::equal);
}
