// Copyright 2026 The nucleo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NUCLEO_NUCLEOLUS_HPP
#define NUCLEO_NUCLEOLUS_HPP

// Nucleolus by the relaxed lexicographic LP hierarchy: level i maximizes the
// minimum excess over coalitions whose incidence vectors are not spanned by
// the coalitions fixed so far. Each level fixes one new coalition, so at most
// n levels are solved. Plus dense reference implementations for small n.

#include "nucleo/hyperdp.hpp"
#include "nucleo/linalg.hpp"
#include "nucleo/lp.hpp"
#include "nucleo/rational.hpp"
#include "nucleo/subspace.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nucleo {

class NucleolusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cooperative game seen through its minimum-excess oracle.
class Game {
public:
    virtual ~Game() = default;

    [[nodiscard]] virtual std::size_t players() const = 0;
    [[nodiscard]] virtual Rational grand_value() const = 0;
    [[nodiscard]] virtual Rational singleton_value(std::size_t i) const = 0;

    /// nu(S) by direct evaluation; may refuse large games.
    [[nodiscard]] virtual Rational value(const Indicator& s) const = 0;

    /// Integral formulation whose paths project onto the nonempty proper
    /// coalitions and whose objective is nu(S) - x(S).
    [[nodiscard]] virtual DpFormulation min_excess_dp(const RationalVector& x) const = 0;

    /// Solution-space coordinate of each player.
    [[nodiscard]] virtual std::vector<std::size_t> coalition_coords() const = 0;
};

/// nu over all coalitions, indexed by bitmask (bit i = player i).
inline std::vector<Rational> explicit_table(const Game& game) {
    const auto n = game.players();
    if (n > 20) throw NucleolusError("too large");
    std::vector<Rational> table(std::size_t{1} << n);
    Indicator s(n);
    for (std::size_t mask = 1; mask < table.size(); ++mask) {
        for (std::size_t i = 0; i < n; ++i) s[i] = (mask >> i) & 1U;
        table[mask] = game.value(s);
    }
    return table;
}

inline Indicator mask_to_indicator(std::uint64_t mask, std::size_t n) {
    Indicator s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (mask >> i) & 1U;
    return s;
}

inline std::uint64_t indicator_to_mask(const Indicator& s) {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) m |= std::uint64_t{1} << i;
    return m;
}

inline Rational coalition_sum(const RationalVector& x, const Indicator& s) {
    Rational t = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) t += x[i];
    return t;
}

// --------------------------------------------------------------------------
// Relaxed hierarchy

struct IterationRecord {
    Rational epsilon;
    Indicator coalition;
    Rational constant;
    std::size_t cuts = 0;             // cuts generated while solving the level
    std::size_t fixedness_tests = 0;  // coalitions tested before one was fixed
    std::size_t rank = 0;             // rank of the fixed vectors afterwards
};

struct NucleolusResult {
    RationalVector allocation;
    std::vector<IterationRecord> iterations;
    std::size_t total_cuts = 0;
    std::size_t lp_rounds = 0;
    std::size_t oracle_calls = 0;
};

struct NucleolusOptions {
    std::ostream* trace = nullptr;
};

/// Separation oracle backed by the game's DP and span avoidance. The
/// formulation for the last queried point is reused across levels.
class MinExcessOracle {
public:
    explicit MinExcessOracle(const Game& game) : game_(game), coords_(game.coalition_coords()) {}

    OracleAnswer operator()(const RationalVector& x, const LazyLevel& level) {
        ++calls_;
        if (!cached_x_ || *cached_x_ != x) {
            cached_ = game_.min_excess_dp(x);
            cached_x_ = x;
        }
        const auto r = solve_avoiding_span(*cached_, level.span_basis, coords_);
        OracleAnswer a;
        if (!r.found) return a;
        a.found = true;
        a.min_excess = -r.value;
        a.coalition = r.coalition;
        a.coalition_value = r.value + coalition_sum(x, r.coalition);
        return a;
    }

    [[nodiscard]] SeparationOracle as_function() {
        return [this](const RationalVector& x, const LazyLevel& level) { return (*this)(x, level); };
    }

    [[nodiscard]] std::size_t calls() const { return calls_; }

private:
    const Game& game_;
    std::vector<std::size_t> coords_;
    std::optional<RationalVector> cached_x_;
    std::optional<DpFormulation> cached_;
    std::size_t calls_ = 0;
};

/// The hierarchy's state between levels.
struct MpsState {
    std::size_t iteration = 0;
    std::vector<Indicator> fixed_vectors;
    RationalVector fixed_values;
    RationalVector thresholds;
    ConstraintSystem region;
};

struct FixedVector {
    Indicator coalition;
    Rational constant;
    std::size_t tests = 0;
};

inline ConstraintSystem initial_system(const Game& game) {
    const auto n = game.players();
    ConstraintSystem sys;
    sys.players = n;
    sys.grand_value = game.grand_value();
    for (std::size_t i = 0; i < n; ++i) sys.singleton_values.push_back(game.singleton_value(i));
    Rational sum = 0;
    for (const auto& v : sys.singleton_values) sum += v;
    if (sys.grand_value < sum) throw NucleolusError("no imputation");
    return sys;
}

/// A coalition outside span(V_{i-1}) whose payoff is constant on the optimal
/// face of level i. `level` indexes the frozen level with span V_{i-1}.
inline FixedVector find_new_fixed_vector(MpsState& state, std::size_t level, RationalVector x_bar,
                                         const Rational& eps_bar, const SeparationOracle& oracle,
                                         const SeparationOptions& opts = {}) {
    FixedVector out;
    for (;;) {
        const auto ans = oracle(x_bar, state.region.levels[level]);
        if (!ans.found) throw NucleolusError("no coalition outside the fixed span");
        if (ans.min_excess != eps_bar) throw NucleolusError("optimal point does not attain the level value");
        ++out.tests;
        RationalVector objective(state.region.players);
        for (std::size_t i = 0; i < objective.size(); ++i)
            if (ans.coalition[i]) objective[i] = 1;
        const auto r = optimize_linear_over_region(state.region, objective, Sense::Maximize, oracle, opts);
        if (r.status != LpStatus::Optimal) throw NucleolusError(std::string("fixedness test ") + to_string(r.status));
        const Rational tight = ans.coalition_value + eps_bar;
        if (r.optimum == tight) {
            out.coalition = ans.coalition;
            out.constant = tight;
            return out;
        }
        for (std::size_t i = 0; i < x_bar.size(); ++i) x_bar[i] = (x_bar[i] + r.point[i]) / Rational(2);
    }
}

/// Least core: the first level's value and an optimal point.
struct LeastCore {
    Rational epsilon;
    RationalVector point;
    std::size_t cuts = 0;
};

inline LeastCore least_core(const Game& game, const NucleolusOptions& options = {}) {
    const auto n = game.players();
    if (n < 2) throw NucleolusError("least core needs at least two players");
    auto sys = initial_system(game);
    MinExcessOracle oracle(game);
    sys.levels.push_back({{Indicator(n, 1)}, std::nullopt, {}});
    RationalVector objective(n + 1);
    objective[n] = 1;
    const auto r = solve_with_separation(sys, objective, oracle.as_function(), {options.trace});
    if (r.status != LpStatus::Optimal) throw NucleolusError(std::string("least core ") + to_string(r.status));
    return {*r.epsilon, r.point, r.new_cuts.size()};
}

inline NucleolusResult compute_nucleolus(const Game& game, const NucleolusOptions& options = {}) {
    const auto n = game.players();
    if (n == 0) throw NucleolusError("game without players");
    MpsState state;
    state.region = initial_system(game);
    NucleolusResult result;
    if (n == 1) {
        result.allocation = {state.region.grand_value};
        return result;
    }

    MinExcessOracle oracle_impl(game);
    const auto oracle = oracle_impl.as_function();
    const SeparationOptions sep{options.trace};
    state.fixed_vectors = {Indicator(n, 1)};
    state.fixed_values = {state.region.grand_value};

    while (rank_over_q(state.fixed_vectors, n) < n) {
        ++state.iteration;
        if (state.iteration > n) throw NucleolusError("hierarchy exceeded n levels");
        const std::size_t level = state.region.levels.size();
        state.region.levels.push_back({state.fixed_vectors, std::nullopt, {}});

        RationalVector objective(n + 1);
        objective[n] = 1;
        const auto r = solve_with_separation(state.region, objective, oracle, sep);
        if (r.status != LpStatus::Optimal) throw NucleolusError(std::string("level LP ") + to_string(r.status));
        const Rational eps = *r.epsilon;
        state.region.levels[level].threshold = eps;
        state.thresholds.push_back(eps);

        auto fv = find_new_fixed_vector(state, level, r.point, eps, oracle, sep);

        state.fixed_vectors.push_back(fv.coalition);
        state.fixed_values.push_back(fv.constant);
        state.region.equalities.push_back({fv.coalition, fv.constant});
        const auto rank = rank_over_q(state.fixed_vectors, n);
        if (rank != state.fixed_vectors.size()) throw NucleolusError("fixed vectors became dependent");

        result.iterations.push_back({eps, fv.coalition, fv.constant, r.new_cuts.size(), fv.tests, rank});
        result.lp_rounds += r.rounds;
    }

    const auto sol =
        solve_linear_system_q(RationalMatrix::from_indicators(state.fixed_vectors, n), state.fixed_values);
    if (!sol.unique()) throw NucleolusError("fixed system does not determine a point");
    result.allocation = sol.solution;
    for (const auto& lv : state.region.levels) result.total_cuts += lv.cuts.size();
    result.oracle_calls = oracle_impl.calls();
    return result;
}

// --------------------------------------------------------------------------
// Dense reference implementations

namespace detail {

// Row-reduced basis of a growing subspace of Q^n.
class SpanTracker {
public:
    explicit SpanTracker(std::size_t n) : n_(n) {}

    [[nodiscard]] bool contains(const RationalVector& v) const { return is_zero(reduce(v)); }

    bool add(const RationalVector& v) {
        auto r = reduce(v);
        std::size_t piv = n_;
        for (std::size_t j = 0; j < n_; ++j)
            if (!r[j].is_zero()) {
                piv = j;
                break;
            }
        if (piv == n_) return false;
        const Rational inv = Rational(1) / r[piv];
        for (auto& e : r) e *= inv;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const Rational f = rows_[k][piv];
            if (f.is_zero()) continue;
            for (std::size_t j = 0; j < n_; ++j) rows_[k][j] -= f * r[j];
        }
        rows_.push_back(std::move(r));
        pivots_.push_back(piv);
        return true;
    }

    [[nodiscard]] std::size_t rank() const { return rows_.size(); }

private:
    [[nodiscard]] RationalVector reduce(RationalVector v) const {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const Rational f = v[pivots_[k]];
            if (f.is_zero()) continue;
            for (std::size_t j = 0; j < n_; ++j)
                if (!rows_[k][j].is_zero()) v[j] -= f * rows_[k][j];
        }
        return v;
    }
    static bool is_zero(const RationalVector& v) {
        return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r.is_zero(); });
    }

    std::size_t n_;
    std::vector<RationalVector> rows_;
    std::vector<std::size_t> pivots_;
};

inline RationalVector mask_row(std::uint64_t mask, std::size_t width) {
    RationalVector row(width);
    for (std::size_t i = 0; i < width && i < 64; ++i)
        if ((mask >> i) & 1U) row[i] = 1;
    return row;
}

}  // namespace detail

struct BruteForceResult {
    RationalVector allocation;
    RationalVector epsilons;
};

/// Full hierarchy with every nonempty proper coalition written out. Fixed
/// coalitions are those in the span of the implicit equalities of the
/// optimal face, found by one maximization per candidate row tight there.
inline BruteForceResult brute_force_nucleolus(std::size_t n, const std::vector<Rational>& table) {
    if (n > 12) throw NucleolusError("too large");
    if (n == 0) throw NucleolusError("game without players");
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    if (table.size() != full + 1) throw NucleolusError("value table has wrong size");
    Rational ir_sum = 0;
    for (std::size_t i = 0; i < n; ++i) ir_sum += table[std::uint64_t{1} << i];
    if (table[full] < ir_sum) throw NucleolusError("no imputation");
    BruteForceResult out;
    if (n == 1) {
        out.allocation = {table[full]};
        return out;
    }

    std::vector<std::optional<Rational>> frozen(full + 1);
    std::vector<bool> fixed(full + 1, false);
    fixed[full] = true;

    using Sense = LinearConstraint::Sense;
    for (std::size_t level = 0;; ++level) {
        if (level > n) throw NucleolusError("hierarchy exceeded n levels");
        // maximize epsilon
        LinearProgram lp{n + 1, RationalVector(n + 1), {}};
        lp.objective[n] = 1;
        lp.add(detail::mask_row(full, n + 1), Sense::Eq, table[full]);
        for (std::size_t i = 0; i < n; ++i) lp.add(detail::mask_row(std::uint64_t{1} << i, n + 1), Sense::Geq, table[std::uint64_t{1} << i]);
        for (std::uint64_t m = 1; m < full; ++m) {
            if (frozen[m]) lp.add(detail::mask_row(m, n + 1), Sense::Geq, table[m] + *frozen[m]);
            if (!fixed[m]) {
                auto row = detail::mask_row(m, n + 1);
                row[n] = -1;
                lp.add(std::move(row), Sense::Geq, table[m]);
            }
        }
        const auto sol = solve(lp);
        if (sol.status != LpStatus::Optimal) throw NucleolusError(std::string("level LP ") + to_string(sol.status));
        const Rational eps = sol.point[n];
        out.epsilons.push_back(eps);
        RationalVector x(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(n));

        for (std::uint64_t m = 1; m < full; ++m)
            if (!fixed[m] && (!frozen[m] || *frozen[m] < eps)) frozen[m] = eps;

        // optimal face: every inequality is now an explicit row in x
        struct Row {
            RationalVector coeffs;
            Rational rhs;
        };
        std::vector<Row> rows;
        for (std::size_t i = 0; i < n; ++i)
            rows.push_back({detail::mask_row(std::uint64_t{1} << i, n), table[std::uint64_t{1} << i]});
        for (std::uint64_t m = 1; m < full; ++m)
            if (frozen[m]) rows.push_back({detail::mask_row(m, n), table[m] + *frozen[m]});

        detail::SpanTracker equalities(n);
        equalities.add(detail::mask_row(full, n));
        std::vector<Row> known;
        for (const auto& row : rows) {
            Rational lhs = 0;
            for (std::size_t i = 0; i < n; ++i) lhs += row.coeffs[i] * x[i];
            if (lhs != row.rhs || equalities.contains(row.coeffs)) continue;
            LinearProgram face{n, row.coeffs, {}};
            face.add(detail::mask_row(full, n), Sense::Eq, table[full]);
            for (const auto& k : known) face.add(k.coeffs, Sense::Eq, k.rhs);
            for (const auto& r : rows) face.add(r.coeffs, Sense::Geq, r.rhs);
            const auto mx = solve(face);
            if (mx.status != LpStatus::Optimal) throw NucleolusError("face LP failed");
            if (mx.value == row.rhs) {
                equalities.add(row.coeffs);
                known.push_back(row);
            }
        }

        if (equalities.rank() == n) {
            out.allocation = std::move(x);
            return out;
        }
        for (std::uint64_t m = 1; m < full; ++m)
            if (!fixed[m] && equalities.contains(detail::mask_row(m, n))) fixed[m] = true;
    }
}

inline RationalVector brute_force_nucleolus_allocation(std::size_t n, const std::vector<Rational>& table) {
    return brute_force_nucleolus(n, table).allocation;
}

struct ExcessEntry {
    Rational excess;
    std::uint64_t coalition = 0;  // bitmask

    friend bool operator==(const ExcessEntry&, const ExcessEntry&) = default;
};

using ExcessProfile = std::vector<ExcessEntry>;

/// All 2^n - 2 excesses x(S) - nu(S), sorted non-decreasing (ties by mask).
inline ExcessProfile excess_profile(std::size_t n, const std::vector<Rational>& table, const RationalVector& x) {
    if (n > 12) throw NucleolusError("too large");
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    if (table.size() != full + 1 || x.size() != n) throw NucleolusError("size mismatch in excess profile");
    ExcessProfile prof;
    if (n < 2) return prof;
    prof.reserve(full - 1);
    for (std::uint64_t m = 1; m < full; ++m) {
        Rational s = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((m >> i) & 1U) s += x[i];
        prof.push_back({s - table[m], m});
    }
    std::sort(prof.begin(), prof.end(), [](const ExcessEntry& a, const ExcessEntry& b) {
        if (a.excess != b.excess) return a.excess < b.excess;
        return a.coalition < b.coalition;
    });
    return prof;
}

/// Lexicographic comparison of the sorted excess values; greater is better.
inline std::strong_ordering compare_profiles(const ExcessProfile& a, const ExcessProfile& b) {
    const auto len = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < len; ++k) {
        const auto c = a[k].excess <=> b[k].excess;
        if (c != 0) return c;
    }
    return a.size() <=> b.size();
}

}  // namespace nucleo

#endif  // NUCLEO_NUCLEOLUS_HPP
