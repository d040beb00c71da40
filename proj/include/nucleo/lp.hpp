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

#ifndef NUCLEO_LP_HPP
#define NUCLEO_LP_HPP

// Exact rational linear programming.
//
// The programs solved here have few variables (players plus epsilon) and
// many constraints. The primal max{c.z : A z >= b, E z = f} is solved through
// its dual in standard form, min{-b.y : -A^T y = c, y >= 0}, whose tableau has
// one row per primal variable. The primal optimum is read off the dual's
// simplex multipliers.

#include "nucleo/linalg.hpp"
#include "nucleo/rational.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nucleo {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

class LpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearConstraint {
    enum class Sense { Geq, Leq, Eq };
    RationalVector coeffs;
    Sense sense = Sense::Geq;
    Rational rhs;
};

/// max objective.z subject to the constraints, z free.
struct LinearProgram {
    std::size_t variables = 0;
    RationalVector objective;
    std::vector<LinearConstraint> constraints;

    void add(RationalVector coeffs, LinearConstraint::Sense sense, Rational rhs) {
        if (coeffs.size() != variables) throw LpError("constraint has wrong width");
        constraints.push_back({std::move(coeffs), sense, std::move(rhs)});
    }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    RationalVector point;
    std::size_t pivots = 0;
};

namespace detail {

// min d.y s.t. M y = rhs, y >= 0, by two-phase tableau simplex with Bland's
// rule. Columns are stored densely; artificials occupy the last m columns.
class StandardSimplex {
public:
    StandardSimplex(std::size_t rows, std::size_t cols, std::vector<RationalVector> column_data, RationalVector costs,
                    RationalVector rhs)
        : m_(rows), n_(cols), width_(cols + rows), tab_(rows * (cols + rows)), rhs_(std::move(rhs)),
          cost_(std::move(costs)), basis_(rows), flipped_(rows, false) {
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = 0; i < m_; ++i) at(i, j) = column_data[j][i];
        for (std::size_t i = 0; i < m_; ++i) {
            if (rhs_[i].sign() < 0) {
                flipped_[i] = true;
                rhs_[i] = -rhs_[i];
                for (std::size_t j = 0; j < n_; ++j)
                    if (!at(i, j).is_zero()) at(i, j) = -at(i, j);
            }
            at(i, n_ + i) = 1;
            basis_[i] = n_ + i;
        }
    }

    enum class Outcome { Optimal, Infeasible, Unbounded };

    Outcome run() {
        // phase 1: minimize the sum of artificials
        RationalVector phase1(width_);
        for (std::size_t i = 0; i < m_; ++i) phase1[n_ + i] = 1;
        load_objective(phase1);
        if (!iterate(/*allow_artificial=*/true)) throw LpError("phase 1 cannot be unbounded");
        if (obj_value_.sign() != 0) return Outcome::Infeasible;
        drive_out_artificials();

        RationalVector phase2(width_);
        for (std::size_t j = 0; j < n_; ++j) phase2[j] = cost_[j];
        load_objective(phase2);
        if (!iterate(/*allow_artificial=*/false)) return Outcome::Unbounded;
        return Outcome::Optimal;
    }

    /// Simplex multipliers pi with M^T pi <= d and rhs.pi = optimum.
    [[nodiscard]] RationalVector multipliers() const {
        RationalVector pi(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            // reduced cost of artificial i is 0 - pi'_i for the sign-adjusted row
            Rational v = -obj_[n_ + i];
            pi[i] = flipped_[i] ? -v : v;
        }
        return pi;
    }

    /// Current objective value of the phase-2 problem.
    [[nodiscard]] Rational value() const { return -obj_value_; }

    [[nodiscard]] std::size_t pivots() const { return pivots_; }

private:
    Rational& at(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
    [[nodiscard]] const Rational& at(std::size_t i, std::size_t j) const { return tab_[i * width_ + j]; }

    // obj_[j] = reduced cost c_j - c_B B^-1 a_j; obj_value_ = -c_B B^-1 b
    void load_objective(const RationalVector& c) {
        obj_ = c;
        obj_value_ = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            const Rational cb = c[basis_[i]];
            if (cb.is_zero()) continue;
            for (std::size_t j = 0; j < width_; ++j)
                if (!at(i, j).is_zero()) obj_[j] -= cb * at(i, j);
            obj_value_ -= cb * rhs_[i];
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        ++pivots_;
        const Rational inv = Rational(1) / at(row, col);
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < width_; ++j) {
            if (at(row, j).is_zero()) continue;
            at(row, j) *= inv;
            nz.push_back(j);
        }
        rhs_[row] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row || at(i, col).is_zero()) continue;
            const Rational f = at(i, col);
            for (auto j : nz) at(i, j) -= f * at(row, j);
            rhs_[i] -= f * rhs_[row];
        }
        if (!obj_[col].is_zero()) {
            const Rational f = obj_[col];
            for (auto j : nz) obj_[j] -= f * at(row, j);
            obj_value_ -= f * rhs_[row];
        }
        basis_[row] = col;
    }

    // Bland's rule: lowest-index improving column, lowest-index basic variable
    // among tied ratios. Returns false when unbounded.
    bool iterate(bool allow_artificial) {
        const std::size_t limit = allow_artificial ? width_ : n_;
        for (;;) {
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j)
                if (obj_[j].sign() < 0) {
                    enter = j;
                    break;
                }
            if (enter == limit) return true;
            std::size_t leave = m_;
            Rational best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (at(i, enter).sign() <= 0) continue;
                Rational ratio = rhs_[i] / at(i, enter);
                if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    best = std::move(ratio);
                    leave = i;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            for (std::size_t j = 0; j < n_; ++j)
                if (!at(i, j).is_zero()) {
                    pivot(i, j);
                    break;
                }
            // a row with no structural entry is redundant and keeps its artificial at zero
        }
    }

    std::size_t m_, n_, width_;
    std::vector<Rational> tab_;
    RationalVector rhs_;
    RationalVector cost_;
    std::vector<std::size_t> basis_;
    std::vector<bool> flipped_;
    RationalVector obj_;
    Rational obj_value_;
    std::size_t pivots_ = 0;
};

inline LpSolution solve_through_dual(const LinearProgram& lp, const RationalVector& objective) {
    const std::size_t m = lp.variables;
    std::vector<RationalVector> cols;
    RationalVector costs;
    for (const auto& c : lp.constraints) {
        // orient as a.z >= b
        const bool neg = c.sense == LinearConstraint::Sense::Leq;
        RationalVector col(m);
        for (std::size_t k = 0; k < m; ++k) col[k] = neg ? c.coeffs[k] : -c.coeffs[k];
        const Rational cost = neg ? c.rhs : -c.rhs;
        if (c.sense == LinearConstraint::Sense::Eq) {
            RationalVector mirrored(m);
            for (std::size_t k = 0; k < m; ++k) mirrored[k] = -col[k];
            cols.push_back(std::move(col));
            costs.push_back(cost);
            cols.push_back(std::move(mirrored));
            costs.push_back(-cost);
        } else {
            cols.push_back(std::move(col));
            costs.push_back(cost);
        }
    }
    const std::size_t width = cols.size();
    StandardSimplex sx(m, width, std::move(cols), std::move(costs), objective);
    const auto outcome = sx.run();
    LpSolution sol;
    sol.pivots = sx.pivots();
    if (outcome == StandardSimplex::Outcome::Unbounded) {
        sol.status = LpStatus::Infeasible;
    } else if (outcome == StandardSimplex::Outcome::Infeasible) {
        sol.status = LpStatus::Unbounded;  // caller disambiguates
    } else {
        sol.status = LpStatus::Optimal;
        sol.point = sx.multipliers();
        sol.value = 0;
        for (std::size_t k = 0; k < m; ++k) sol.value += objective[k] * sol.point[k];
    }
    return sol;
}

}  // namespace detail

/// Exact optimum of a linear program with free variables.
inline LpSolution solve(const LinearProgram& lp) {
    if (lp.objective.size() != lp.variables) throw LpError("objective has wrong width");
    auto sol = detail::solve_through_dual(lp, lp.objective);
    if (sol.status == LpStatus::Unbounded) {
        // dual infeasible: primal is unbounded or infeasible; a zero objective tells them apart
        const auto feas = detail::solve_through_dual(lp, RationalVector(lp.variables));
        if (feas.status != LpStatus::Optimal) sol.status = LpStatus::Infeasible;
        sol.pivots += feas.pivots;
    }
    return sol;
}

// --------------------------------------------------------------------------
// Lazily separated excess constraints

/// Generated excess constraint x(S) >= value + threshold.
struct Cut {
    Indicator coalition;
    Rational value;  // nu(S)
};

/// Excess constraints x(S) >= nu(S) + threshold for every S with chi(S)
/// outside span(span_basis). A missing threshold means the free epsilon.
struct LazyLevel {
    std::vector<Indicator> span_basis;
    std::optional<Rational> threshold;
    std::vector<Cut> cuts;

    [[nodiscard]] bool has_cut(const Indicator& s) const {
        return std::any_of(cuts.begin(), cuts.end(), [&](const Cut& c) { return c.coalition == s; });
    }
};

struct FixedEquality {
    Indicator coalition;
    Rational constant;
};

/// LP over (x, epsilon): efficiency, individual rationality, fixed-coalition
/// equalities, and the lazy excess levels.
struct ConstraintSystem {
    std::size_t players = 0;
    Rational grand_value;
    RationalVector singleton_values;
    std::vector<FixedEquality> equalities;
    std::vector<LazyLevel> levels;

    [[nodiscard]] bool has_free_epsilon() const {
        const auto free = std::count_if(levels.begin(), levels.end(),
                                        [](const LazyLevel& l) { return !l.threshold.has_value(); });
        if (free > 1) throw LpError("more than one level with a free epsilon");
        return free == 1;
    }

    [[nodiscard]] std::size_t variable_count() const { return players + (has_free_epsilon() ? 1 : 0); }

    /// The explicit relaxation with every generated cut.
    [[nodiscard]] LinearProgram relaxation(const RationalVector& objective) const {
        const std::size_t vars = variable_count();
        LinearProgram lp{vars, objective, {}};
        RationalVector eff(vars);
        for (std::size_t i = 0; i < players; ++i) eff[i] = 1;
        lp.add(eff, LinearConstraint::Sense::Eq, grand_value);
        for (const auto& eq : equalities) {
            RationalVector row(vars);
            for (std::size_t i = 0; i < players; ++i)
                if (eq.coalition[i]) row[i] = 1;
            lp.add(std::move(row), LinearConstraint::Sense::Eq, eq.constant);
        }
        for (std::size_t i = 0; i < players; ++i) {
            RationalVector row(vars);
            row[i] = 1;
            lp.add(std::move(row), LinearConstraint::Sense::Geq, singleton_values[i]);
        }
        for (const auto& level : levels) {
            for (const auto& cut : level.cuts) {
                RationalVector row(vars);
                for (std::size_t i = 0; i < players; ++i)
                    if (cut.coalition[i]) row[i] = 1;
                Rational rhs = cut.value;
                if (level.threshold) rhs += *level.threshold;
                else row[players] = -1;
                lp.add(std::move(row), LinearConstraint::Sense::Geq, std::move(rhs));
            }
        }
        return lp;
    }
};

/// Answer of a separation oracle for one level at one point.
struct OracleAnswer {
    bool found = false;  // false: every coalition lies in the level's span
    Rational min_excess;
    Indicator coalition;
    Rational coalition_value;  // nu(S)
};

using SeparationOracle = std::function<OracleAnswer(const RationalVector& x, const LazyLevel& level)>;

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational optimum;
    RationalVector point;  // x only
    std::optional<Rational> epsilon;
    std::vector<std::pair<std::size_t, Indicator>> new_cuts;  // (level, coalition)
    std::size_t rounds = 0;
    std::size_t oracle_calls = 0;
};

struct SeparationOptions {
    std::ostream* trace = nullptr;  // one line per generated cut
};

namespace detail {

inline std::string coalition_text(const Indicator& s) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) {
            out += (first ? "" : ",") + std::to_string(i);
            first = false;
        }
    return out + "}";
}

inline LpResult cutting_plane_loop(ConstraintSystem& sys, const RationalVector& objective,
                                   const SeparationOracle& oracle, const SeparationOptions& opts) {
    LpResult result;
    const bool free_eps = sys.has_free_epsilon();
    const std::size_t n = sys.players;

    auto add_cut = [&](std::size_t level_idx, const OracleAnswer& ans, const Rational& threshold) {
        auto& level = sys.levels[level_idx];
        if (level.has_cut(ans.coalition)) throw LpError("separation produced a duplicate cut");
        level.cuts.push_back({ans.coalition, ans.coalition_value});
        result.new_cuts.emplace_back(level_idx, ans.coalition);
        if (opts.trace)
            *opts.trace << "level " << level_idx + 1 << ": add S = " << coalition_text(ans.coalition) << ", excess "
                        << ans.min_excess << " < threshold " << threshold << "\n";
    };

    // A free epsilon without cuts is unbounded; seed its level from a feasible point.
    if (free_eps) {
        for (std::size_t li = 0; li < sys.levels.size(); ++li) {
            auto& level = sys.levels[li];
            if (level.threshold || !level.cuts.empty()) continue;
            auto frozen = sys;
            frozen.levels.erase(frozen.levels.begin() + static_cast<std::ptrdiff_t>(li));
            const auto base = solve(frozen.relaxation(RationalVector(n)));
            if (base.status != LpStatus::Optimal) {
                result.status = base.status;
                return result;
            }
            ++result.oracle_calls;
            const auto ans = oracle(base.point, level);
            if (!ans.found) {
                result.status = LpStatus::Unbounded;
                return result;
            }
            add_cut(li, ans, Rational(0));
        }
    }

    for (;;) {
        ++result.rounds;
        const auto sol = solve(sys.relaxation(objective));
        if (sol.status != LpStatus::Optimal) {
            result.status = sol.status;
            return result;
        }
        RationalVector x(sol.point.begin(), sol.point.begin() + static_cast<std::ptrdiff_t>(n));
        std::optional<Rational> eps;
        if (free_eps) eps = sol.point[n];

        // most violated level; ties go to the lowest level
        std::optional<std::size_t> worst;
        OracleAnswer worst_ans;
        Rational worst_gap, worst_threshold;
        for (std::size_t li = 0; li < sys.levels.size(); ++li) {
            const auto& level = sys.levels[li];
            ++result.oracle_calls;
            auto ans = oracle(x, level);
            if (!ans.found) continue;
            const Rational threshold = level.threshold ? *level.threshold : *eps;
            if (ans.min_excess >= threshold) continue;
            Rational gap = threshold - ans.min_excess;
            if (!worst || gap > worst_gap) {
                worst = li;
                worst_gap = std::move(gap);
                worst_ans = std::move(ans);
                worst_threshold = threshold;
            }
        }
        if (!worst) {
            result.status = LpStatus::Optimal;
            result.optimum = sol.value;
            result.point = std::move(x);
            result.epsilon = std::move(eps);
            return result;
        }
        add_cut(*worst, worst_ans, worst_threshold);
    }
}

}  // namespace detail

/// Cutting-plane solve of the system for `objective` over (x, epsilon):
/// solve the explicit relaxation exactly, ask the oracle for the most
/// violated excess constraint of every level, add it, repeat. Generated cuts
/// remain in `sys`.
inline LpResult solve_with_separation(ConstraintSystem& sys, const RationalVector& objective,
                                      const SeparationOracle& oracle, const SeparationOptions& opts = {}) {
    if (objective.size() != sys.variable_count()) throw LpError("objective has wrong width");
    return detail::cutting_plane_loop(sys, objective, oracle, opts);
}

enum class Sense { Maximize, Minimize };

/// Optimizes a linear functional of x over a system whose levels all have
/// frozen thresholds.
inline LpResult optimize_linear_over_region(ConstraintSystem& sys, const RationalVector& objective, Sense sense,
                                            const SeparationOracle& oracle, const SeparationOptions& opts = {}) {
    if (sys.has_free_epsilon()) throw LpError("region still has a free epsilon");
    if (objective.size() != sys.players) throw LpError("objective has wrong width");
    RationalVector obj = objective;
    if (sense == Sense::Minimize)
        for (auto& v : obj) v = -v;
    auto r = detail::cutting_plane_loop(sys, obj, oracle, opts);
    if (sense == Sense::Minimize && r.status == LpStatus::Optimal) r.optimum = -r.optimum;
    return r;
}

}  // namespace nucleo

#endif  // NUCLEO_LP_HPP
