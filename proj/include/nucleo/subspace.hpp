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

#ifndef NUCLEO_SUBSPACE_HPP
#define NUCLEO_SUBSPACE_HPP

// Optimizing a dynamic program over the solutions whose 0-1 projection
// avoids a linear subspace. A 0-1 vector x escapes span_Q(V) exactly when,
// for some prime p of a small fixed set, V stays independent mod p and some
// vector u orthogonal to V mod p has u.x != 0 mod p. Each (p, u, k) case is
// a congruency-constrained DP, solved on a residue-annotated copy of the
// hypergraph.

#include "nucleo/hyperdp.hpp"
#include "nucleo/linalg.hpp"
#include "nucleo/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

namespace nucleo {

struct PrimeSet {
    std::vector<std::uint64_t> primes;
};

/// First max(1, ceil(log2(n!))) primes.
inline PrimeSet prime_set(std::size_t n) {
    if (n == 0) throw std::invalid_argument("prime_set needs n >= 1");
    mpz_class fact = 1;
    for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<unsigned long>(i);
    std::size_t want = 0;
    if (fact > 1) {
        mpz_class m = fact - 1;
        want = mpz_sizeinbase(m.get_mpz_t(), 2);  // bit length of n!-1 = ceil(log2 n!)
    }
    want = std::max<std::size_t>(want, 1);
    PrimeSet ps;
    for (std::uint64_t c = 2; ps.primes.size() < want; ++c) {
        bool prime = true;
        for (auto q : ps.primes) {
            if (q * q > c) break;
            if (c % q == 0) {
                prime = false;
                break;
            }
        }
        if (prime) ps.primes.push_back(c);
    }
    return ps;
}

/// Side constraint a(P) = target (mod p) on the arcs of a formulation.
struct CongruencySpec {
    std::uint64_t p = 2;
    std::vector<std::uint64_t> arc_residues;
    std::uint64_t target = 0;
};

namespace detail {

inline std::uint64_t residue_of(const Rational& r, std::uint64_t p) {
    if (!r.is_integer()) throw DpError("congruence lifting needs an integral map");
    mpz_class m = r.num() % static_cast<unsigned long>(p);
    if (m < 0) m += static_cast<unsigned long>(p);
    return m.get_ui();
}

}  // namespace detail

/// Pulls v.x = k (mod p) on the solution space back to the arcs:
/// residues A^T v and target k - v.b.
inline CongruencySpec lift_congruence(const DpFormulation& f, const ModPVector& v, std::uint64_t k) {
    if (v.entries.size() != f.g.target_dim) throw DpError("dimension mismatch in lift_congruence");
    const auto p = v.p;
    CongruencySpec spec{p, std::vector<std::uint64_t>(f.graph.arc_count(), 0), 0};
    for (ArcId e = 0; e < f.graph.arc_count(); ++e) {
        std::uint64_t acc = 0;
        for (const auto& [row, val] : f.g.columns[e])
            acc = (acc + v.entries[row] % p * detail::residue_of(val, p)) % p;
        spec.arc_residues[e] = acc;
    }
    std::uint64_t vb = 0;
    for (std::size_t row = 0; row < f.g.offset.size(); ++row)
        vb = (vb + v.entries[row] % p * detail::residue_of(f.g.offset[row], p)) % p;
    spec.target = (k % p + p - vb) % p;
    return spec;
}

/// Achievable residue sets R(v) of a(P) over paths rooted at each vertex.
inline std::vector<std::vector<bool>> reachable_residues(const HyperDag& h, const CongruencySpec& spec) {
    const auto order = h.topological_order();
    if (!order) throw DpError("cycle detected");
    const auto p = spec.p;
    std::vector<std::vector<bool>> res(h.vertex_count(), std::vector<bool>(p, false));
    for (auto it = order->rbegin(); it != order->rend(); ++it) {
        const auto v = *it;
        if (h.is_sink(v)) {
            res[v][0] = true;
            continue;
        }
        for (auto e : h.outgoing(v)) {
            std::vector<bool> acc(p, false);
            acc[spec.arc_residues[e] % p] = true;
            for (auto w : h.arc(e).heads) {
                std::vector<bool> next(p, false);
                for (std::uint64_t a = 0; a < p; ++a) {
                    if (!acc[a]) continue;
                    for (std::uint64_t b = 0; b < p; ++b)
                        if (res[w][b]) next[(a + b) % p] = true;
                }
                acc = std::move(next);
            }
            for (std::uint64_t r = 0; r < p; ++r)
                if (acc[r]) res[v][r] = true;
        }
    }
    return res;
}

/// Formulation whose paths map one-to-one onto the paths P of `f` with
/// a(P) = target (mod p).
///
/// Vertex copies (v, r) carry the residue of the sub-path rooted there. An
/// arc (u, {s_1..s_d}) becomes one arc per residue choice (r_1..r_d), leaving
/// (u, a + sum r_i). Starts are the copies (s, target); copies unreachable from
/// them are dropped. Each new arc maps to its original under g, so g and c
/// of the result are the compositions with the original map and objective.
inline DpFormulation congruency_transform(const DpFormulation& f, const CongruencySpec& spec) {
    const auto& h = f.graph;
    if (spec.arc_residues.size() != h.arc_count()) throw DpError("residue vector has wrong length");
    if (!no_common_descendants(h)) throw DpError("not integral");
    const auto p = spec.p;
    const auto res = reachable_residues(h, spec);

    std::vector<std::vector<VertexId>> copy(h.vertex_count(), std::vector<VertexId>(p, static_cast<VertexId>(-1)));
    std::size_t next = 0;
    for (VertexId v = 0; v < h.vertex_count(); ++v)
        for (std::uint64_t r = 0; r < p; ++r)
            if (res[v][r]) copy[v][r] = next++;

    std::vector<Arc> arcs;
    AffineMap g{f.g.target_dim, {}, f.g.offset};
    AffineObjective c{{}, f.c.constant};
    for (ArcId e = 0; e < h.arc_count(); ++e) {
        const auto& a = h.arc(e);
        const std::size_t d = a.heads.size();
        std::vector<std::uint64_t> pick(d, 0);
        auto emit = [&](auto&& self, std::size_t i, std::uint64_t sum) -> void {
            if (i == d) {
                Arc na{copy[a.tail][sum % p], {}};
                for (std::size_t j = 0; j < d; ++j) na.heads.push_back(copy[a.heads[j]][pick[j]]);
                arcs.push_back(std::move(na));
                g.columns.push_back(f.g.columns[e]);
                c.arc_weights.push_back(f.c.arc_weights[e]);
                return;
            }
            for (std::uint64_t r = 0; r < p; ++r) {
                if (!res[a.heads[i]][r]) continue;
                pick[i] = r;
                self(self, i + 1, (sum + r) % p);
            }
        };
        emit(emit, 0, spec.arc_residues[e] % p);
    }

    std::vector<VertexId> starts;
    for (auto s : h.starts())
        if (res[s][spec.target % p]) starts.push_back(copy[s][spec.target % p]);

    DpFormulation out{HyperDag(next, std::move(arcs), std::move(starts)), std::move(g), std::move(c)};
    // |E'| <= p^(Delta+1) |E| holds before pruning already
    const auto delta = h.max_heads();
    mpz_class bound = 1;
    for (std::size_t i = 0; i < delta + 1; ++i) bound *= static_cast<unsigned long>(p);
    bound *= static_cast<unsigned long>(h.arc_count());
    if (mpz_class(static_cast<unsigned long>(out.graph.arc_count())) > bound)
        throw DpError("congruency transform exceeded its size bound");
    return prune_unreachable(out);
}

// --------------------------------------------------------------------------
// Residue-annotated evaluation: the transformed graph for every target at
// once, without materializing it.

namespace detail {

struct ResidueCell {
    std::uint32_t arc = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t r0 = 0;  // residue picked for the first head
    std::uint32_t r1 = 0;  // residue picked for the second head
    [[nodiscard]] bool set() const { return arc != std::numeric_limits<std::uint32_t>::max(); }
};

template <typename Value>
struct ResidueTable {
    std::uint64_t p = 2;
    std::vector<Value> value;       // vertex * p + residue
    std::vector<ResidueCell> cell;  // argmax arc and head residues
    std::vector<std::uint8_t> finite;

    [[nodiscard]] bool has(VertexId v, std::uint64_t r) const { return finite[v * p + r] != 0; }
    [[nodiscard]] const Value& at(VertexId v, std::uint64_t r) const { return value[v * p + r]; }
};

// Best value per (vertex, residue) over rooted sub-paths; lowest arc id and
// then lowest head residues win ties. Requires at most two heads per arc.
template <typename Value>
ResidueTable<Value> residue_dp(const HyperDag& h, const std::vector<VertexId>& reverse_topo,
                               const std::vector<Value>& weight, const std::vector<std::uint64_t>& arc_res,
                               std::uint64_t p) {
    ResidueTable<Value> t;
    t.p = p;
    t.value.assign(h.vertex_count() * p, Value{});
    t.cell.assign(h.vertex_count() * p, ResidueCell{});
    t.finite.assign(h.vertex_count() * p, 0);
    auto offer = [&](VertexId v, std::uint64_t r, Value cand, ArcId e, std::uint64_t r0, std::uint64_t r1) {
        const auto idx = v * p + r;
        if (!t.finite[idx] || cand > t.value[idx]) {
            t.value[idx] = std::move(cand);
            t.cell[idx] = ResidueCell{static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(r0),
                                      static_cast<std::uint32_t>(r1)};
            t.finite[idx] = 1;
        }
    };
    std::vector<std::uint64_t> list0, list1;
    for (auto v : reverse_topo) {
        if (h.is_sink(v)) {
            t.value[v * p] = Value{};
            t.finite[v * p] = 1;
            continue;
        }
        for (auto e : h.outgoing(v)) {
            const auto& a = h.arc(e);
            const auto base = arc_res[e] % p;
            list0.clear();
            for (std::uint64_t r = 0; r < p; ++r)
                if (t.has(a.heads[0], r)) list0.push_back(r);
            if (a.heads.size() == 1) {
                for (auto r0 : list0) offer(v, (base + r0) % p, weight[e] + t.at(a.heads[0], r0), e, r0, 0);
            } else if (a.heads.size() == 2) {
                list1.clear();
                for (std::uint64_t r = 0; r < p; ++r)
                    if (t.has(a.heads[1], r)) list1.push_back(r);
                for (auto r0 : list0) {
                    const Value partial = weight[e] + t.at(a.heads[0], r0);
                    for (auto r1 : list1) offer(v, (base + r0 + r1) % p, partial + t.at(a.heads[1], r1), e, r0, r1);
                }
            } else {
                throw DpError("residue evaluation needs at most two heads per arc");
            }
        }
    }
    return t;
}

template <typename Value>
std::vector<ArcId> residue_backtrack(const HyperDag& h, const ResidueTable<Value>& t, VertexId start,
                                     std::uint64_t r) {
    std::vector<ArcId> arcs;
    std::vector<std::pair<VertexId, std::uint64_t>> stack{{start, r}};
    while (!stack.empty()) {
        const auto [v, rv] = stack.back();
        stack.pop_back();
        if (h.is_sink(v)) continue;
        const auto& cell = t.cell[v * t.p + rv];
        arcs.push_back(cell.arc);
        const auto& a = h.arc(cell.arc);
        stack.emplace_back(a.heads[0], cell.r0);
        if (a.heads.size() == 2) stack.emplace_back(a.heads[1], cell.r1);
    }
    std::sort(arcs.begin(), arcs.end());
    return arcs;
}

// Arc weights scaled to a common denominator, when every path sum fits in
// 62 bits; otherwise nullopt and callers fall back to exact rationals.
struct ScaledWeights {
    std::vector<std::int64_t> weights;
    mpz_class scale;
};

inline std::optional<ScaledWeights> scale_weights(const RationalVector& w) {
    mpz_class l = 1;
    for (const auto& x : w) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.den().get_mpz_t());
    mpz_class total = 0;
    ScaledWeights s;
    s.scale = l;
    s.weights.reserve(w.size());
    for (const auto& x : w) {
        mpz_class v = x.num() * (l / x.den());
        total += abs(v);
        if (!v.fits_slong_p()) return std::nullopt;
        s.weights.push_back(v.get_si());
    }
    if (total >= (mpz_class(1) << 62)) return std::nullopt;
    return s;
}

}  // namespace detail

/// Worker count for independent subproblems: NUCLEO_THREADS if set, else the
/// hardware concurrency.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("NUCLEO_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

struct AvoidResult {
    bool found = false;
    Rational value;
    RationalVector solution;  // g-image of the witness path
    Indicator coalition;      // projection onto the coalition coordinates
    HyperPath witness;
};

struct AvoidStats {
    std::size_t subproblems = 0;
};

/// max c(P) over paths whose projected 0-1 point lies outside span_Q(V).
///
/// `coalition_coords[i]` is the solution-space coordinate of player i; span
/// vectors are padded with zeros elsewhere. Only primes keeping a Q-basis of
/// V independent are used: for the others every vector is in span mod p.
inline AvoidResult solve_avoiding_span(const DpFormulation& input, const std::vector<Indicator>& span_vectors,
                                       const std::vector<std::size_t>& coalition_coords,
                                       AvoidStats* stats = nullptr) {
    const std::size_t n = coalition_coords.size();
    if (input.graph.starts().empty() || n == 0) return {};
    const DpFormulation f = input.graph.max_heads() > 2 ? reduce_arity(input) : input;
    const auto& h = f.graph;

    const auto upper = evaluate(f, {.check_integral = false});
    const auto basis = independent_subset(span_vectors, n);
    if (basis.size() == n) return {};

    auto order = h.topological_order();
    if (!order) throw DpError("cycle detected");
    std::vector<VertexId> reverse_topo(order->rbegin(), order->rend());
    const auto scaled = detail::scale_weights(f.c.arc_weights);
    // the residue DP compares only relative values, so the constant is added at the end
    const Rational scaled_bound = upper.value - f.c.constant;

    struct Task {
        std::uint64_t p;
        ModPVector u;  // over the solution space
    };
    std::vector<Task> tasks;
    for (auto p : prime_set(n).primes) {
        if (rank_mod_p(basis, p) < basis.size()) continue;
        for (auto& u : orthogonal_basis_mod_p(basis, n, p)) {
            ModPVector padded{std::vector<std::uint64_t>(f.g.target_dim, 0), p};
            for (std::size_t i = 0; i < n; ++i) padded.entries[coalition_coords[i]] = u.entries[i];
            tasks.push_back({p, std::move(padded)});
        }
    }
    if (stats) stats->subproblems += tasks.size();

    struct Outcome {
        bool found = false;
        Rational value;  // without the objective constant
        std::vector<ArcId> arcs;
        VertexId start = 0;
    };

    auto run_task = [&](const Task& task) -> Outcome {
        const auto lifted = lift_congruence(f, task.u, 0);
        // lifted.target = -v.b; the target for residue k is k + lifted.target
        Outcome best;
        auto consider = [&](auto const& table, auto to_rational) {
            for (std::uint64_t k = 1; k < task.p; ++k) {
                const auto target = (k + lifted.target) % task.p;
                for (auto s : h.starts()) {
                    if (!table.has(s, target)) continue;
                    Rational v = to_rational(table.at(s, target));
                    if (!best.found || v > best.value) {
                        best.found = true;
                        best.value = std::move(v);
                        best.arcs = detail::residue_backtrack(h, table, s, target);
                        best.start = s;
                    }
                }
            }
        };
        if (scaled) {
            const auto table = detail::residue_dp<std::int64_t>(h, reverse_topo, scaled->weights,
                                                                lifted.arc_residues, task.p);
            consider(table, [&](std::int64_t x) { return Rational(mpz_class(static_cast<long>(x)), scaled->scale); });
        } else {
            const auto table = detail::residue_dp<Rational>(h, reverse_topo, f.c.arc_weights, lifted.arc_residues,
                                                            task.p);
            consider(table, [](const Rational& x) { return x; });
        }
        return best;
    };

    // Tasks run in batches of `workers`, in order; the first task in order
    // with the best value wins, so the result does not depend on the count.
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(tasks.size(), 1));
    Outcome best;
    for (std::size_t begin = 0; begin < tasks.size(); begin += workers) {
        const std::size_t end = std::min(tasks.size(), begin + workers);
        std::vector<Outcome> outcomes(end - begin);
        if (workers == 1) {
            outcomes[0] = run_task(tasks[begin]);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t i = begin; i < end; ++i)
                pool.emplace_back([&, i] { outcomes[i - begin] = run_task(tasks[i]); });
            for (auto& th : pool) th.join();
        }
        for (auto& o : outcomes)
            if (o.found && (!best.found || o.value > best.value)) best = std::move(o);
        if (best.found && best.value == scaled_bound) break;
    }
    if (!best.found) return {};

    AvoidResult r;
    r.found = true;
    r.value = best.value + f.c.constant;
    r.witness = HyperPath{std::move(best.arcs), best.start};
    r.solution = f.g.apply(r.witness);
    r.coalition.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& x = r.solution[coalition_coords[i]];
        if (x != Rational(0) && x != Rational(1)) throw DpError("coalition coordinate is not 0-1");
        r.coalition[i] = x.is_zero() ? 0 : 1;
    }
    return r;
}

/// Builder-driven form: builds the formulation for allocation `x` once.
template <typename Builder>
AvoidResult solve_avoiding_span(Builder&& builder, const RationalVector& x, const std::vector<Indicator>& span_vectors,
                                const std::vector<std::size_t>& coalition_coords) {
    return solve_avoiding_span(std::invoke(std::forward<Builder>(builder), x), span_vectors, coalition_coords);
}

}  // namespace nucleo

#endif  // NUCLEO_SUBSPACE_HPP
