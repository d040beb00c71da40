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

#ifndef NUCLEO_HYPERDP_HPP
#define NUCLEO_HYPERDP_HPP

// Dynamic programs as directed acyclic hypergraphs.
//
// A solution of the program is a hyperpath: it begins at a designated start,
// every reached vertex that is not a sink picks exactly one outgoing arc, and
// it ends only at sinks. An affine map g sends the arc incidence vector of a
// path to a point of the problem's solution space and an affine objective c
// scores it. With the no-common-descendants property the hyperpath is a tree
// and the optimum follows from a bottom-up recursion.

#include "nucleo/linalg.hpp"
#include "nucleo/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nucleo {

using VertexId = std::size_t;
using ArcId = std::size_t;

class DpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Arc {
    VertexId tail = 0;
    std::vector<VertexId> heads;  // sorted, distinct, nonempty
};

/// Directed hypergraph with explicit designated start vertices.
class HyperDag {
public:
    HyperDag() = default;

    HyperDag(std::size_t vertex_count, std::vector<Arc> arcs, std::vector<VertexId> starts)
        : vertex_count_(vertex_count), arcs_(std::move(arcs)), starts_(std::move(starts)) {
        for (auto& a : arcs_) {
            std::sort(a.heads.begin(), a.heads.end());
            a.heads.erase(std::unique(a.heads.begin(), a.heads.end()), a.heads.end());
            if (a.heads.empty()) throw DpError("arc without heads");
            if (a.tail >= vertex_count_) throw DpError("arc tail out of range");
            for (auto h : a.heads) {
                if (h >= vertex_count_) throw DpError("arc head out of range");
                if (h == a.tail) throw DpError("arc tail among its heads");
            }
        }
        std::sort(starts_.begin(), starts_.end());
        starts_.erase(std::unique(starts_.begin(), starts_.end()), starts_.end());
        for (auto s : starts_)
            if (s >= vertex_count_) throw DpError("start out of range");
        outgoing_.assign(vertex_count_, {});
        incoming_count_.assign(vertex_count_, 0);
        for (ArcId e = 0; e < arcs_.size(); ++e) {
            outgoing_[arcs_[e].tail].push_back(e);
            for (auto h : arcs_[e].heads) ++incoming_count_[h];
        }
    }

    [[nodiscard]] std::size_t vertex_count() const { return vertex_count_; }
    [[nodiscard]] std::size_t arc_count() const { return arcs_.size(); }
    [[nodiscard]] const std::vector<Arc>& arcs() const { return arcs_; }
    [[nodiscard]] const Arc& arc(ArcId e) const { return arcs_[e]; }
    [[nodiscard]] const std::vector<VertexId>& starts() const { return starts_; }
    [[nodiscard]] const std::vector<ArcId>& outgoing(VertexId v) const { return outgoing_[v]; }
    [[nodiscard]] bool is_sink(VertexId v) const { return outgoing_[v].empty(); }
    [[nodiscard]] bool is_source(VertexId v) const { return incoming_count_[v] == 0; }

    /// Largest number of heads on any arc (0 for an arc-free graph).
    [[nodiscard]] std::size_t max_heads() const {
        std::size_t d = 0;
        for (const auto& a : arcs_) d = std::max(d, a.heads.size());
        return d;
    }

    /// Topological order (tails before heads), or nullopt on a cycle.
    [[nodiscard]] std::optional<std::vector<VertexId>> topological_order() const {
        std::vector<std::size_t> indeg(incoming_count_);
        std::vector<VertexId> order;
        order.reserve(vertex_count_);
        for (VertexId v = 0; v < vertex_count_; ++v)
            if (indeg[v] == 0) order.push_back(v);
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (auto e : outgoing_[order[i]])
                for (auto h : arcs_[e].heads)
                    if (--indeg[h] == 0) order.push_back(h);
        }
        if (order.size() != vertex_count_) return std::nullopt;
        return order;
    }

private:
    std::size_t vertex_count_ = 0;
    std::vector<Arc> arcs_;
    std::vector<VertexId> starts_;
    std::vector<std::vector<ArcId>> outgoing_;
    std::vector<std::size_t> incoming_count_;
};

/// Arc set of a hyperpath plus its start.
struct HyperPath {
    std::vector<ArcId> arcs;  // sorted
    VertexId start = 0;

    friend bool operator==(const HyperPath&, const HyperPath&) = default;
    friend auto operator<=>(const HyperPath&, const HyperPath&) = default;
};

using SparseColumn = std::vector<std::pair<std::size_t, Rational>>;

/// g(x) = A x + b with A stored column-sparse (one column per arc).
struct AffineMap {
    std::size_t target_dim = 0;
    std::vector<SparseColumn> columns;
    RationalVector offset;

    static AffineMap identity(std::size_t arcs) {
        AffineMap g{arcs, std::vector<SparseColumn>(arcs), RationalVector(arcs)};
        for (std::size_t e = 0; e < arcs; ++e) g.columns[e] = {{e, Rational(1)}};
        return g;
    }

    [[nodiscard]] std::size_t source_dim() const { return columns.size(); }

    [[nodiscard]] RationalVector apply(const std::vector<ArcId>& arc_set) const {
        RationalVector out = offset;
        for (auto e : arc_set)
            for (const auto& [row, val] : columns.at(e)) out[row] += val;
        return out;
    }

    [[nodiscard]] RationalVector apply(const HyperPath& p) const { return apply(p.arcs); }

    [[nodiscard]] RationalMatrix matrix() const {
        RationalMatrix a(target_dim, columns.size());
        for (std::size_t e = 0; e < columns.size(); ++e)
            for (const auto& [row, val] : columns[e]) a(row, e) = val;
        return a;
    }
};

/// c(P) = constant + sum of arc weights over P.
struct AffineObjective {
    RationalVector arc_weights;
    Rational constant;

    [[nodiscard]] Rational apply(const std::vector<ArcId>& arc_set) const {
        Rational v = constant;
        for (auto e : arc_set) v += arc_weights.at(e);
        return v;
    }
    [[nodiscard]] Rational apply(const HyperPath& p) const { return apply(p.arcs); }
};

/// (H, g, c): paths of H mapped by g onto the feasible region, scored by c.
struct DpFormulation {
    HyperDag graph;
    AffineMap g;
    AffineObjective c;

    [[nodiscard]] std::size_t solution_dim() const { return g.target_dim; }

    void check_shapes() const {
        if (g.columns.size() != graph.arc_count()) throw DpError("map column count differs from arc count");
        if (g.offset.size() != g.target_dim) throw DpError("map offset has wrong dimension");
        if (c.arc_weights.size() != graph.arc_count()) throw DpError("objective weight count differs from arc count");
    }
};

// --------------------------------------------------------------------------
// Validation and integrality

struct ValidationReport {
    bool acyclic = false;
    bool starts_are_sources = false;
    bool reachable = false;
    std::vector<std::string> problems;

    [[nodiscard]] bool ok() const { return acyclic && starts_are_sources && reachable; }
};

/// Acyclicity, sourcehood of starts and reachability of every vertex from
/// some start. Sinks terminate every derivation, so reachability is the
/// only connectivity requirement checked here.
inline ValidationReport validate(const HyperDag& h) {
    ValidationReport r;
    r.acyclic = h.topological_order().has_value();
    if (!r.acyclic) r.problems.emplace_back("cycle detected");

    r.starts_are_sources = true;
    for (auto s : h.starts()) {
        if (!h.is_source(s)) {
            r.starts_are_sources = false;
            r.problems.push_back("start not a source: vertex " + std::to_string(s));
        }
    }

    std::vector<bool> seen(h.vertex_count(), false);
    std::vector<VertexId> stack(h.starts().begin(), h.starts().end());
    for (auto s : stack) seen[s] = true;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto e : h.outgoing(v))
            for (auto w : h.arc(e).heads)
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
    }
    r.reachable = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    if (!r.reachable) {
        for (VertexId v = 0; v < h.vertex_count(); ++v)
            if (!seen[v]) {
                r.problems.push_back("vertex " + std::to_string(v) + " unreachable from every start");
                break;
            }
    }
    return r;
}

/// Throws DpError carrying the first problem when validation fails.
inline void require_valid(const HyperDag& h) {
    const auto r = validate(h);
    if (!r.ok()) throw DpError(r.problems.front());
}

/// Brute-force cut test for small graphs: every nonempty proper vertex subset
/// U has some arc meeting both U and its complement. Arcs are read as
/// undirected hyperedges; read with direction, a sink alone would already
/// form an empty cut.
inline bool connected_by_cuts(const HyperDag& h) {
    const std::size_t n = h.vertex_count();
    if (n > 12) throw DpError("cut enumeration limited to 12 vertices");
    if (n <= 1) return true;
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        bool crossing = false;
        for (const auto& a : h.arcs()) {
            const bool tail_in = (mask >> a.tail) & 1u;
            bool any_in = tail_in;
            bool any_out = !tail_in;
            for (auto v : a.heads) {
                if ((mask >> v) & 1u) any_in = true;
                else any_out = true;
            }
            if (any_in && any_out) {
                crossing = true;
                break;
            }
        }
        if (!crossing) return false;
    }
    return true;
}

/// True iff for every arc the descendant sets of distinct heads are disjoint.
///
/// Each multi-head arc is checked by a marking search from its heads; a
/// vertex reached from two different heads is a common descendant.
inline bool no_common_descendants(const HyperDag& h) {
    const std::size_t n = h.vertex_count();
    std::vector<std::size_t> stamp_arc(n, static_cast<std::size_t>(-1));
    std::vector<std::size_t> stamp_head(n, 0);
    std::vector<VertexId> stack;
    for (ArcId e = 0; e < h.arc_count(); ++e) {
        const auto& heads = h.arc(e).heads;
        if (heads.size() < 2) continue;
        for (std::size_t i = 0; i < heads.size(); ++i) {
            if (stamp_arc[heads[i]] == e) return false;
            stamp_arc[heads[i]] = e;
            stamp_head[heads[i]] = i;
            stack.push_back(heads[i]);
            while (!stack.empty()) {
                const auto v = stack.back();
                stack.pop_back();
                for (auto f : h.outgoing(v))
                    for (auto w : h.arc(f).heads) {
                        if (stamp_arc[w] == e) {
                            if (stamp_head[w] != i) return false;
                            continue;
                        }
                        stamp_arc[w] = e;
                        stamp_head[w] = i;
                        stack.push_back(w);
                    }
            }
        }
    }
    return true;
}

/// Reflexive descendant set of every vertex, each sorted ascending.
inline std::vector<std::vector<VertexId>> descendant_sets(const HyperDag& h) {
    const auto order = h.topological_order();
    if (!order) throw DpError("cycle detected");
    std::vector<std::vector<VertexId>> desc(h.vertex_count());
    for (auto it = order->rbegin(); it != order->rend(); ++it) {
        const auto v = *it;
        std::vector<VertexId> acc{v};
        for (auto e : h.outgoing(v))
            for (auto w : h.arc(e).heads) {
                std::vector<VertexId> merged;
                std::set_union(acc.begin(), acc.end(), desc[w].begin(), desc[w].end(), std::back_inserter(merged));
                acc = std::move(merged);
            }
        desc[v] = std::move(acc);
    }
    return desc;
}

/// Reference subsets I_v = descendants(v); requires no common descendants.
inline std::vector<std::vector<VertexId>> build_reference_subsets(const HyperDag& h) {
    if (!no_common_descendants(h)) throw DpError("not integral: heads share a descendant");
    return descendant_sets(h);
}

// --------------------------------------------------------------------------
// Paths

/// Every hyperpath from every designated start, found by choosing one arc per
/// reached non-sink vertex in topological order. Throws once more than `cap`
/// paths exist.
inline std::vector<HyperPath> enumerate_paths(const HyperDag& h, std::size_t cap) {
    const auto order = h.topological_order();
    if (!order) throw DpError("cycle detected");
    std::vector<std::size_t> pos(h.vertex_count());
    for (std::size_t i = 0; i < order->size(); ++i) pos[(*order)[i]] = i;

    std::vector<HyperPath> out;
    std::vector<ArcId> chosen;

    // frontier: reached vertices ordered by topological position
    auto recurse = [&](auto&& self, std::map<std::size_t, VertexId> frontier, VertexId start) -> void {
        while (!frontier.empty() && h.is_sink(frontier.begin()->second)) frontier.erase(frontier.begin());
        if (frontier.empty()) {
            HyperPath p{chosen, start};
            std::sort(p.arcs.begin(), p.arcs.end());
            out.push_back(std::move(p));
            if (out.size() > cap) throw DpError("cap exceeded");
            return;
        }
        const auto v = frontier.begin()->second;
        frontier.erase(frontier.begin());
        for (auto e : h.outgoing(v)) {
            auto next = frontier;
            for (auto w : h.arc(e).heads) next.emplace(pos[w], w);
            chosen.push_back(e);
            self(self, std::move(next), start);
            chosen.pop_back();
        }
    };
    for (auto s : h.starts()) recurse(recurse, std::map<std::size_t, VertexId>{{pos[s], s}}, s);
    return out;
}

// --------------------------------------------------------------------------
// Evaluation

struct EvaluateResult {
    bool feasible = false;
    Rational value;
    HyperPath witness;
};

struct EvaluateOptions {
    bool check_integral = true;
};

/// Maximum of c over all paths by bottom-up recursion over a topological
/// order. Ties go to the lowest arc id, then the lowest start id.
inline EvaluateResult evaluate(const DpFormulation& f, EvaluateOptions opts = {}) {
    const auto& h = f.graph;
    if (h.starts().empty()) return {};
    if (opts.check_integral && !no_common_descendants(h)) throw DpError("not integral");
    const auto order = h.topological_order();
    if (!order) throw DpError("cycle detected");

    std::vector<Rational> val(h.vertex_count());
    std::vector<ArcId> best(h.vertex_count(), static_cast<ArcId>(-1));
    for (auto it = order->rbegin(); it != order->rend(); ++it) {
        const auto v = *it;
        bool have = false;
        for (auto e : h.outgoing(v)) {
            Rational cand = f.c.arc_weights[e];
            for (auto w : h.arc(e).heads) cand += val[w];
            if (!have || cand > val[v]) {
                val[v] = std::move(cand);
                best[v] = e;
                have = true;
            }
        }
    }

    VertexId s = h.starts().front();
    for (auto t : h.starts())
        if (val[t] > val[s]) s = t;

    EvaluateResult r;
    r.feasible = true;
    r.value = f.c.constant + val[s];
    r.witness.start = s;
    std::vector<VertexId> stack{s};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        if (best[v] == static_cast<ArcId>(-1)) continue;
        r.witness.arcs.push_back(best[v]);
        for (auto w : h.arc(best[v]).heads) stack.push_back(w);
    }
    std::sort(r.witness.arcs.begin(), r.witness.arcs.end());
    return r;
}

// --------------------------------------------------------------------------
// Transformations

/// The formulation of (DP) on `h` itself: identity map on arcs, objective c.
inline DpFormulation identity_formulation(const HyperDag& h, const AffineObjective& c) {
    return {h, AffineMap::identity(h.arc_count()), c};
}

/// (H', g', c') solving (DP) on `h` after subdividing `arc_id` w.r.t. head `v`.
///
/// The arc keeps its id as (u, {v, b_v}); the new arc (b_v, S \ {v}) is
/// appended with a zero column and zero weight.
inline DpFormulation subdivision_formulation(const HyperDag& h, const AffineObjective& c, ArcId arc_id, VertexId v) {
    const auto& old = h.arc(arc_id);
    if (old.heads.size() < 2) throw DpError("subdivision needs an arc with at least two heads");
    if (!std::binary_search(old.heads.begin(), old.heads.end(), v)) throw DpError("subdivision vertex is not a head");

    const VertexId dummy = h.vertex_count();
    std::vector<Arc> arcs = h.arcs();
    std::vector<VertexId> rest;
    for (auto w : old.heads)
        if (w != v) rest.push_back(w);
    arcs[arc_id] = Arc{old.tail, {v, dummy}};
    arcs.push_back(Arc{dummy, std::move(rest)});

    AffineMap g = AffineMap::identity(h.arc_count());
    g.columns.emplace_back();  // the appended arc maps to nothing

    AffineObjective cc = c;
    cc.arc_weights.emplace_back(0);
    return {HyperDag(h.vertex_count() + 1, std::move(arcs), h.starts()), std::move(g), std::move(cc)};
}

/// (H', g o g', c') from an outer formulation and an inner formulation of the
/// outer's (DP). The inner solution space must be the outer arc space.
inline DpFormulation compose(const DpFormulation& outer, const DpFormulation& inner) {
    if (inner.g.target_dim != outer.graph.arc_count()) throw DpError("dimension mismatch in compose");
    AffineMap g;
    g.target_dim = outer.g.target_dim;
    g.columns.resize(inner.g.columns.size());
    for (std::size_t e = 0; e < inner.g.columns.size(); ++e) {
        std::map<std::size_t, Rational> acc;
        for (const auto& [mid, coef] : inner.g.columns[e])
            for (const auto& [row, val] : outer.g.columns[mid]) acc[row] += coef * val;
        for (auto& [row, val] : acc)
            if (!val.is_zero()) g.columns[e].emplace_back(row, std::move(val));
    }
    g.offset = outer.g.offset;
    for (std::size_t mid = 0; mid < inner.g.offset.size(); ++mid) {
        if (inner.g.offset[mid].is_zero()) continue;
        for (const auto& [row, val] : outer.g.columns[mid]) g.offset[row] += inner.g.offset[mid] * val;
    }
    return {inner.graph, std::move(g), inner.c};
}

/// Replaces arc (u, S) by (u, {v, b_v}) and (b_v, S \ {v}).
inline DpFormulation subdivide(const DpFormulation& f, ArcId arc_id, VertexId v) {
    return compose(f, subdivision_formulation(f.graph, f.c, arc_id, v));
}

/// Subdivides until every arc has at most two heads.
///
/// An arc with |S| >= 3 ends up as |S| - 1 arcs; arcs with one or two heads
/// are untouched.
inline DpFormulation reduce_arity(const DpFormulation& f) {
    DpFormulation cur = f;
    for (ArcId e = 0; e < cur.graph.arc_count(); ++e) {
        // appended arcs are revisited by the loop itself
        while (cur.graph.arc(e).heads.size() > 2) {
            const auto v = cur.graph.arc(e).heads.front();
            cur = subdivide(cur, e, v);
        }
    }
    return cur;
}

/// One line per arc: "tail <- {heads} | weight | g-column (sparse)".
inline void dump(std::ostream& os, const DpFormulation& f) {
    const auto& h = f.graph;
    os << "# vertices " << h.vertex_count() << ", arcs " << h.arc_count() << ", starts {";
    for (std::size_t i = 0; i < h.starts().size(); ++i) os << (i ? "," : "") << h.starts()[i];
    os << "}, constant " << f.c.constant << "\n";
    for (ArcId e = 0; e < h.arc_count(); ++e) {
        const auto& a = h.arc(e);
        os << a.tail << " <- {";
        for (std::size_t i = 0; i < a.heads.size(); ++i) os << (i ? "," : "") << a.heads[i];
        os << "} | " << f.c.arc_weights[e] << " | {";
        bool first = true;
        for (const auto& [row, val] : f.g.columns[e]) {
            os << (first ? "" : ",") << row << ":" << val;
            first = false;
        }
        os << "}\n";
    }
}

/// Keeps only vertices reachable from a designated start; ids are compacted
/// in increasing order so relative order (and tie-breaking) is preserved.
inline DpFormulation prune_unreachable(const DpFormulation& f) {
    const auto& h = f.graph;
    std::vector<bool> seen(h.vertex_count(), false);
    std::vector<VertexId> stack(h.starts().begin(), h.starts().end());
    for (auto s : stack) seen[s] = true;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto e : h.outgoing(v))
            for (auto w : h.arc(e).heads)
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
    }
    std::vector<VertexId> remap(h.vertex_count(), static_cast<VertexId>(-1));
    std::size_t next = 0;
    for (VertexId v = 0; v < h.vertex_count(); ++v)
        if (seen[v]) remap[v] = next++;
    std::vector<Arc> arcs;
    AffineMap g{f.g.target_dim, {}, f.g.offset};
    AffineObjective c{{}, f.c.constant};
    for (ArcId e = 0; e < h.arc_count(); ++e) {
        const auto& a = h.arc(e);
        if (!seen[a.tail]) continue;
        Arc na{remap[a.tail], {}};
        for (auto w : a.heads) na.heads.push_back(remap[w]);
        arcs.push_back(std::move(na));
        g.columns.push_back(f.g.columns[e]);
        c.arc_weights.push_back(f.c.arc_weights[e]);
    }
    std::vector<VertexId> starts;
    for (auto s : h.starts()) starts.push_back(remap[s]);
    return {HyperDag(next, std::move(arcs), std::move(starts)), std::move(g), std::move(c)};
}

}  // namespace nucleo

#endif  // NUCLEO_HYPERDP_HPP
