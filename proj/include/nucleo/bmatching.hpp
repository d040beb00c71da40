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

#ifndef NUCLEO_BMATCHING_HPP
#define NUCLEO_BMATCHING_HPP

// b-matching games on graphs of small treewidth.
//
// nu(S) is the maximum weight of a b-matching inside G[S]. The minimum-excess
// DP runs over a nice tree decomposition whose root bag is empty. A state at
// node i records which bag vertices are in S, how many matching edges each of
// them already has, and whether the coalition so far is nonempty / misses
// someone. An edge is decided when its first endpoint is forgotten; the other
// endpoint is still in the bag then. Coordinates are emitted only at Forget
// nodes, so every vertex and edge coordinate is emitted at most once.

#include "nucleo/hyperdp.hpp"
#include "nucleo/nucleolus.hpp"
#include "nucleo/rational.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nucleo {

struct WeightedEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    Rational w;
};

/// Simple undirected graph with edge weights and degree caps.
struct WeightedGraph {
    std::size_t vertex_count = 0;
    std::vector<WeightedEdge> edges;
    std::vector<long> b;

    void validate() const {
        if (b.size() != vertex_count) throw std::invalid_argument("degree caps have wrong length");
        for (auto cap : b)
            if (cap < 1) throw std::invalid_argument("degree cap below 1");
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& e : edges) {
            if (e.u >= vertex_count || e.v >= vertex_count) throw std::invalid_argument("edge endpoint out of range");
            if (e.u == e.v) throw std::invalid_argument("self-loop");
            if (!seen.insert(std::minmax(e.u, e.v)).second)
                throw std::invalid_argument("parallel edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
        }
    }

    [[nodiscard]] std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> d(vertex_count, 0);
        for (const auto& e : edges) {
            ++d[e.u];
            ++d[e.v];
        }
        return d;
    }

    [[nodiscard]] std::size_t max_degree() const {
        const auto d = degrees();
        return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
    }
};

// --------------------------------------------------------------------------
// Tree decompositions

struct TreeDecomposition {
    std::vector<std::vector<std::size_t>> bags;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t root = 0;

    [[nodiscard]] long width() const {
        std::size_t m = 0;
        for (const auto& bag : bags) m = std::max(m, bag.size());
        return static_cast<long>(m) - 1;
    }
};

struct DecompositionReport {
    bool ok = true;
    long width = -1;
    std::vector<std::string> problems;
};

inline DecompositionReport validate_decomposition(const WeightedGraph& g, const TreeDecomposition& td) {
    DecompositionReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.problems.push_back(std::move(msg));
    };
    const std::size_t nodes = td.bags.size();
    if (nodes == 0) {
        fail("decomposition has no nodes");
        return rep;
    }
    if (td.root >= nodes) fail("root " + std::to_string(td.root) + " out of range");
    for (std::size_t i = 0; i < nodes; ++i) {
        std::set<std::size_t> uniq(td.bags[i].begin(), td.bags[i].end());
        if (uniq.size() != td.bags[i].size()) fail("bag " + std::to_string(i) + " repeats a vertex");
        for (auto v : td.bags[i])
            if (v >= g.vertex_count) fail("bag " + std::to_string(i) + " has unknown vertex " + std::to_string(v));
    }
    // the node graph must be a tree
    std::vector<std::vector<std::size_t>> adj(nodes);
    bool edges_ok = true;
    for (const auto& [a, b] : td.edges) {
        if (a >= nodes || b >= nodes || a == b) {
            fail("tree edge " + std::to_string(a) + "-" + std::to_string(b) + " is invalid");
            edges_ok = false;
            continue;
        }
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    if (edges_ok) {
        std::vector<bool> seen(nodes, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 0;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            ++count;
            for (auto w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        if (count != nodes || td.edges.size() != nodes - 1) {
            fail("node graph is not a tree");
            edges_ok = false;
        }
    }
    if (!rep.ok) return rep;

    std::vector<std::vector<std::size_t>> holders(g.vertex_count);
    for (std::size_t i = 0; i < nodes; ++i)
        for (auto v : td.bags[i]) holders[v].push_back(i);
    for (std::size_t v = 0; v < g.vertex_count; ++v)
        if (holders[v].empty()) fail("vertex " + std::to_string(v) + " is in no bag");
    for (const auto& e : g.edges) {
        bool covered = false;
        for (const auto& bag : td.bags)
            if (std::find(bag.begin(), bag.end(), e.u) != bag.end() &&
                std::find(bag.begin(), bag.end(), e.v) != bag.end()) {
                covered = true;
                break;
            }
        if (!covered) fail("edge " + std::to_string(e.u) + "-" + std::to_string(e.v) + " is in no bag");
    }
    for (std::size_t v = 0; v < g.vertex_count; ++v) {
        if (holders[v].empty()) continue;
        std::vector<bool> in(nodes, false);
        for (auto i : holders[v]) in[i] = true;
        std::vector<bool> seen(nodes, false);
        std::vector<std::size_t> stack{holders[v].front()};
        seen[holders[v].front()] = true;
        std::size_t count = 0;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            ++count;
            for (auto j : adj[i])
                if (in[j] && !seen[j]) {
                    seen[j] = true;
                    stack.push_back(j);
                }
        }
        if (count != holders[v].size())
            fail("nodes holding vertex " + std::to_string(v) + " are not connected");
    }
    rep.width = td.width();
    return rep;
}

enum class NodeType { Leaf, Introduce, Forget, Join };

inline const char* to_string(NodeType t) {
    switch (t) {
        case NodeType::Leaf: return "leaf";
        case NodeType::Introduce: return "introduce";
        case NodeType::Forget: return "forget";
        case NodeType::Join: return "join";
    }
    return "?";
}

struct NiceNode {
    NodeType type = NodeType::Leaf;
    std::vector<std::size_t> bag;  // sorted
    std::vector<std::size_t> children;
    std::size_t vertex = 0;  // leaf, introduced or forgotten vertex
};

/// Rooted decomposition whose nodes are all Leaf/Introduce/Forget/Join.
/// Children precede their parents in `nodes`.
struct NiceTreeDecomposition {
    std::vector<NiceNode> nodes;
    std::size_t root = 0;

    [[nodiscard]] long width() const {
        std::size_t m = 0;
        for (const auto& n : nodes) m = std::max(m, n.bag.size());
        return static_cast<long>(m) - 1;
    }

    [[nodiscard]] TreeDecomposition as_tree_decomposition() const {
        TreeDecomposition td;
        td.root = root;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            td.bags.push_back(nodes[i].bag);
            for (auto c : nodes[i].children) td.edges.emplace_back(i, c);
        }
        return td;
    }
};

/// Node-type invariants of a nice decomposition; empty when all hold.
inline std::vector<std::string> check_nice(const NiceTreeDecomposition& nd) {
    std::vector<std::string> problems;
    auto minus = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
        std::vector<std::size_t> out;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    };
    for (std::size_t i = 0; i < nd.nodes.size(); ++i) {
        const auto& nd_i = nd.nodes[i];
        const auto tag = "node " + std::to_string(i) + ": ";
        if (!std::is_sorted(nd_i.bag.begin(), nd_i.bag.end())) problems.push_back(tag + "bag not sorted");
        for (auto c : nd_i.children)
            if (c >= i) problems.push_back(tag + "child does not precede parent");
        if (!problems.empty()) continue;
        switch (nd_i.type) {
            case NodeType::Leaf:
                if (!nd_i.children.empty() || nd_i.bag.size() != 1 || nd_i.bag[0] != nd_i.vertex)
                    problems.push_back(tag + "malformed leaf");
                break;
            case NodeType::Introduce: {
                if (nd_i.children.size() != 1) {
                    problems.push_back(tag + "introduce needs one child");
                    break;
                }
                const auto& cb = nd.nodes[nd_i.children[0]].bag;
                if (minus(nd_i.bag, cb) != std::vector<std::size_t>{nd_i.vertex} || !minus(cb, nd_i.bag).empty())
                    problems.push_back(tag + "introduce bags differ by more than its vertex");
                break;
            }
            case NodeType::Forget: {
                if (nd_i.children.size() != 1) {
                    problems.push_back(tag + "forget needs one child");
                    break;
                }
                const auto& cb = nd.nodes[nd_i.children[0]].bag;
                if (minus(cb, nd_i.bag) != std::vector<std::size_t>{nd_i.vertex} || !minus(nd_i.bag, cb).empty())
                    problems.push_back(tag + "forget bags differ by more than its vertex");
                break;
            }
            case NodeType::Join:
                if (nd_i.children.size() != 2 || nd.nodes[nd_i.children[0]].bag != nd_i.bag ||
                    nd.nodes[nd_i.children[1]].bag != nd_i.bag)
                    problems.push_back(tag + "join needs two children with equal bags");
                break;
        }
    }
    return problems;
}

namespace detail {

class NiceBuilder {
public:
    explicit NiceBuilder(NiceTreeDecomposition& out) : out_(out) {}

    std::size_t add(NodeType t, std::vector<std::size_t> bag, std::vector<std::size_t> children, std::size_t v) {
        out_.nodes.push_back({t, std::move(bag), std::move(children), v});
        return out_.nodes.size() - 1;
    }

    // Forget then introduce vertices until the top bag equals `target`.
    std::size_t morph(std::size_t top, const std::vector<std::size_t>& target) {
        auto bag = out_.nodes[top].bag;
        std::vector<std::size_t> drop, gain;
        std::set_difference(bag.begin(), bag.end(), target.begin(), target.end(), std::back_inserter(drop));
        std::set_difference(target.begin(), target.end(), bag.begin(), bag.end(), std::back_inserter(gain));
        for (auto v : drop) {
            bag.erase(std::find(bag.begin(), bag.end(), v));
            top = add(NodeType::Forget, bag, {top}, v);
        }
        for (auto v : gain) {
            bag.insert(std::upper_bound(bag.begin(), bag.end(), v), v);
            top = add(NodeType::Introduce, bag, {top}, v);
        }
        return top;
    }

    std::optional<std::size_t> build(const TreeDecomposition& td, const std::vector<std::vector<std::size_t>>& adj,
                                     std::size_t node, std::size_t parent) {
        auto bag = td.bags[node];
        std::sort(bag.begin(), bag.end());
        std::vector<std::size_t> tops;
        for (auto c : adj[node]) {
            if (c == parent) continue;
            if (auto t = build(td, adj, c, node)) tops.push_back(morph(*t, bag));
        }
        if (tops.empty()) {
            if (bag.empty()) return std::nullopt;
            std::size_t top = add(NodeType::Leaf, {bag[0]}, {}, bag[0]);
            return morph(top, bag);
        }
        std::size_t cur = tops[0];
        for (std::size_t k = 1; k < tops.size(); ++k) cur = add(NodeType::Join, bag, {cur, tops[k]}, 0);
        return cur;
    }

private:
    NiceTreeDecomposition& out_;
};

}  // namespace detail

/// Standard conversion: root the tree, interpolate Forget/Introduce chains
/// between adjacent bags, binarize branching with Joins, and grow every leaf
/// bag from a single vertex. The root keeps the original root bag.
inline NiceTreeDecomposition make_nice(const WeightedGraph& g, const TreeDecomposition& td) {
    const auto rep = validate_decomposition(g, td);
    if (!rep.ok) {
        std::string msg = "invalid decomposition:";
        for (const auto& p : rep.problems) msg += " " + p + ";";
        throw std::invalid_argument(msg);
    }
    std::vector<std::vector<std::size_t>> adj(td.bags.size());
    for (const auto& [a, b] : td.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    NiceTreeDecomposition out;
    detail::NiceBuilder nb(out);
    const auto top = nb.build(td, adj, td.root, td.bags.size());
    if (!top) throw std::invalid_argument("decomposition has only empty bags");
    out.root = *top;
    return out;
}

/// Appends Forget nodes above the root until its bag is empty.
inline NiceTreeDecomposition with_empty_root(NiceTreeDecomposition nd) {
    detail::NiceBuilder nb(nd);
    nd.root = nb.morph(nd.root, {});
    return nd;
}

/// Min-degree elimination ordering; ties go to the lowest vertex id.
inline TreeDecomposition greedy_decomposition(const WeightedGraph& g) {
    const std::size_t n = g.vertex_count;
    if (n == 0) throw std::invalid_argument("graph without vertices");
    std::vector<std::set<std::size_t>> adj(n);
    for (const auto& e : g.edges) {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    std::vector<bool> gone(n, false);
    std::vector<std::size_t> position(n, 0);
    std::vector<std::size_t> order;
    TreeDecomposition td;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!gone[v] && (best == n || adj[v].size() < adj[best].size())) best = v;
        std::vector<std::size_t> bag(adj[best].begin(), adj[best].end());
        bag.push_back(best);
        std::sort(bag.begin(), bag.end());
        td.bags.push_back(bag);
        for (auto a : adj[best])
            for (auto c : adj[best])
                if (a != c) adj[a].insert(c);
        for (auto a : adj[best]) adj[a].erase(best);
        gone[best] = true;
        position[best] = step;
        order.push_back(best);
    }
    // bag i hangs below the bag of its earliest-eliminated later neighbour
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t parent = n;
        for (auto u : td.bags[i])
            if (u != order[i]) parent = std::min(parent, position[u]);
        if (parent == n) parent = i + 1;
        td.edges.emplace_back(parent, i);
    }
    td.root = n - 1;
    return td;
}

// --------------------------------------------------------------------------
// Value oracle

namespace detail {

// Enumerates every b-matching inside the vertex mask; calls visit(vertex
// mask of M, weight of M).
inline void for_each_b_matching(const WeightedGraph& g, std::uint64_t allowed,
                                const std::function<void(std::uint64_t, const Rational&)>& visit) {
    std::vector<std::size_t> usable;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (((allowed >> g.edges[e].u) & 1U) && ((allowed >> g.edges[e].v) & 1U)) usable.push_back(e);
    std::vector<long> deg(g.vertex_count, 0);
    Rational weight = 0;
    std::uint64_t covered = 0;
    std::vector<std::size_t> cover_count(g.vertex_count, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == usable.size()) {
            visit(covered, weight);
            return;
        }
        rec(k + 1);
        const auto& e = g.edges[usable[k]];
        if (deg[e.u] < g.b[e.u] && deg[e.v] < g.b[e.v]) {
            ++deg[e.u];
            ++deg[e.v];
            const auto saved = covered;
            covered |= (std::uint64_t{1} << e.u) | (std::uint64_t{1} << e.v);
            weight += e.w;
            rec(k + 1);
            weight -= e.w;
            covered = saved;
            --deg[e.u];
            --deg[e.v];
        }
    };
    rec(0);
}

}  // namespace detail

/// Maximum weight of a b-matching in G[S], by enumeration.
inline Rational b_matching_value(const WeightedGraph& g, const Indicator& s) {
    if (g.vertex_count > 16) throw std::invalid_argument("too large");
    if (s.size() != g.vertex_count) throw std::invalid_argument("coalition has wrong length");
    Rational best = 0;
    detail::for_each_b_matching(g, indicator_to_mask(s), [&](std::uint64_t, const Rational& w) {
        if (w > best) best = w;
    });
    return best;
}

/// nu for every coalition mask: best matching per covered set, then the
/// maximum over subsets.
inline std::vector<Rational> b_matching_table(const WeightedGraph& g) {
    const auto n = g.vertex_count;
    if (n > 16) throw std::invalid_argument("too large");
    std::vector<Rational> best(std::size_t{1} << n, Rational(0));
    detail::for_each_b_matching(g, (std::uint64_t{1} << n) - 1, [&](std::uint64_t mask, const Rational& w) {
        if (w > best[mask]) best[mask] = w;
    });
    for (std::size_t bit = 0; bit < n; ++bit)
        for (std::size_t mask = 0; mask < best.size(); ++mask)
            if ((mask >> bit) & 1U) {
                const auto& sub = best[mask ^ (std::size_t{1} << bit)];
                if (sub > best[mask]) best[mask] = sub;
            }
    return best;
}

// --------------------------------------------------------------------------
// Minimum-excess DP

struct BMatchingDpOptions {
    std::size_t state_budget = 2'000'000;
};

class BMatchingGame final : public Game {
public:
    BMatchingGame(WeightedGraph graph, std::optional<TreeDecomposition> td = std::nullopt,
                  BMatchingDpOptions options = {})
        : g_(std::move(graph)), options_(options) {
        g_.validate();
        if (g_.vertex_count == 0) throw std::invalid_argument("graph without vertices");
        td_ = td ? std::move(*td) : greedy_decomposition(g_);
        nice_ = with_empty_root(make_nice(g_, td_));
        for (std::size_t e = 0; e < g_.edges.size(); ++e)
            edge_index_[std::minmax(g_.edges[e].u, g_.edges[e].v)] = e;
    }

    [[nodiscard]] const WeightedGraph& graph() const { return g_; }
    [[nodiscard]] const TreeDecomposition& decomposition() const { return td_; }
    [[nodiscard]] const NiceTreeDecomposition& nice_decomposition() const { return nice_; }

    [[nodiscard]] std::size_t players() const override { return g_.vertex_count; }
    [[nodiscard]] Rational value(const Indicator& s) const override { return b_matching_value(g_, s); }
    [[nodiscard]] Rational singleton_value(std::size_t i) const override {
        if (i >= g_.vertex_count) throw std::out_of_range("player out of range");
        return 0;
    }

    /// Maximum-weight b-matching of G, by the same DP with every vertex in S.
    [[nodiscard]] Rational grand_value() const override {
        if (!grand_) {
            const auto& sk = skeleton(Mode::Grand);
            const auto r = evaluate(instantiate(sk, RationalVector(g_.vertex_count)), {.check_integral = false});
            grand_ = r.feasible ? r.value : Rational(0);
        }
        return *grand_;
    }

    [[nodiscard]] std::vector<std::size_t> coalition_coords() const override {
        std::vector<std::size_t> c(g_.vertex_count);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = g_.edges.size() + i;
        return c;
    }

    [[nodiscard]] DpFormulation min_excess_dp(const RationalVector& x) const override {
        if (x.size() != g_.vertex_count) throw std::invalid_argument("allocation has wrong length");
        return instantiate(skeleton(Mode::Admissible), x);
    }

    /// State and arc counts of the admissible-coalition skeleton.
    [[nodiscard]] std::pair<std::size_t, std::size_t> dp_size() const {
        const auto& sk = skeleton(Mode::Admissible);
        return {sk.graph.vertex_count(), sk.graph.arc_count()};
    }

private:
    enum class Mode { Admissible, Grand };

    struct Skeleton {
        HyperDag graph;
        AffineMap g;
        RationalVector base;         // w(J) per arc
        std::vector<long> vertex;    // forgotten vertex in S per arc, or -1
    };

    struct State {
        std::uint32_t in = 0;        // bag positions in S
        std::vector<std::uint8_t> d; // matched degree per bag position
        std::uint8_t flags = 0;      // 1 nonempty, 2 proper

        [[nodiscard]] std::string key() const {
            std::string k(reinterpret_cast<const char*>(&in), sizeof(in));
            k.append(d.begin(), d.end());
            k.push_back(static_cast<char>(flags));
            return k;
        }
    };

    struct NodeStates {
        std::vector<State> states;
        std::vector<VertexId> ids;
        std::unordered_map<std::string, std::size_t> index;
    };

    const Skeleton& skeleton(Mode mode) const {
        auto& slot = mode == Mode::Grand ? grand_skeleton_ : admissible_skeleton_;
        if (!slot) slot = std::make_shared<Skeleton>(build(mode));
        return *slot;
    }

    static DpFormulation instantiate(const Skeleton& sk, const RationalVector& x) {
        DpFormulation f{sk.graph, sk.g, {sk.base, Rational(0)}};
        for (std::size_t e = 0; e < sk.vertex.size(); ++e)
            if (sk.vertex[e] >= 0) f.c.arc_weights[e] -= x[static_cast<std::size_t>(sk.vertex[e])];
        return f;
    }

    Skeleton build(Mode mode) const {
        const bool grand = mode == Mode::Grand;
        const auto& nodes = nice_.nodes;
        const std::size_t m = g_.edges.size();
        std::vector<NodeStates> table(nodes.size());
        std::size_t vertex_count = 0;
        struct Proto {
            VertexId tail;
            std::vector<VertexId> heads;
            Rational base;
            long vertex;
            SparseColumn col;
        };
        std::vector<Proto> protos;

        auto intern = [&](NodeStates& ns, State s) -> VertexId {
            auto key = s.key();
            auto it = ns.index.find(key);
            if (it != ns.index.end()) return ns.ids[it->second];
            if (vertex_count >= options_.state_budget) throw DpError("width too large");
            ns.index.emplace(std::move(key), ns.states.size());
            ns.states.push_back(std::move(s));
            ns.ids.push_back(vertex_count);
            return vertex_count++;
        };
        auto pos_of = [](const std::vector<std::size_t>& bag, std::size_t v) {
            return static_cast<std::size_t>(std::lower_bound(bag.begin(), bag.end(), v) - bag.begin());
        };

        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& node = nodes[i];
            auto& here = table[i];
            switch (node.type) {
                case NodeType::Leaf: {
                    if (!grand) intern(here, State{0, {0}, 2});
                    intern(here, State{1, {0}, static_cast<std::uint8_t>(grand ? 0 : 1)});
                    break;
                }
                case NodeType::Introduce: {
                    const auto& child = table[node.children[0]];
                    const auto& cbag = nodes[node.children[0]].bag;
                    const auto p = pos_of(node.bag, node.vertex);
                    for (std::size_t k = 0; k < child.states.size(); ++k) {
                        const auto& cs = child.states[k];
                        for (int take = grand ? 1 : 0; take <= 1; ++take) {
                            State s;
                            s.d.assign(node.bag.size(), 0);
                            for (std::size_t q = 0; q < cbag.size(); ++q) {
                                const auto to = q < p ? q : q + 1;
                                s.d[to] = cs.d[q];
                                if ((cs.in >> q) & 1U) s.in |= 1U << to;
                            }
                            if (take) s.in |= 1U << p;
                            s.flags = grand ? 0 : static_cast<std::uint8_t>(cs.flags | (take ? 1 : 2));
                            const auto tail = intern(here, std::move(s));
                            protos.push_back({tail, {child.ids[k]}, Rational(0), -1, {}});
                        }
                    }
                    break;
                }
                case NodeType::Forget: {
                    const auto& child = table[node.children[0]];
                    const auto& cbag = nodes[node.children[0]].bag;
                    const auto v = node.vertex;
                    const auto p = pos_of(cbag, v);
                    for (std::size_t k = 0; k < child.states.size(); ++k) {
                        const auto& cs = child.states[k];
                        const bool v_in = (cs.in >> p) & 1U;
                        // bag neighbours of v that can take one more edge
                        std::vector<std::pair<std::size_t, std::size_t>> options;  // (child pos, edge)
                        if (v_in)
                            for (std::size_t q = 0; q < cbag.size(); ++q) {
                                if (q == p || !((cs.in >> q) & 1U)) continue;
                                auto it = edge_index_.find(std::minmax(v, cbag[q]));
                                if (it == edge_index_.end()) continue;
                                if (cs.d[q] >= g_.b[cbag[q]]) continue;
                                options.emplace_back(q, it->second);
                            }
                        const long room = v_in ? g_.b[v] - cs.d[p] : 0;
                        for (std::uint32_t sub = 0; sub < (1U << options.size()); ++sub) {
                            if (std::popcount(sub) > room) continue;
                            State s;
                            s.flags = cs.flags;
                            s.d.reserve(node.bag.size());
                            Rational base = 0;
                            SparseColumn col;
                            std::vector<std::uint8_t> bump(cbag.size(), 0);
                            for (std::size_t o = 0; o < options.size(); ++o)
                                if ((sub >> o) & 1U) {
                                    bump[options[o].first] = 1;
                                    base += g_.edges[options[o].second].w;
                                    col.emplace_back(options[o].second, Rational(1));
                                }
                            for (std::size_t q = 0, to = 0; q < cbag.size(); ++q) {
                                if (q == p) continue;
                                s.d.push_back(static_cast<std::uint8_t>(cs.d[q] + bump[q]));
                                if ((cs.in >> q) & 1U) s.in |= 1U << to;
                                ++to;
                            }
                            if (v_in) col.emplace_back(m + v, Rational(1));
                            std::sort(col.begin(), col.end(),
                                      [](const auto& a, const auto& b) { return a.first < b.first; });
                            const auto tail = intern(here, std::move(s));
                            protos.push_back({tail, {child.ids[k]}, std::move(base), v_in ? static_cast<long>(v) : -1,
                                              std::move(col)});
                        }
                    }
                    break;
                }
                case NodeType::Join: {
                    const auto& left = table[node.children[0]];
                    const auto& right = table[node.children[1]];
                    std::map<std::uint32_t, std::vector<std::size_t>> by_set;
                    for (std::size_t k = 0; k < right.states.size(); ++k) by_set[right.states[k].in].push_back(k);
                    for (std::size_t a = 0; a < left.states.size(); ++a) {
                        const auto& ls = left.states[a];
                        auto it = by_set.find(ls.in);
                        if (it == by_set.end()) continue;
                        for (auto bidx : it->second) {
                            const auto& rs = right.states[bidx];
                            State s;
                            s.in = ls.in;
                            s.flags = static_cast<std::uint8_t>(ls.flags | rs.flags);
                            s.d.resize(node.bag.size());
                            bool ok = true;
                            for (std::size_t q = 0; q < node.bag.size() && ok; ++q) {
                                const long sum = ls.d[q] + rs.d[q];
                                ok = sum <= g_.b[node.bag[q]];
                                s.d[q] = static_cast<std::uint8_t>(sum);
                            }
                            if (!ok) continue;
                            const auto tail = intern(here, std::move(s));
                            protos.push_back({tail, {left.ids[a], right.ids[bidx]}, Rational(0), -1, {}});
                        }
                    }
                    break;
                }
            }
        }

        std::vector<VertexId> starts;
        const auto& root = table[nice_.root];
        for (std::size_t k = 0; k < root.states.size(); ++k)
            if (grand || root.states[k].flags == 3) starts.push_back(root.ids[k]);

        std::vector<Arc> arcs;
        DpFormulation f;
        f.g.target_dim = m + g_.vertex_count;
        f.g.offset = RationalVector(f.g.target_dim);
        f.c.arc_weights.reserve(protos.size());
        std::vector<long> vertex_of;
        for (auto& p : protos) {
            arcs.push_back({p.tail, std::move(p.heads)});
            f.g.columns.push_back(std::move(p.col));
            f.c.arc_weights.push_back(std::move(p.base));
            vertex_of.push_back(p.vertex);
        }
        f.graph = HyperDag(vertex_count, std::move(arcs), std::move(starts));

        // drop states the starts cannot reach; arc ids ride through the weight slot
        RationalVector tag(vertex_of.size());
        for (std::size_t e = 0; e < vertex_of.size(); ++e) tag[e] = static_cast<long>(e);
        DpFormulation tagged{f.graph, f.g, {tag, Rational(0)}};
        const auto pruned = prune_unreachable(tagged);
        Skeleton sk;
        sk.graph = pruned.graph;
        sk.g = pruned.g;
        for (const auto& t : pruned.c.arc_weights) {
            const auto e = static_cast<std::size_t>(t.num().get_si());
            sk.base.push_back(f.c.arc_weights[e]);
            sk.vertex.push_back(vertex_of[e]);
        }
        return sk;
    }

    WeightedGraph g_;
    BMatchingDpOptions options_;
    TreeDecomposition td_;
    NiceTreeDecomposition nice_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index_;
    mutable std::shared_ptr<const Skeleton> admissible_skeleton_;
    mutable std::shared_ptr<const Skeleton> grand_skeleton_;
    mutable std::optional<Rational> grand_;
};

inline NucleolusResult nucleolus_of_b_matching(const BMatchingGame& game, const NucleolusOptions& options = {}) {
    return compute_nucleolus(game, options);
}

}  // namespace nucleo

#endif  // NUCLEO_BMATCHING_HPP
