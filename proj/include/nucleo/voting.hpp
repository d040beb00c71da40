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

#ifndef NUCLEO_VOTING_HPP
#define NUCLEO_VOTING_HPP

// Weighted voting games: nu(S) = 1 iff w(S) >= T.
//
// The minimum-excess DP is a knapsack chain over the players, built twice:
// losing coalitions carry their taken weight (at most T - 1), winning ones
// their residual demand max(T - w(S), 0). Two flag bits (took someone, left
// someone out) restrict the chains to nonempty proper coalitions.

#include "nucleo/hyperdp.hpp"
#include "nucleo/nucleolus.hpp"
#include "nucleo/rational.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace nucleo {

class VotingGame final : public Game {
public:
    static constexpr std::size_t kStateBudget = 20'000'000;

    VotingGame(std::vector<long> weights, long threshold) : w_(std::move(weights)), t_(threshold) {
        if (w_.empty()) throw std::invalid_argument("voting game needs at least one player");
        for (auto x : w_)
            if (x < 0) throw std::invalid_argument("negative weight");
    }

    [[nodiscard]] const std::vector<long>& weights() const { return w_; }
    [[nodiscard]] long threshold() const { return t_; }

    [[nodiscard]] std::size_t players() const override { return w_.size(); }

    [[nodiscard]] Rational value(const Indicator& s) const override {
        if (s.size() != w_.size()) throw std::invalid_argument("coalition has wrong length");
        long total = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i]) total += w_[i];
        return total >= t_ ? 1 : 0;
    }

    [[nodiscard]] Rational grand_value() const override { return value(Indicator(w_.size(), 1)); }

    [[nodiscard]] Rational singleton_value(std::size_t i) const override {
        Indicator s(w_.size(), 0);
        s.at(i) = 1;
        return value(s);
    }

    [[nodiscard]] std::vector<std::size_t> coalition_coords() const override {
        std::vector<std::size_t> c(w_.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = i;
        return c;
    }

    [[nodiscard]] DpFormulation min_excess_dp(const RationalVector& x) const override {
        if (x.size() != w_.size()) throw std::invalid_argument("allocation has wrong length");
        const auto& sk = skeleton();
        DpFormulation f{sk.graph, sk.g, {RationalVector(sk.graph.arc_count()), Rational(0)}};
        for (std::size_t e = 0; e < sk.player.size(); ++e) {
            Rational c = sk.bonus[e] ? 1 : 0;
            if (sk.player[e] >= 0) c -= x[static_cast<std::size_t>(sk.player[e])];
            f.c.arc_weights[e] = std::move(c);
        }
        return f;
    }

    /// Vertices of the chain before flag bits, times the flag factor 4.
    [[nodiscard]] std::size_t state_bound() const {
        const auto cap = static_cast<std::size_t>(std::max<long>(t_, 0)) + 1;
        return 4 * 2 * (w_.size() + 1) * cap;
    }

private:
    struct Skeleton {
        HyperDag graph;
        AffineMap g;
        std::vector<long> player;  // taken player per arc, -1 on skip arcs
        std::vector<bool> bonus;   // arcs leaving the winning chain's start
    };

    const Skeleton& skeleton() const {
        if (!skeleton_) skeleton_ = std::make_shared<Skeleton>(build_skeleton());
        return *skeleton_;
    }

    Skeleton build_skeleton() const {
        const std::size_t n = w_.size();
        const long tmax = std::max<long>(t_, 0);
        const std::size_t cap = static_cast<std::size_t>(tmax) + 1;  // states 0..tmax
        if (state_bound() > kStateBudget) throw DpError("state table too large");
        auto index = [&](std::size_t fam, std::size_t layer, std::size_t state, unsigned flags) {
            return ((fam * (n + 1) + layer) * cap + state) * 4 + flags;
        };
        const std::size_t total = 2 * (n + 1) * cap * 4;
        std::vector<bool> seen(total, false);

        struct Proto {
            std::size_t tail, head;
            long player;
            bool bonus;
        };
        std::vector<Proto> protos;

        // losing chain: state = taken weight <= T - 1; winning chain: residual demand
        const std::size_t start0 = index(0, 0, 0, 0);
        const std::size_t start1 = index(1, 0, static_cast<std::size_t>(tmax), 0);
        if (t_ >= 1) seen[start0] = true;
        seen[start1] = true;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t fam = 0; fam < 2; ++fam) {
                for (std::size_t st = 0; st < cap; ++st) {
                    for (unsigned fl = 0; fl < 4; ++fl) {
                        const auto from = index(fam, k, st, fl);
                        if (!seen[from]) continue;
                        const bool bonus = fam == 1 && k == 0;
                        // take player k
                        long next;
                        bool ok = true;
                        if (fam == 0) {
                            next = static_cast<long>(st) + w_[k];
                            ok = next <= t_ - 1;
                        } else {
                            next = std::max<long>(static_cast<long>(st) - w_[k], 0);
                        }
                        if (ok) {
                            const auto to = index(fam, k + 1, static_cast<std::size_t>(next), fl | 1U);
                            seen[to] = true;
                            protos.push_back({from, to, static_cast<long>(k), bonus});
                        }
                        const auto to = index(fam, k + 1, st, fl | 2U);
                        seen[to] = true;
                        protos.push_back({from, to, -1, bonus});
                    }
                }
            }
        }

        // keep vertices that reach a valid terminal
        std::vector<bool> keep(total, false);
        for (std::size_t fam = 0; fam < 2; ++fam)
            for (std::size_t st = 0; st < cap; ++st) {
                const auto v = index(fam, n, st, 3);
                if (seen[v] && (fam == 0 || st == 0)) keep[v] = true;
            }
        for (auto it = protos.rbegin(); it != protos.rend(); ++it)
            if (keep[it->head]) keep[it->tail] = true;

        std::vector<std::size_t> id(total, static_cast<std::size_t>(-1));
        std::size_t next_id = 0;
        for (std::size_t v = 0; v < total; ++v)
            if (keep[v]) id[v] = next_id++;
        if (next_id > state_bound()) throw DpError("voting chain exceeds its size bound");

        Skeleton sk;
        std::vector<Arc> arcs;
        sk.g.target_dim = n;
        sk.g.offset = RationalVector(n);
        for (const auto& p : protos) {
            if (!keep[p.head]) continue;
            arcs.push_back({id[p.tail], {id[p.head]}});
            SparseColumn col;
            if (p.player >= 0) col.emplace_back(static_cast<std::size_t>(p.player), Rational(1));
            sk.g.columns.push_back(std::move(col));
            sk.player.push_back(p.player);
            sk.bonus.push_back(p.bonus);
        }
        std::vector<VertexId> starts;
        if (t_ >= 1 && keep[start0]) starts.push_back(id[start0]);
        if (keep[start1]) starts.push_back(id[start1]);
        sk.graph = HyperDag(next_id, std::move(arcs), std::move(starts));
        return sk;
    }

    std::vector<long> w_;
    long t_;
    mutable std::shared_ptr<const Skeleton> skeleton_;
};

inline NucleolusResult nucleolus_of_voting(const VotingGame& game, const NucleolusOptions& options = {}) {
    return compute_nucleolus(game, options);
}

}  // namespace nucleo

#endif  // NUCLEO_VOTING_HPP
