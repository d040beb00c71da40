// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "test_support.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace nucleo;

namespace {

struct Solved {
    std::size_t n = 0;
    std::vector<Rational> table;
    NucleolusResult result;
};

std::vector<Solved> solved;

// Every solved instance feeds criteria 3 and 8.
bool record(const Game& g, std::ostream& why) {
    const auto n = g.players();
    const auto table = explicit_table(g);
    auto r = compute_nucleolus(g);
    const auto brute = brute_force_nucleolus_allocation(n, table);
    const bool same = r.allocation == brute;
    if (!same) why << "n=" << n << " relaxed and brute-force allocations differ; ";
    solved.push_back({n, table, std::move(r)});
    return same;
}

bool voting_equivalence(std::ostream& why) {
    std::mt19937_64 rng(1001);
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 3 + static_cast<std::size_t>(k) % 6;
        ok = record(fixtures::random_voting_game(rng, n), why) && ok;
    }
    why << "100 games, n 3..8";
    return ok;
}

bool matching_equivalence(std::ostream& why) {
    std::mt19937_64 rng(1002);
    bool ok = true;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k) % 6;
        ok = record(BMatchingGame(fixtures::random_graph(rng, n, 2, 3)), why) && ok;
    }
    why << "50 graphs, n 2..7, b <= 2, width <= 3";
    return ok;
}

bool lexicographic_optimality(std::ostream& why) {
    std::mt19937_64 rng(1003);
    std::size_t bad = 0;
    for (const auto& s : solved) {
        const auto best = excess_profile(s.n, s.table, s.result.allocation);
        for (int k = 0; k < 100; ++k) {
            const auto y = fixtures::random_imputation(rng, s.n, s.table);
            if (compare_profiles(best, excess_profile(s.n, s.table, y)) == std::strong_ordering::less) ++bad;
        }
    }
    why << solved.size() << " games checked, " << bad << " dominated";
    return !solved.empty() && bad == 0;
}

std::uint64_t residue_sum(const CongruencySpec& spec, const HyperPath& p) {
    std::uint64_t s = 0;
    for (auto e : p.arcs) s += spec.arc_residues[e];
    return s % spec.p;
}

bool transform_exactness(std::ostream& why) {
    std::mt19937_64 rng(1004);
    std::size_t calls = 0, bad = 0;
    for (int k = 0; k < 100; ++k) {
        const auto f = fixtures::random_formulation(rng, 12, 2, true);
        const auto all = enumerate_paths(f.graph, 1'000'000);
        for (std::uint64_t p : {2, 3, 5}) {
            CongruencySpec spec{p, std::vector<std::uint64_t>(f.graph.arc_count()), 0};
            for (auto& a : spec.arc_residues) a = rng() % p;
            for (std::uint64_t t = 0; t < p; ++t) {
                spec.target = t;
                const auto out = congruency_transform(f, spec);
                ++calls;
                std::uint64_t bound = f.graph.arc_count();
                for (std::size_t i = 0; i <= f.graph.max_heads(); ++i) bound *= p;
                std::map<std::pair<std::vector<std::string>, std::string>, int> expected;
                for (const auto& path : all)
                    if (residue_sum(spec, path) == t) ++expected[std::make_pair(to_strings(f.g.apply(path)), f.c.apply(path).str())];
                if (out.graph.arc_count() > bound || fixtures::path_images(out, 1'000'000) != expected) ++bad;
            }
        }
    }
    // pipeline bound on wider arcs
    for (int k = 0; k < 100; ++k) {
        const auto f = fixtures::random_formulation(rng, 10, 4, true);
        const auto r = reduce_arity(f);
        for (std::uint64_t p : {2, 3, 5}) {
            CongruencySpec spec{p, std::vector<std::uint64_t>(r.graph.arc_count()), rng() % p};
            for (auto& a : spec.arc_residues) a = rng() % p;
            const auto out = congruency_transform(r, spec);
            ++calls;
            if (out.graph.arc_count() > p * p * p * f.graph.vertex_count() * f.graph.arc_count()) ++bad;
        }
    }
    why << calls << " transforms, " << bad << " failures";
    return bad == 0;
}

bool arity_reduction(std::ostream& why) {
    std::mt19937_64 rng(1005);
    std::size_t bad = 0, identity_checked = 0;
    for (int k = 0; k < 100; ++k) {
        const auto f = fixtures::random_formulation(rng, 8, 5, true);
        const auto r = reduce_arity(f);
        bool all_wide = true;
        std::size_t identity = 0;
        for (const auto& a : f.graph.arcs()) {
            all_wide = all_wide && a.heads.size() >= 2;
            identity += a.heads.size() >= 2 ? a.heads.size() - 1 : 1;
        }
        if (r.graph.max_heads() > 2) ++bad;
        if (r.graph.arc_count() != identity) ++bad;
        if (all_wide) ++identity_checked;
        if (evaluate(r).value != evaluate(f).value) ++bad;
    }
    why << "100 instances (" << identity_checked << " with every arc of two or more heads), " << bad << " failures";
    return bad == 0;
}

bool rank_equivalence(std::ostream& why) {
    std::mt19937_64 rng(1006);
    std::size_t bad = 0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + rng() % 10;
        const std::size_t rows = 1 + rng() % 12;
        std::vector<Indicator> m;
        for (std::size_t r = 0; r < rows; ++r) m.push_back(fixtures::random_indicator(rng, n));
        std::size_t best = 0;
        for (auto p : prime_set(n).primes) best = std::max(best, rank_mod_p(m, p));
        if (best != rank_over_q(m, n)) ++bad;
    }
    why << "200 matrices, " << bad << " disagreements";
    return bad == 0;
}

bool spot_values(std::ostream& why) {
    const auto lc = least_core(VotingGame({1, 1, 1}, 2));
    const Rational third(1, 3);
    const bool lc_ok = lc.epsilon == Rational(-1, 3) && lc.point == RationalVector{third, third, third};
    const BMatchingGame path(WeightedGraph{3, {{0, 1, Rational(1)}, {1, 2, Rational(1)}}, {1, 1, 1}});
    const auto x = compute_nucleolus(path).allocation;
    const bool path_ok = x == RationalVector{0, 1, 0};
    why << "least core " << lc.epsilon << " at (" << lc.point[0] << "," << lc.point[1] << "," << lc.point[2]
        << "), path nucleolus (" << x[0] << "," << x[1] << "," << x[2] << ")";
    return lc_ok && path_ok;
}

bool loop_bound(std::ostream& why) {
    std::size_t bad = 0, max_iter = 0;
    for (const auto& s : solved) {
        const auto& its = s.result.iterations;
        max_iter = std::max(max_iter, its.size());
        if (its.size() > s.n) ++bad;
        std::size_t prev = 1;  // the grand coalition
        for (const auto& it : its) {
            if (it.rank <= prev) ++bad;
            prev = it.rank;
        }
    }
    why << solved.size() << " instances, at most " << max_iter << " iterations, " << bad << " violations";
    return !solved.empty() && bad == 0;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<bool(std::ostream&)>>> criteria{
        {"nucleolus equals brute force on 100 voting games", voting_equivalence},
        {"nucleolus equals brute force on 50 b-matching games", matching_equivalence},
        {"nucleolus dominates 100 random imputations per game", lexicographic_optimality},
        {"congruency transform exact and within size bounds", transform_exactness},
        {"arity reduction bounded, counted and value preserving", arity_reduction},
        {"rank over Q equals max rank over the prime set", rank_equivalence},
        {"least core and path nucleolus spot values", spot_values},
        {"at most n iterations with strictly increasing rank", loop_bound},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::ostringstream why;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = criteria[i].second(why);
        } catch (const std::exception& e) {
            why << "exception: " << e.what();
        }
        const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ["
                  << why.str() << "] " << secs.count() << " s" << std::endl;
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
