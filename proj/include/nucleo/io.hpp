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

#ifndef NUCLEO_IO_HPP
#define NUCLEO_IO_HPP

// JSON instances and reports. Rationals always travel as strings.
//
//   {"type":"weighted_voting","weights":[1,1,1],"threshold":2}
//   {"type":"b_matching","n":3,"edges":[[0,1,"1"],[1,2,"1"]],"b":[1,1,1],
//    "tree_decomposition":{"bags":[[0,1],[1,2]],"edges":[[0,1]],"root":0}}

#include "nucleo/bmatching.hpp"
#include "nucleo/nucleolus.hpp"
#include "nucleo/rational.hpp"
#include "nucleo/voting.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nucleo {

using Json = nlohmann::json;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using GameInstance = std::variant<VotingGame, BMatchingGame>;

inline const Game& as_game(const GameInstance& inst) {
    return std::visit([](const auto& g) -> const Game& { return g; }, inst);
}

inline std::string type_name(const GameInstance& inst) {
    return std::holds_alternative<VotingGame>(inst) ? "weighted_voting" : "b_matching";
}

namespace detail {

inline const Json& field(const Json& j, const char* key) {
    if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline long int_field(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
    return j.get<long>();
}

inline std::size_t index_field(const Json& j, const char* what) {
    const long v = int_field(j, what);
    if (v < 0) throw InputError(std::string(what) + " must be non-negative");
    return static_cast<std::size_t>(v);
}

inline Rational rational_field(const Json& j, const char* what) {
    try {
        if (j.is_string()) return Rational::parse(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<long>());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
    throw InputError(std::string(what) + " must be a rational string");
}

}  // namespace detail

inline TreeDecomposition parse_tree_decomposition(const Json& j) {
    if (!j.is_object()) throw InputError("tree_decomposition must be an object");
    TreeDecomposition td;
    const auto& bags = detail::field(j, "bags");
    if (!bags.is_array()) throw InputError("bags must be an array");
    for (const auto& bag : bags) {
        if (!bag.is_array()) throw InputError("each bag must be an array");
        std::vector<std::size_t> b;
        for (const auto& v : bag) b.push_back(detail::index_field(v, "bag vertex"));
        td.bags.push_back(std::move(b));
    }
    const auto& edges = detail::field(j, "edges");
    if (!edges.is_array()) throw InputError("decomposition edges must be an array");
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2) throw InputError("decomposition edge must be a pair");
        td.edges.emplace_back(detail::index_field(e[0], "tree node"), detail::index_field(e[1], "tree node"));
    }
    td.root = j.contains("root") ? detail::index_field(j.at("root"), "root") : 0;
    return td;
}

inline WeightedGraph parse_graph(const Json& j) {
    WeightedGraph g;
    g.vertex_count = detail::index_field(detail::field(j, "n"), "n");
    const auto& edges = detail::field(j, "edges");
    if (!edges.is_array()) throw InputError("edges must be an array");
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 3) throw InputError("edge must be [u, v, \"w\"]");
        g.edges.push_back({detail::index_field(e[0], "edge endpoint"), detail::index_field(e[1], "edge endpoint"),
                           detail::rational_field(e[2], "edge weight")});
    }
    const auto& b = detail::field(j, "b");
    if (!b.is_array()) throw InputError("b must be an array");
    for (const auto& cap : b) g.b.push_back(detail::int_field(cap, "degree cap"));
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return g;
}

inline GameInstance parse_instance(const Json& j, const BMatchingDpOptions& opts = {}) {
    if (!j.is_object()) throw InputError("instance must be a JSON object");
    const auto& type = detail::field(j, "type");
    if (!type.is_string()) throw InputError("type must be a string");
    const auto t = type.get<std::string>();
    if (t == "weighted_voting") {
        const auto& w = detail::field(j, "weights");
        if (!w.is_array() || w.empty()) throw InputError("weights must be a nonempty array");
        std::vector<long> weights;
        for (const auto& x : w) {
            const long v = detail::int_field(x, "weight");
            if (v < 0) throw InputError("negative weight");
            weights.push_back(v);
        }
        const long threshold = detail::int_field(detail::field(j, "threshold"), "threshold");
        return VotingGame(std::move(weights), threshold);
    }
    if (t == "b_matching") {
        auto g = parse_graph(j);
        if (g.vertex_count == 0) throw InputError("graph without vertices");
        std::optional<TreeDecomposition> td;
        if (j.contains("tree_decomposition")) {
            td = parse_tree_decomposition(j.at("tree_decomposition"));
            const auto rep = validate_decomposition(g, *td);
            if (!rep.ok) {
                std::string msg = "invalid tree decomposition:";
                for (const auto& p : rep.problems) msg += " " + p + ";";
                throw InputError(msg);
            }
        }
        return BMatchingGame(std::move(g), std::move(td), opts);
    }
    throw InputError("unknown game type '" + t + "'");
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

inline Json rationals_json(const RationalVector& v) {
    Json arr = Json::array();
    for (const auto& r : v) arr.push_back(r.str());
    return arr;
}

inline Json coalition_json(const Indicator& s) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i]) arr.push_back(i);
    return arr;
}

inline RationalVector parse_allocation(const std::string& text, std::size_t n) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_array() || j.size() != n)
        throw InputError("allocation must be an array of " + std::to_string(n) + " rationals");
    RationalVector x;
    for (const auto& v : j) x.push_back(detail::rational_field(v, "allocation entry"));
    return x;
}

inline Json nucleolus_report(const GameInstance& inst, const NucleolusResult& r) {
    Json rep;
    rep["type"] = type_name(inst);
    rep["players"] = as_game(inst).players();
    rep["allocation"] = rationals_json(r.allocation);
    Json eps = Json::array();
    Json fixed = Json::array();
    std::size_t tests = 0;
    for (const auto& it : r.iterations) {
        eps.push_back(it.epsilon.str());
        fixed.push_back({{"coalition", coalition_json(it.coalition)}, {"constant", it.constant.str()}});
        tests += it.fixedness_tests;
    }
    rep["epsilons"] = eps;
    rep["fixed_coalitions"] = fixed;
    Json cuts = Json::array();
    for (const auto& it : r.iterations) cuts.push_back(it.cuts);
    rep["stats"] = {{"iterations", r.iterations.size()},
                    {"cuts_per_iteration", cuts},
                    {"total_cuts", r.total_cuts},
                    {"lp_rounds", r.lp_rounds},
                    {"oracle_calls", r.oracle_calls},
                    {"fixedness_tests", tests}};
    return rep;
}

}  // namespace nucleo

#endif  // NUCLEO_IO_HPP
