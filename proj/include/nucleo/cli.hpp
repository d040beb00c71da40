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

#ifndef NUCLEO_CLI_HPP
#define NUCLEO_CLI_HPP

// Command-line front end. Reports go to `out` as JSON with sorted keys;
// traces, DP dumps and timings go to `err`, so reports stay byte-identical
// across runs.
//
// Exit codes: 0 success, 1 input error, 2 verification mismatch.

#include "nucleo/io.hpp"
#include "nucleo/nucleolus.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace nucleo::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kMismatch = 2 };

struct RunConfig {
    std::string command;
    std::string input;
    std::string allocation;
    bool trace_cuts = false;
    bool dump_dp = false;
    std::size_t brute_force_max_n = 8;
    std::size_t width_budget = BMatchingDpOptions{}.state_budget;
};

namespace detail {

inline Json dp_report(const DpFormulation& f) {
    const auto v = validate(f.graph);
    Json problems = Json::array();
    for (const auto& p : v.problems) problems.push_back(p);
    return {{"vertices", f.graph.vertex_count()},
            {"arcs", f.graph.arc_count()},
            {"starts", f.graph.starts().size()},
            {"max_heads", f.graph.max_heads()},
            {"solution_dim", f.solution_dim()},
            {"acyclic", v.acyclic},
            {"starts_are_sources", v.starts_are_sources},
            {"reachable", v.reachable},
            {"no_common_descendants", no_common_descendants(f.graph)},
            {"problems", problems}};
}

inline GameInstance load(const RunConfig& cfg, const std::string& path) {
    return parse_instance(read_json_file(path), BMatchingDpOptions{cfg.width_budget});
}

inline int validate_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto j = read_json_file(cfg.input);
    Json rep;
    bool ok = true;
    if (j.is_object() && j.value("type", "") == "b_matching" && j.contains("tree_decomposition")) {
        const auto g = parse_graph(j);
        const auto td = parse_tree_decomposition(j.at("tree_decomposition"));
        const auto d = validate_decomposition(g, td);
        Json problems = Json::array();
        for (const auto& p : d.problems) problems.push_back(p);
        rep["decomposition"] = {{"valid", d.ok}, {"width", d.width}, {"problems", problems}};
        if (!d.ok) {
            rep["ok"] = false;
            out << rep.dump(2) << "\n";
            for (const auto& p : d.problems) err << "invalid decomposition: " << p << "\n";
            return kInputError;
        }
    }
    const auto inst = parse_instance(j, BMatchingDpOptions{cfg.width_budget});
    const auto& game = as_game(inst);
    rep["type"] = type_name(inst);
    rep["players"] = game.players();
    if (const auto* bm = std::get_if<BMatchingGame>(&inst)) {
        const auto d = validate_decomposition(bm->graph(), bm->decomposition());
        const auto nice_problems = check_nice(bm->nice_decomposition());
        const auto nd = validate_decomposition(bm->graph(), bm->nice_decomposition().as_tree_decomposition());
        Json np = Json::array();
        for (const auto& p : nice_problems) np.push_back(p);
        for (const auto& p : nd.problems) np.push_back(p);
        rep["decomposition"] = {{"valid", d.ok}, {"width", d.width}, {"problems", Json::array()}};
        rep["nice_decomposition"] = {{"nodes", bm->nice_decomposition().nodes.size()},
                                     {"width", bm->nice_decomposition().width()},
                                     {"problems", np}};
        ok = ok && d.ok && nice_problems.empty() && nd.ok;
    }
    const auto f = game.min_excess_dp(RationalVector(game.players()));
    if (cfg.dump_dp) dump(err, f);
    rep["dp"] = dp_report(f);
    ok = ok && rep["dp"]["acyclic"].get<bool>() && rep["dp"]["starts_are_sources"].get<bool>() &&
         rep["dp"]["no_common_descendants"].get<bool>();
    rep["ok"] = ok;
    out << rep.dump(2) << "\n";
    return ok ? kOk : kInputError;
}

inline int verify_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    if (fs::is_directory(cfg.input)) {
        for (const auto& e : fs::directory_iterator(cfg.input))
            if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
    } else if (fs::exists(cfg.input)) {
        files.emplace_back(cfg.input);
    } else {
        throw InputError("cannot open " + cfg.input);
    }

    Json entries = Json::array();
    std::size_t match = 0, mismatch = 0, skipped = 0, errors = 0;
    for (const auto& path : files) {
        Json e{{"file", path.filename().string()}};
        try {
            const auto inst = load(cfg, path.string());
            const auto& game = as_game(inst);
            const auto n = game.players();
            e["players"] = n;
            if (n > cfg.brute_force_max_n) {
                e["status"] = "skipped";
                ++skipped;
                entries.push_back(e);
                continue;
            }
            std::ostream* trace = cfg.trace_cuts ? &err : nullptr;
            const auto relaxed = compute_nucleolus(game, {trace});
            const auto brute = brute_force_nucleolus(n, explicit_table(game));
            e["relaxed"] = rationals_json(relaxed.allocation);
            e["brute_force"] = rationals_json(brute.allocation);
            const bool same = relaxed.allocation == brute.allocation;
            e["status"] = same ? "match" : "mismatch";
            if (same) ++match;
            else {
                ++mismatch;
                err << "mismatch: " << path.filename().string() << "\n";
            }
        } catch (const std::exception& ex) {
            e["status"] = "error";
            e["message"] = ex.what();
            err << path.filename().string() << ": " << ex.what() << "\n";
            ++errors;
        }
        entries.push_back(e);
    }
    Json rep{{"instances", entries},
             {"summary", {{"match", match}, {"mismatch", mismatch}, {"skipped", skipped}, {"error", errors}}}};
    out << rep.dump(2) << "\n";
    if (mismatch) return kMismatch;
    return errors ? kInputError : kOk;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::ostream* trace = cfg.trace_cuts ? &err : nullptr;
    if (cfg.command == "validate") return validate_command(cfg, out, err);
    if (cfg.command == "verify") return verify_command(cfg, out, err);

    const auto inst = load(cfg, cfg.input);
    const auto& game = as_game(inst);
    if (cfg.command == "solve") {
        const auto r = compute_nucleolus(game, {trace});
        if (cfg.dump_dp) dump(err, game.min_excess_dp(r.allocation));
        out << nucleolus_report(inst, r).dump(2) << "\n";
        return kOk;
    }
    if (cfg.command == "leastcore") {
        const auto lc = least_core(game, {trace});
        Json rep{{"type", type_name(inst)},
                 {"players", game.players()},
                 {"epsilon", lc.epsilon.str()},
                 {"point", rationals_json(lc.point)},
                 {"cuts", lc.cuts}};
        out << rep.dump(2) << "\n";
        return kOk;
    }
    if (cfg.command == "min-excess") {
        const auto x = parse_allocation(cfg.allocation, game.players());
        const auto f = game.min_excess_dp(x);
        if (cfg.dump_dp) dump(err, f);
        const auto r = evaluate(f);
        Json rep{{"type", type_name(inst)}, {"allocation", rationals_json(x)}, {"feasible", r.feasible}};
        if (r.feasible) {
            const auto sol = f.g.apply(r.witness);
            const auto coords = game.coalition_coords();
            Indicator s(game.players());
            for (std::size_t i = 0; i < s.size(); ++i) s[i] = sol[coords[i]].is_zero() ? 0 : 1;
            rep["coalition"] = coalition_json(s);
            rep["excess"] = (-r.value).str();
            rep["value"] = (r.value + coalition_sum(x, s)).str();
        } else {
            rep["coalition"] = nullptr;
        }
        out << rep.dump(2) << "\n";
        return kOk;
    }
    throw InputError("unknown command '" + cfg.command + "'");
}

}  // namespace detail

/// Parses arguments and runs one command.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact nucleolus solver for weighted voting and b-matching games", "nucleo"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_flag("--trace-cuts", cfg.trace_cuts, "Log every generated cut to stderr");
    app.add_flag("--dump-dp", cfg.dump_dp, "Print the min-excess DP formulation to stderr");
    app.add_option("--brute-force-max-n", cfg.brute_force_max_n, "Largest n that verify checks by brute force");
    app.add_option("--width-budget", cfg.width_budget, "Maximum number of b-matching DP states");

    auto* solve = app.add_subcommand("solve", "Compute the nucleolus");
    solve->add_option("file", cfg.input, "Instance JSON")->required();
    auto* lc = app.add_subcommand("leastcore", "Least-core value and one optimal point");
    lc->add_option("file", cfg.input, "Instance JSON")->required();
    auto* mx = app.add_subcommand("min-excess", "Minimum-excess coalition at an allocation");
    mx->add_option("file", cfg.input, "Instance JSON")->required();
    mx->add_option("--allocation", cfg.allocation, "JSON array of rational strings")->required();
    auto* val = app.add_subcommand("validate", "Check the decomposition and DP formulation");
    val->add_option("file", cfg.input, "Instance JSON")->required();
    auto* ver = app.add_subcommand("verify", "Compare against the brute-force nucleolus");
    ver->add_option("path", cfg.input, "Instance JSON or directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

    const auto start = std::chrono::steady_clock::now();
    int code = kOk;
    try {
        code = detail::dispatch(cfg, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = kInputError;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    err << "elapsed: " << elapsed.count() << " s\n";
    return code;
}

}  // namespace nucleo::cli

#endif  // NUCLEO_CLI_HPP
