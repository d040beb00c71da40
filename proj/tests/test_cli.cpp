#include "nucleo/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace nucleo;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "nucleo");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string instance(const std::string& name) { return std::string(NUCLEO_DATA_DIR) + "/instances/" + name; }
std::string test_input(const std::string& name) { return std::string(NUCLEO_TEST_DATA_DIR) + "/" + name; }

}  // namespace

TEST(CliSolve, MajorityGame) {
    const auto r = run_cli({"solve", instance("voting_majority3.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["allocation"], Json({"1/3", "1/3", "1/3"}));
    EXPECT_EQ(j["type"], "weighted_voting");
    EXPECT_EQ(j["epsilons"][0], "-1/3");
    EXPECT_TRUE(j["stats"].contains("total_cuts"));
    EXPECT_NE(r.err.find("elapsed:"), std::string::npos);
}

TEST(CliSolve, PathMatchingGame) {
    const auto r = run_cli({"solve", instance("bm_path3.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(Json::parse(r.out)["allocation"], Json({"0", "1", "0"}));
}

TEST(CliSolve, ReportsAreByteIdenticalAcrossRuns) {
    for (const auto* name : {"voting_311.json", "bm_cycle4.json", "voting_random03.json"}) {
        const auto a = run_cli({"solve", instance(name)});
        const auto b = run_cli({"solve", instance(name)});
        ASSERT_EQ(a.code, cli::kOk) << a.err;
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(CliSolve, TraceAndDumpGoToStderr) {
    const auto plain = run_cli({"solve", instance("voting_majority3.json")});
    const auto traced = run_cli({"--trace-cuts", "--dump-dp", "solve", instance("voting_majority3.json")});
    ASSERT_EQ(traced.code, cli::kOk);
    EXPECT_EQ(plain.out, traced.out);
    EXPECT_NE(traced.err.find("level 1: add S = {"), std::string::npos);
    EXPECT_NE(traced.err.find(" <- {"), std::string::npos);
}

TEST(CliSolve, RationalsRoundTrip) {
    const auto r = run_cli({"solve", instance("bm_random03.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = Json::parse(r.out);
    for (const auto& v : j["allocation"]) {
        const auto s = v.get<std::string>();
        EXPECT_EQ(Rational::parse(s).str(), s);
    }
    for (const auto& v : j["epsilons"]) {
        const auto s = v.get<std::string>();
        EXPECT_EQ(Rational::parse(s).str(), s);
    }
}

TEST(CliLeastCore, MajorityGame) {
    const auto r = run_cli({"leastcore", instance("voting_majority3.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["epsilon"], "-1/3");
    EXPECT_EQ(j["point"], Json({"1/3", "1/3", "1/3"}));
}

TEST(CliMinExcess, PathMatchingGame) {
    const auto r = run_cli({"min-excess", instance("bm_path3.json"), "--allocation", R"(["0","1","0"])"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_TRUE(j["feasible"].get<bool>());
    EXPECT_EQ(j["excess"], "0");
    // ties at excess 0 go to the singleton {0}
    EXPECT_EQ(j["coalition"], Json({0}));
    EXPECT_EQ(j["value"], "0");
}

TEST(CliMinExcess, BadAllocationIsAnInputError) {
    EXPECT_EQ(run_cli({"min-excess", instance("voting_majority3.json"), "--allocation", R"(["1"])"}).code,
              cli::kInputError);
    EXPECT_EQ(run_cli({"min-excess", instance("voting_majority3.json"), "--allocation", "[1,"}).code,
              cli::kInputError);
}

TEST(CliValidate, GoodInstance) {
    const auto r = run_cli({"validate", instance("bm_cycle4.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_TRUE(j["ok"].get<bool>());
    EXPECT_TRUE(j["dp"]["no_common_descendants"].get<bool>());
    EXPECT_TRUE(j["nice_decomposition"]["problems"].empty());
}

TEST(CliValidate, MissingEdgeBagIsReportedWithWitness) {
    const auto r = run_cli({"validate", test_input("bad_decomposition.json")});
    EXPECT_EQ(r.code, cli::kInputError);
    EXPECT_NE(r.out.find("edge 1-2 is in no bag"), std::string::npos);
    EXPECT_NE(r.err.find("edge 1-2"), std::string::npos);
}

TEST(CliVerify, BundledInstancesAgree) {
    const auto r = run_cli({"verify", std::string(NUCLEO_DATA_DIR) + "/instances"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["instances"].size(), 50U);
    EXPECT_EQ(j["summary"]["mismatch"], 0);
    EXPECT_EQ(j["summary"]["error"], 0);
    EXPECT_EQ(j["summary"]["match"], 50);
}

TEST(CliVerify, SmallCapSkips) {
    const auto r = run_cli({"--brute-force-max-n", "2", "verify", instance("voting_majority3.json")});
    ASSERT_EQ(r.code, cli::kOk);
    EXPECT_EQ(Json::parse(r.out)["summary"]["skipped"], 1);
}

TEST(CliErrors, DistinctMessagesAndExitOne) {
    const auto malformed = run_cli({"solve", test_input("malformed.json")});
    EXPECT_EQ(malformed.code, cli::kInputError);
    EXPECT_NE(malformed.err.find("malformed JSON"), std::string::npos);

    const auto unknown = run_cli({"solve", test_input("unknown_type.json")});
    EXPECT_EQ(unknown.code, cli::kInputError);
    EXPECT_NE(unknown.err.find("unknown game type 'airport'"), std::string::npos);

    const auto empty = run_cli({"solve", test_input("no_imputation.json")});
    EXPECT_EQ(empty.code, cli::kInputError);
    EXPECT_NE(empty.err.find("no imputation"), std::string::npos);

    const auto missing = run_cli({"solve", test_input("does_not_exist.json")});
    EXPECT_EQ(missing.code, cli::kInputError);
    EXPECT_NE(missing.err.find("cannot open"), std::string::npos);

    EXPECT_EQ(run_cli({}).code, cli::kInputError);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kInputError);
}

TEST(CliParse, InstanceSchemas) {
    EXPECT_THROW(parse_instance(Json::parse(R"({"type":"weighted_voting","weights":[1,-1],"threshold":1})")),
                 InputError);
    EXPECT_THROW(parse_instance(Json::parse(R"({"type":"b_matching","n":2,"edges":[[0,0,"1"]],"b":[1,1]})")),
                 InputError);
    EXPECT_THROW(parse_instance(Json::parse(R"({"type":"b_matching","n":2,"edges":[[0,1,"1/0"]],"b":[1,1]})")),
                 InputError);
    const auto inst = parse_instance(Json::parse(R"({"type":"b_matching","n":2,"edges":[[0,1,"3/2"]],"b":[1,1]})"));
    EXPECT_EQ(as_game(inst).grand_value(), Rational(3, 2));
}
