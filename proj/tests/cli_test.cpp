#include <seqdiag/cli.hpp>
#include <seqdiag/model.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace seqdiag {
namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "seqdiag");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("seqdiag_cli_" + name);
}

TEST(Cli, Sequence) {
    const auto r = run({"sequence", "--symptom", "poor-idling"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "| 1 | air-leak | 15.0 | 0.527 | 28.5 |"));
    EXPECT_TRUE(contains(r.out, "| 2 | idle-speed | 15.0 | 0.263 | 57.0 |"));
    EXPECT_TRUE(contains(r.out, "| 3 | clogged-jet | 30.0 | 0.105 | 285 |"));
    EXPECT_TRUE(contains(r.out, "| 4 | excess-fuel |"));
    EXPECT_TRUE(contains(r.out, "Expected cost: 31.6 min"));
}

TEST(Cli, SequenceCsv) {
    const auto r = run({"--format", "csv", "sequence", "--symptom", "poor-idling"});
    ASSERT_EQ(r.code, kExitOk);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "rank,component,cost,prob,cp_ratio");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(Cli, SequenceSingleton) {
    const auto path = temp_path("single.json");
    std::ofstream(path) << R"({"name":"tiny","symptoms":[{"id":"one","name":"one","source":"synthetic",)"
                           R"("components":[{"id":"only","name":"only","cost":12,"prob":1}]}],"expert_rules":[]})";
    const auto r = run({"--model", path.string(), "sequence", "--symptom", "one"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "| 1 | only |"));
    EXPECT_TRUE(contains(r.out, "Expected cost: 12.0 min"));
    std::filesystem::remove(path);
}

TEST(Cli, UnknownSymptomListsIds) {
    const auto r = run({"sequence", "--symptom", "poor-idlin"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_TRUE(contains(r.err, "poor-idling"));
    EXPECT_TRUE(contains(r.err, "charging-system-fails"));
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, Evaluate) {
    auto r = run({"evaluate", "--symptom", "poor-idling", "--order", "idle-speed,clogged-jet,air-leak,excess-fuel"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "Expected cost: 49.7 min"));
    EXPECT_TRUE(contains(r.out, "| 4 | excess-fuel |"));

    r = run({"evaluate", "--symptom", "poor-idling", "--order", "air-leak,idle-speed,clogged-jet,excess-fuel"});
    EXPECT_TRUE(contains(r.out, "Expected cost: 31.6 min"));

    r = run({"evaluate", "--symptom", "poor-idling", "--order", "excess-fuel,clogged-jet,idle-speed,air-leak"});
    ASSERT_EQ(r.code, kExitOk);
    const std::regex ec(R"(Expected cost: ([0-9.]+) min)");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.out, m, ec));
    EXPECT_GE(std::stod(m[1].str()), 31.6);
}

TEST(Cli, EvaluateBadPermutation) {
    const auto r = run({"evaluate", "--symptom", "poor-idling", "--order", "air-leak,idle-speed,air-leak"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, Compare) {
    auto r = run({"compare"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "| poor-idling | 31.6 | 31.6 | 49.7 | 31.6 |"));
    r = run({"--format", "csv", "compare"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_TRUE(contains(r.out, "expert,symptom,ec_expert,ec_cp,reduction_pct\n"));
    EXPECT_TRUE(contains(r.out, "expert-2,poor-idling,49.72972972972972"));
}

TEST(Cli, Oracle) {
    const auto r = run({"oracle", "--symptom", "poor-idling"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_TRUE(contains(r.out, "C/P optimal: EC 31.56 over 24 permutations"));
}

TEST(Cli, SensitivityAndCdf) {
    const auto path = temp_path("cdf.csv");
    const auto r = run({"sensitivity", "--symptom", "poor-idling", "--s", "2", "--emit-cdf", path.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "quantile 0.15:      5.5 min"));
    EXPECT_TRUE(contains(r.out, "seed 19880801"));
    EXPECT_EQ(r.out, run({"sensitivity", "--symptom", "poor-idling", "--s", "2"}).out);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "diff,cumulative_fraction");
    double prev = 0.0, first = -1.0, last = -1.0;
    while (std::getline(in, line)) {
        const double f = std::stod(line.substr(line.find(',') + 1));
        EXPECT_GE(f, prev);
        if (first < 0) first = f;
        prev = last = f;
    }
    EXPECT_LT(first, 0.01);
    EXPECT_EQ(last, 1.0);
    std::filesystem::remove(path);
}

TEST(Cli, SensitivitySeedChangesOutput) {
    const auto a = run({"sensitivity", "--symptom", "poor-idling", "--samples", "2000", "--seed", "1"});
    const auto b = run({"sensitivity", "--symptom", "poor-idling", "--samples", "2000", "--seed", "2"});
    ASSERT_EQ(a.code, kExitOk);
    EXPECT_NE(a.out, b.out);
}

TEST(Cli, Sweep) {
    const auto r = run({"sensitivity", "--symptom", "poor-idling", "--sweep", "1:3:0.5"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(contains(r.out, "| 1.00 | 18.2 | 18.2 | 18.2 | 1.000 |"));
    EXPECT_TRUE(contains(r.out, "| 3.00 |"));
    EXPECT_EQ(run({"sensitivity", "--symptom", "poor-idling", "--sweep", "3:1"}).code, kExitUsage);
}

TEST(Cli, CriticalErrorFactor) {
    const auto r = run({"critical-s", "--symptom", "poor-idling"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::regex re(R"(s\* = ([0-9.]+))");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.out, m, re));
    const double s = std::stod(m[1].str());
    EXPECT_GE(s, 2.0);
    EXPECT_LE(s, 3.0);

    const auto capped = run({"critical-s", "--symptom", "poor-idling", "--s-max", "1.5"});
    ASSERT_EQ(capped.code, kExitOk);
    EXPECT_TRUE(contains(capped.out, "dominates"));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"sequence"}).code, kExitUsage);
    EXPECT_EQ(run({"--format", "xml", "compare"}).code, kExitUsage);
    EXPECT_EQ(run({"sensitivity", "--symptom", "poor-idling", "--samples", "0"}).code, kExitUsage);
    EXPECT_EQ(run({"sensitivity", "--symptom", "poor-idling", "--s", "0.5"}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, IoErrors) {
    EXPECT_EQ(run({"--model", "/nonexistent/model.json", "compare"}).code, kExitIo);
    EXPECT_EQ(run({"sensitivity", "--symptom", "poor-idling", "--samples", "100", "--emit-cdf",
                   "/nonexistent/dir/cdf.csv"})
                  .code,
              kExitIo);
}

TEST(Cli, InvalidModelFile) {
    const auto path = temp_path("bad.json");
    std::ofstream(path) << R"({"name":"x","symptoms":[{"id":"one","name":"one","source":"synthetic",)"
                           R"("components":[{"id":"a","name":"a","cost":-1,"prob":1}]}],"expert_rules":[]})";
    const auto r = run({"--model", path.string(), "compare"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_TRUE(contains(r.err, "symptoms[0].components[0].cost"));
    std::filesystem::remove(path);
}

TEST(Cli, BundledModelFileMatchesDefault) {
    const auto r = run({"--model", std::string(SEQDIAG_DATA_DIR) + "/motorcycle.json", "compare"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, run({"compare"}).out);
}

}  // namespace
}  // namespace seqdiag
