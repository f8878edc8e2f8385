#include "hspace/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hspace/io.hpp"
#include "test_support.hpp"

using namespace hspace;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("hspace_cli_" + std::string(
                    ::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream f(p);
        f << content;
        return p.string();
    }

    /// Manifest over A_n = {1/n}, n = 1..count.
    std::string reciprocal_manifest(std::size_t count) {
        std::ostringstream man;
        man << R"({"dim":1,"entries":[)";
        for (std::size_t n = 1; n <= count; ++n) {
            const std::string file = "r" + std::to_string(n) + ".csv";
            write(file, hspace::detail::format_double(1.0 / static_cast<double>(n)) + "\n");
            if (n > 1) man << ',';
            man << R"({"index":)" << n << R"(,"path":")" << file << R"("})";
        }
        man << "]}";
        return write("seq.json", man.str());
    }

    std::string alternating_manifest(std::size_t count) {
        std::ostringstream man;
        man << R"({"dim":1,"entries":[)";
        write("ev.csv", "0\n");
        write("od.csv", "10\n");
        for (std::size_t n = 1; n <= count; ++n) {
            if (n > 1) man << ',';
            man << R"({"index":)" << n << R"(,"path":")" << (n % 2 ? "ev.csv" : "od.csv")
                << R"("})";
        }
        man << "]}";
        return write("alt.json", man.str());
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DistOfASetWithItselfIsZero) {
    const std::string a = write("a.csv", "0,0\n1,1\n");
    const RunResult r = run({"dist", a, a});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["command"], "dist");
    EXPECT_EQ(j["rho_h"], 0.0);
    EXPECT_EQ(j["u_ab"], 0.0);
    EXPECT_EQ(j["u_ba"], 0.0);
}

TEST_F(CliTest, DistAndOracleAgreeBitExactly) {
    auto g = tsup::rng(701);
    for (int trial = 0; trial < 5; ++trial) {
        const PointSet a = tsup::random_cloud(g, 40 + g() % 80, 2);
        const PointSet b = tsup::random_cloud(g, 40 + g() % 80, 2);
        const std::string fa = dir_ / ("a" + std::to_string(trial) + ".csv");
        const std::string fb = dir_ / ("b" + std::to_string(trial) + ".csv");
        save_cloud(fa, a);
        save_cloud(fb, b);
        for (const char* metric : {"euclidean", "manhattan", "chebyshev"}) {
            const RunResult fast = run({"dist", fa, fb, "--metric", metric});
            const RunResult slow = run({"dist", fa, fb, "--metric", metric, "--oracle"});
            ASSERT_EQ(fast.code, 0);
            ASSERT_EQ(slow.code, 0);
            const json jf = json::parse(fast.out), js = json::parse(slow.out);
            EXPECT_EQ(jf["u_ab"], js["u_ab"]);
            EXPECT_EQ(jf["u_ba"], js["u_ba"]);
            EXPECT_EQ(jf["rho_h"], js["rho_h"]);
            EXPECT_EQ(jf["witness_ab"], js["witness_ab"]);
            EXPECT_EQ(jf["witness_ba"], js["witness_ba"]);
        }
    }
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
    const std::string man = reciprocal_manifest(60);
    const std::vector<std::string> cmd{"limit", man, "--epsilon", "0.05", "--grid", "0.01"};
    const RunResult first = run(cmd);
    const RunResult second = run(cmd);
    ASSERT_EQ(first.code, 0) << first.err;
    EXPECT_EQ(first.out, second.out);

    const std::string a = write("a.csv", "0.25,0.5\n-1,3\n");
    const RunResult d1 = run({"dist", a, a});
    const RunResult d2 = run({"dist", a, a});
    EXPECT_EQ(d1.out, d2.out);
}

TEST_F(CliTest, CauchyVerdictsOnKnownSequences) {
    const std::string man = reciprocal_manifest(50);
    const RunResult r = run({"cauchy", man, "--epsilon", "0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["command"], "cauchy");
    EXPECT_TRUE(j["is_cauchy"].get<bool>());
    EXPECT_EQ(j["modulus"], 8);

    // drifting sequence: A_n = {n}
    std::ostringstream man2;
    man2 << R"({"dim":1,"entries":[)";
    for (std::size_t n = 1; n <= 20; ++n) {
        const std::string file = "d" + std::to_string(n) + ".csv";
        write(file, std::to_string(n) + "\n");
        if (n > 1) man2 << ',';
        man2 << R"({"index":)" << n << R"(,"path":")" << file << R"("})";
    }
    man2 << "]}";
    const RunResult r2 = run({"cauchy", write("drift.json", man2.str()), "--epsilon", "0.5"});
    ASSERT_EQ(r2.code, 0);
    const json j2 = json::parse(r2.out);
    EXPECT_FALSE(j2["is_cauchy"].get<bool>());
    EXPECT_TRUE(j2["modulus"].is_null());
}

TEST_F(CliTest, LimitFindsTheClusterThroughTheGrid) {
    const std::string man = reciprocal_manifest(200);
    // lattice spacing 0.005 lands exactly on 0 after the one-step inflation
    const RunResult r = run({"limit", man, "--epsilon", "0.02", "--grid", "0.005"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_EQ(j["points"].size(), 1u);
    EXPECT_LE(std::fabs(j["points"][0][0].get<double>()), 0.02);
    EXPECT_TRUE(j["cauchy_at_epsilon"].get<bool>());
    EXPECT_EQ(j["trace"].size(), 200u);
}

TEST_F(CliTest, LimitAcceptsACandidatesFile) {
    const std::string man = reciprocal_manifest(200);
    const std::string cand = write("cand.csv", "0\n");
    const RunResult r = run({"limit", man, "--epsilon", "0.02", "--candidates", cand});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_EQ(j["points"].size(), 1u);
    EXPECT_LE(std::fabs(j["points"][0][0].get<double>()), 0.02);
    EXPECT_EQ(j["candidates_examined"], 201);
}

TEST_F(CliTest, LemmaSharpnessWithAnExplicitLimit) {
    const std::string man = reciprocal_manifest(200);
    const std::string zero = write("zero.csv", "0\n");
    const RunResult r = run({"lemma", man, "--x", "1", "--epsilon", "1", "--m", "0",
                             "--limit-csv", zero, "--limit-epsilon", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["distance"].get<double>(), 1.0);
    EXPECT_TRUE(j["verdict"].get<bool>());
}

TEST_F(CliTest, LemmaWithComputedLimitAndChain) {
    const std::string man = reciprocal_manifest(200);
    const RunResult r = run({"lemma", man, "--x", "1", "--epsilon", "1", "--m", "0",
                             "--grid", "0.005", "--limit-epsilon", "0.02", "--chain", "--b",
                             "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["verdict"].get<bool>());
    EXPECT_GT(j["distance"].get<double>(), 0.9);
    EXPECT_LE(j["distance"].get<double>(), 1.0);
    ASSERT_TRUE(j.contains("chain"));
    const json& c = j["chain"];
    EXPECT_EQ(c["indices"][0], 2);
    EXPECT_LT(c["total_gap"].get<double>(), c["gap_budget"].get<double>() + 1e-12);
    EXPECT_LT(c["distance_to_estimate"].get<double>(), c["estimate_bound"].get<double>());
}

TEST_F(CliTest, LemmaHypothesisFailureExitsWithAnalysisError) {
    const std::string man = reciprocal_manifest(30);
    const RunResult r = run({"lemma", man, "--x", "1000", "--epsilon", "1", "--m", "0"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("index 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, LiminfOnAlternatingFixtureIsEmpty) {
    const std::string man = alternating_manifest(40);
    const RunResult r = run({"liminf", man, "--epsilon", "0.5"});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, LimsupOnAlternatingFixtureKeepsBoth) {
    const std::string man = alternating_manifest(40);
    const RunResult r = run({"limsup", man, "--epsilon", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_EQ(j["points"].size(), 2u);
    EXPECT_EQ(j["points"][0][0], 0.0);
    EXPECT_EQ(j["points"][1][0], 10.0);
}

TEST_F(CliTest, AgreeReportsTheUnconditionalIdentity) {
    const std::string man = alternating_manifest(40);
    const RunResult r = run({"agree", man, "--epsilon", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["agree"].get<bool>());
    EXPECT_TRUE(j["upper_tracks_intersection"].get<bool>());
    EXPECT_TRUE(j["liminf_points"].empty());
    EXPECT_EQ(j["limsup_points"].size(), 2u);

    const std::string man2 = reciprocal_manifest(100);
    const RunResult r2 = run({"agree", man2, "--epsilon", "0.05", "--grid", "0.01"});
    ASSERT_EQ(r2.code, 0) << r2.err;
    const json j2 = json::parse(r2.out);
    EXPECT_TRUE(j2["agree"].get<bool>());
}

TEST_F(CliTest, IfsRunWritesAttractorAndTrace) {
    const std::string sys =
        (fs::path(HSPACE_SOURCE_DIR) / "data/ifs/cantor.json").string();
    const std::string seed = write("seed.csv", "0\n1\n");
    const std::string outp = (dir_ / "att.csv").string();
    const std::string tracep = (dir_ / "trace.csv").string();
    const RunResult r = run({"ifs", sys, "--seed", seed, "--iters", "6", "--budget", "4096",
                             "--out", outp, "--trace", tracep});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["final_size"], 128);
    EXPECT_EQ(j["steps"].size(), 6u);
    const PointSet att = load_cloud(outp);
    EXPECT_EQ(att.size(), 128u);
    std::ifstream tf(tracep);
    std::string header;
    std::getline(tf, header);
    EXPECT_EQ(header, "step,size,gap,delta");
}

TEST_F(CliTest, IfsRejectsExpandingSystems) {
    const std::string sys =
        write("grow.json", R"({"dim":1,"maps":[{"linear":[2.0],"offset":[0.0]}]})");
    const std::string seed = write("seed.csv", "1\n");
    const RunResult r = run({"ifs", sys, "--seed", seed, "--iters", "3", "--budget", "10"});
    EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, UsageAndDataErrorsUseDistinctExitCodes) {
    EXPECT_EQ(run({"dist"}).code, 1);                    // missing positionals
    EXPECT_EQ(run({"frobnicate"}).code, 1);              // unknown subcommand
    EXPECT_EQ(run({}).code, 1);                          // no subcommand
    const std::string a = write("a.csv", "1\n");
    EXPECT_EQ(run({"dist", a, (dir_ / "nope.csv").string()}).code, 2);
    const std::string bad = write("bad.csv", "1,x\n");
    EXPECT_EQ(run({"dist", a, bad}).code, 2);
    const std::string b2 = write("b2.csv", "1,2\n");
    EXPECT_EQ(run({"dist", a, b2}).code, 2);             // dimension mismatch
    EXPECT_EQ(run({"dist", a, a, "--metric", "taxicab"}).code, 1);
    const RunResult help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("dist"), std::string::npos);
}

TEST_F(CliTest, InstalledBinaryMatchesInProcessOutput) {
    const std::string a = write("a.csv", "0,0\n3,4\n");
    const RunResult inproc = run({"dist", a, a});
    ASSERT_EQ(inproc.code, 0);

    const std::string outfile = (dir_ / "bin.out").string();
    const std::string cmd =
        std::string(HSPACE_CLI_BIN) + " dist " + a + " " + a + " > " + outfile;
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    std::ifstream f(outfile);
    std::stringstream buf;
    buf << f.rdbuf();
    EXPECT_EQ(buf.str(), inproc.out);
}
