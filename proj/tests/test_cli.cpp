#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int status;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(SCMM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    const int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("scmm_cli_test_" + name)).string();
}

} // namespace

TEST(CliTest, RatesSweep) {
    const auto r = run("rates --scheme cor1 --m 4 --p-grid 0.01:0.99:50");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(count_lines(r.out), 51u);
    EXPECT_EQ(r.out.rfind("scheme,m,l,q,p,epsilon,R_SW,R_KM,R_SV,R_AH,R_HK,eta,gamma\n", 0), 0u);
    EXPECT_NE(r.out.find("\ncor1,4,1,2,0.99,"), std::string::npos);
}

TEST(CliTest, CostsRow) {
    const auto r = run("costs --family StPolyDot --mA 8 --m 4 --sr 2 --sc 2 --N 12");
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("\nStPolyDotSym,8,4,4,2,2,12,0,12,64,144,144,48,"), std::string::npos);
}

TEST(CliTest, QuickVerify) {
    const auto r = run("verify --grid quick --seed 7");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find(", 0 mismatches\n"), std::string::npos);
}

TEST(CliTest, RunConfigAndSeedOverride) {
    const std::string cfg = temp_path("cfg.json"), out = temp_path("out.csv");
    std::ofstream(cfg) << R"({"family": "MatDot", "q": 17, "m_A": 8, "m": 4, "s_r": 2, "s_c": 2, "N": 9,
        "straggler": {"kind": "random_erasure", "prob": 0.2}, "trials": 3})";
    ASSERT_EQ(run("run --config " + cfg + " -o " + out).status, 0);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(count_lines(ss.str()), 4u);
    const auto a = run("run --config " + cfg + " --seed 3"), b = run("run --config " + cfg + " --seed 3");
    EXPECT_EQ(a.out, b.out);
    std::filesystem::remove(cfg);
    std::filesystem::remove(out);
}

TEST(CliTest, EnvironmentSeed) {
    const std::string cmd = "SCMM_SEED=11 " + std::string(SCMM_CLI_PATH) + " km-sim --n 8 --trials 20 --kappa 4";
    FILE* p = popen(cmd.c_str(), "r");
    char buf[512] = {};
    std::string out;
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    pclose(p);
    EXPECT_NE(out.find(",11\n"), std::string::npos);
}

TEST(CliTest, FailuresLeaveNoOutput) {
    const std::string cfg = temp_path("bad.json"), out = temp_path("bad.csv");
    std::filesystem::remove(out);
    std::ofstream(cfg) << R"({"family": "PolyDot", "q": 17, "m_A": 8, "m": 4, "s_r": 3, "N": 9})";
    EXPECT_EQ(run("run --config " + cfg + " -o " + out).status, 2);
    EXPECT_FALSE(std::filesystem::exists(out));
    EXPECT_FALSE(std::filesystem::exists(out + ".partial"));
    EXPECT_NE(run("rates --p-grid 0.1:0.2").status, 0);
    EXPECT_NE(run("costs --family Nope").status, 0);
    EXPECT_NE(run("bogus").status, 0);
    std::filesystem::remove(cfg);
}
