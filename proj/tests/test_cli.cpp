// Copyright 2026 The qcvx Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcvx_cli.hpp"

namespace qcvx::cli {
namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::vector<std::string> fields(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) {
        out.push_back(f);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string temp_path(const std::string &name) {
    return (std::filesystem::path(::testing::TempDir()) / name).string();
}

TEST(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(run_cli({"--help"}).code, kOk);
    EXPECT_EQ(run_cli({}).code, kUsage);
    EXPECT_EQ(run_cli({"nonsense"}).code, kUsage);
    EXPECT_EQ(run_cli({"gradest"}).code, kUsage);
    EXPECT_EQ(run_cli({"gradest", "--eps", "abc"}).code, kUsage);
    EXPECT_EQ(run_cli({"subgrad", "--eps", "1e-9"}).code, kUsage);
    EXPECT_EQ(run_cli({"discretize"}).code, kUsage);
    EXPECT_EQ(run_cli({"optimize"}).code, kUsage);
    EXPECT_EQ(run_cli({"lowerbound", "--mode", "bogus"}).code, kUsage);
}

TEST(Cli, InfeasibleParametersAreUsageErrors) {
    const Result r = run_cli({"gradest", "--eps", "0.1"});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("48*pi"), std::string::npos);
}

TEST(Cli, GradestLinearHasZeroError) {
    const Result r = run_cli({"gradest", "--n", "2", "--eps", "1e-6", "--objective", "linear", "--grad", "0.5,-0.25",
                              "--trials", "4"});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto ls = lines(r.out);
    ASSERT_GE(ls.size(), 10u);
    EXPECT_EQ(ls[0].rfind("# qcvx 0.1.0 gradest", 0), 0u);
    EXPECT_EQ(ls[1], "seed,coordinate,estimate,true_gradient,abs_error,over_threshold");
    for (std::size_t i = 2; i < 10; ++i) {
        EXPECT_EQ(fields(ls[i])[4], "0") << ls[i];
    }
    EXPECT_NE(r.out.find("# summary failure_rate=0 "), std::string::npos);
}

TEST(Cli, OutputIsDeterministic) {
    const std::vector<std::string> args{"gradest", "--n", "1", "--eps", "1e-6", "--grad", "0.3", "--trials", "20",
                                        "--seed", "42"};
    const Result a = run_cli(args);
    const Result b = run_cli(args);
    ASSERT_EQ(a.code, kOk);
    EXPECT_EQ(a.out, b.out);
    std::vector<std::string> other = args;
    other.back() = "43";
    EXPECT_NE(run_cli(other).out, a.out);
}

TEST(Cli, DistributionFile) {
    const std::string path = temp_path("dist.csv");
    const Result r = run_cli({"gradest", "--eps", "1e-6", "--trials", "1", "--dist-out", path});
    ASSERT_EQ(r.code, kOk) << r.err;
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "k1,probability");
}

TEST(Cli, SubgradRowsAndBaseline) {
    const Result r = run_cli({"subgrad", "--n", "2", "--eps", "1e-10", "--r1", "0.1", "--trials", "3"});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(fields(ls[1])[5], "classical_queries");
    for (std::size_t i = 2; i < 5; ++i) {
        const auto f = fields(ls[i]);
        EXPECT_EQ(f[5], "3");
        EXPECT_LE(std::stod(f[1]), std::stod(f[2]));
    }
}

TEST(Cli, SubgradTable) {
    const Result r = run_cli({"subgrad", "--table", "--table-max-exp", "2"});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto ls = lines(r.out);
    // 3 measured + 6 small formula dimensions + 2 powers of ten
    EXPECT_EQ(ls.size(), 2u + 11u);
    EXPECT_EQ(fields(ls.back())[0], "100");
    EXPECT_EQ(fields(ls.back())[7], "1");
    EXPECT_EQ(fields(ls[2])[1], "measured");
}

TEST(Cli, OptimizeBallAndShiftedBox) {
    Result r = run_cli({"optimize", "--family", "ball", "--n", "2", "--direction", "0,1"});
    ASSERT_EQ(r.code, kOk) << r.err;
    auto f = fields(lines(r.out)[2]);
    EXPECT_NEAR(std::stod(f[4]), -1.0, 1e-2);
    EXPECT_EQ(f[7], "1");

    r = run_cli({"optimize", "--family", "sum_coords", "--s", "101"});
    ASSERT_EQ(r.code, kOk) << r.err;
    f = fields(lines(r.out)[2]);
    EXPECT_EQ(f[5], "-4");
    EXPECT_LE(std::stod(f[6]), 1e-2);
}

TEST(Cli, OptimizeNonconvergenceKeepsTheBestRow) {
    const Result r = run_cli({"optimize", "--family", "ball", "--n", "2", "--max-iter", "3"});
    EXPECT_EQ(r.code, kNoConvergence);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 3u);
    EXPECT_EQ(fields(ls[2])[7], "0");
}

TEST(Cli, ConfigFileWithCommandLineOverride) {
    const std::string path = temp_path("run.yaml");
    {
        std::ofstream cfg(path);
        cfg << "eps: 0.05\nseed: 5\nbody:\n  family: ball\n  n: 2\n  radius: 2\nobjective:\n  family: linear\n"
               "  c: [1, 0]\n";
    }
    const Result r = run_cli({"optimize", "--config", path, "--eps", "0.01"});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto ls = lines(r.out);
    EXPECT_NE(ls[0].find("eps=0.01"), std::string::npos);
    EXPECT_NE(ls[0].find("seed=5"), std::string::npos);
    const auto f = fields(ls[2]);
    EXPECT_EQ(f[0], "5");
    EXPECT_NEAR(std::stod(f[4]), -2.0, 0.02 * 1.0);
    EXPECT_EQ(run_cli({"optimize", "--config", temp_path("missing.yaml")}).code, kUsage);
}

TEST(Cli, OutFlagWritesAFile) {
    const std::string path = temp_path("lb.csv");
    const Result r = run_cli({"lowerbound", "--n", "2", "--trials", "50", "--out", path});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto ls = lines(buf.str());
    ASSERT_EQ(ls.size(), 6u);
    for (std::size_t i = 2; i < 6; ++i) {
        const auto f = fields(ls[i]);
        EXPECT_EQ(f[5], "0") << ls[i];
        if (!f[3].empty()) {
            EXPECT_EQ(f[3], f[2]) << ls[i];
        }
    }
}

TEST(Cli, DiscretizeWorkedExample) {
    const Result r = run_cli({"discretize", "--worked-example"});
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 6u);
    const std::vector<std::string> expect{"0.9", "0.7", "0.6", "0.4"};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(fields(ls[i + 2])[10], expect[i]);
    }
}

TEST(Cli, NonCompliantOracleIsAContractViolation) {
    const Result r = run_cli({"discretize", "--x", "0.2", "--c", "1", "--noise", "0.2"});
    EXPECT_EQ(r.code, kContractViolation);
    EXPECT_EQ(run_cli({"discretize", "--x", "0.2", "--c", "1", "--noise", "0.3"}).code, kUsage);
}

} // namespace
} // namespace qcvx::cli
