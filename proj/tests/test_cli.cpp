// Copyright (c) 2026 The twistkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "twistkit/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "twistkit/config.hpp"

namespace fs = std::filesystem;
using twistkit::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() / ("twistkit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

const char* kOneModeFlip = R"({"modes": [{"label": "k0", "omega": 1.0}],
  "symmetry": {"kind": "unitary", "phases": [{"re": -1, "im": 0}]}})";

const char* kOneModePhase = R"({"modes": [{"label": "k0", "omega": 1.0}],
  "symmetry": {"kind": "unitary", "phases": [{"angle": 0.0}]}})";

const char* kSwap = R"({"modes": [{"label": "a", "omega": 1.0}, {"label": "b", "omega": 1.0}],
  "symmetry": {"kind": "antiunitary", "pairing": ["b", "a"], "phases": [{"re": 1, "im": 0}, {"re": 1, "im": 0}]}})";

const char* kConjugation = R"({"modes": [{"label": "k0", "omega": 1.0}],
  "symmetry": {"kind": "antiunitary", "pairing": ["k0"], "phases": [{"re": 1, "im": 0}]}})";

std::string default_config() { return std::string(TWISTKIT_SOURCE_DIR) + "/configs/default.json"; }

}  // namespace

TEST(cli, format_double) {
  using twistkit::cli::format_double;
  EXPECT_EQ(format_double(0.25), "2.5000000000000000e-01");
  EXPECT_EQ(format_double(-3.0), "-3.0000000000000000e+00");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(INFINITY), "inf");
}

TEST(cli, partition_sign_flip_example) {
  Scratch dir;
  auto cfg = dir.write("flip.json", kOneModeFlip);
  auto r = invoke({"partition", "--config", cfg, "--beta", "0.69314718055994531"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "beta,z_untwisted,z_twisted,lower_bound,oracle_z,rel_err,tail_bound");
  EXPECT_NE(rows[1].find(",4.4444444444444442e-01,"), std::string::npos) << rows[1];
  EXPECT_NE(rows[1].find(",4.0000000000000000e+00,"), std::string::npos) << rows[1];
}

TEST(cli, partition_several_betas_and_factors) {
  Scratch dir;
  auto factors = dir.path("factors.csv");
  auto r = invoke({"partition", "--config", default_config(), "--beta", "0.5,1,2", "--factors", factors});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 4u);
  auto f = lines(slurp(factors));
  ASSERT_GE(f.size(), 2u);
  EXPECT_NE(f[1].find("k0"), std::string::npos);
}

TEST(cli, partition_empty_spectrum) {
  Scratch dir;
  auto cfg = dir.write("empty.json", R"({"modes": [], "symmetry": {"kind": "unitary", "phases": []}})");
  auto r = invoke({"partition", "--config", cfg, "--beta", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].substr(0, rows[1].find(",0.0000000000000000e+00")),
            "1.0000000000000000e+00,1.0000000000000000e+00,1.0000000000000000e+00,1.0000000000000000e+00,1.0000000000000000e+00");
}

TEST(cli, partition_antiunitary) {
  Scratch dir;
  auto cfg = dir.write("swap.json", kSwap);
  auto r = invoke({"partition", "--config", cfg, "--beta", "0.69314718055994531"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(rows[1].find(",1.77777777777777"), std::string::npos) << rows[1];
}

TEST(cli, invalid_input_exit_codes) {
  Scratch dir;
  auto bad = dir.write("bad.json", R"({"modes": [{"label": "k0", "omega": -1.0}]})");
  EXPECT_EQ(invoke({"partition", "--config", bad, "--beta", "1"}).code, 2);
  auto garbage = dir.write("garbage.json", "{not json");
  EXPECT_EQ(invoke({"partition", "--config", garbage, "--beta", "1"}).code, 2);
  EXPECT_EQ(invoke({"partition", "--config", dir.path("missing.json"), "--beta", "1"}).code, 2);
  EXPECT_EQ(invoke({"partition", "--config", default_config(), "--beta", "-1"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--config", default_config(), "--suite", "nonsense"}).code, 2);
  EXPECT_EQ(invoke({"kernel", "--config", default_config(), "--beta", "1", "--grid", "100"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  auto conj = dir.write("conj.json", kConjugation);
  auto r = invoke({"kernel", "--config", conj, "--beta", "1", "--grid", "8"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(cli, help_exits_cleanly) { EXPECT_EQ(invoke({"--help"}).code, 0); }

TEST(cli, kernel_grid_table) {
  Scratch dir;
  auto cfg = dir.write("one.json", kOneModePhase);
  auto r = invoke({"kernel", "--config", cfg, "--beta", "1", "--grid", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 64u * 64u + 1u);
  EXPECT_EQ(rows[0], "t,s,re,im,tail_bound");
  // Untwisted diagonal value coth(beta omega / 2) / (2 omega).
  const double expected = 0.5 / std::tanh(0.5);
  std::istringstream row(rows[1]);
  std::vector<double> fields;
  for (std::string cell; std::getline(row, cell, ',');) fields.push_back(std::stod(cell));
  ASSERT_EQ(fields.size(), 5u);
  EXPECT_EQ(fields[0], 0.0);
  EXPECT_EQ(fields[1], 0.0);
  EXPECT_NEAR(fields[2], expected, 1e-14);
  EXPECT_NEAR(fields[3], 0.0, 1e-15);
}

TEST(cli, kernel_verify_agrees) {
  Scratch dir;
  auto out = dir.path("k.csv");
  auto r = invoke({"kernel", "--config", default_config(), "--beta", "1.3", "--grid", "32", "--verify", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("max three-way disagreement = ");
  ASSERT_NE(pos, std::string::npos) << r.out;
  const double gap = std::stod(r.out.substr(pos + 29));
  EXPECT_LT(gap, 1e-6);
}

TEST(cli, kernel_output_is_reproducible) {
  Scratch dir;
  auto a = dir.path("a.csv"), b = dir.path("b.csv");
  ASSERT_EQ(invoke({"kernel", "--config", default_config(), "--beta", "2", "--grid", "16", "--output", a}).code, 0);
  ASSERT_EQ(invoke({"kernel", "--config", default_config(), "--beta", "2", "--grid", "16", "--output", b}).code, 0);
  const auto text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
}

TEST(cli, kernel_fourier_source) {
  Scratch dir;
  auto cfg = dir.write("one.json", kOneModeFlip);
  auto closed = invoke({"kernel", "--config", cfg, "--beta", "1", "--grid", "4"});
  auto fourier = invoke({"kernel", "--config", cfg, "--beta", "1", "--grid", "4", "--source", "fourier"});
  ASSERT_EQ(closed.code, 0);
  ASSERT_EQ(fourier.code, 0);
  EXPECT_EQ(lines(closed.out).size(), lines(fourier.out).size());
}

TEST(cli, kernel_extended_has_sector_column) {
  Scratch dir;
  auto cfg = dir.write("conj.json", kConjugation);
  auto r = invoke({"kernel", "--config", cfg, "--beta", "1", "--grid", "4", "--extended", "--verify"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "t,s,sector,re,im,tail_bound");
  EXPECT_NE(r.out.find(",dual.k0:field.k0,"), std::string::npos);
  EXPECT_EQ(rows.size(), 4u * 4u * 4u + 1u);
}

TEST(cli, capacity_exit_code) {
  ::setenv("TWISTKIT_CAPACITY", "10", 1);
  auto r = invoke({"partition", "--config", default_config(), "--beta", "1", "--cutoff", "20"});
  ::unsetenv("TWISTKIT_CAPACITY");
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(cli, verify_suites) {
  Scratch dir;
  auto tc = invoke({"verify", "--config", default_config(), "--suite", "tc"});
  EXPECT_EQ(tc.code, 0) << tc.out;
  EXPECT_NE(tc.out.find("summary: "), std::string::npos);
  EXPECT_NE(tc.out.find("PASS "), std::string::npos);
  auto swap = dir.write("swap.json", kSwap);
  auto part = invoke({"verify", "--config", swap, "--suite", "partition"});
  EXPECT_EQ(part.code, 0) << part.out;
  auto rf = invoke({"verify", "--config", swap, "--suite", "realfield"});
  EXPECT_EQ(rf.code, 0) << rf.out;
}

TEST(cli, verify_all_default_config) {
  const auto start = std::chrono::steady_clock::now();
  auto r = invoke({"verify", "--config", default_config(), "--suite", "all"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL "), std::string::npos) << r.out;
  EXPECT_LT(seconds, 60.0);
}

TEST(cli, spectrum_generation_round_trips) {
  Scratch dir;
  auto out = dir.path("circle.json");
  auto r = invoke({"spectrum", "gen", "twisted-circle", "--rho", "0.5", "--mass", "0.3", "--n-min", "-2", "--n-max",
                   "2", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  auto config = twistkit::load_config(out);
  EXPECT_EQ(config.spectrum.size(), 5u);
  EXPECT_EQ(twistkit::dump_config(config), slurp(out));
  auto part = invoke({"partition", "--config", out, "--beta", "1"});
  EXPECT_EQ(part.code, 0) << part.err;
}
