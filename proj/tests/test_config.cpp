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

#include "twistkit/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "twistkit/errors.hpp"

using namespace twistkit;

TEST(config, minimal_defaults_to_identity) {
  auto c = parse_config(R"({"modes": [{"label": "k0", "omega": 0.5}]})");
  EXPECT_EQ(c.spectrum.size(), 1u);
  ASSERT_EQ(kind_of(c.symmetry), SymmetryKind::Unitary);
  EXPECT_EQ(std::get<UnitarySymmetry>(c.symmetry).phases[0], Complex(1.0, 0.0));
}

TEST(config, phases_by_angle_or_components) {
  auto c = parse_config(R"({
    "modes": [{"label": "a", "omega": 1}, {"label": "b", "omega": 2}],
    "mu": 0.5,
    "symmetry": {"kind": "unitary", "phases": [{"angle": 3.141592653589793}, {"re": 0, "im": 1}]}
  })");
  const auto& u = std::get<UnitarySymmetry>(c.symmetry);
  EXPECT_NEAR(u.phases[0].real(), -1.0, 1e-15);
  EXPECT_EQ(u.phases[1], Complex(0.0, 1.0));
  EXPECT_EQ(c.spectrum.mu(), 0.5);
}

TEST(config, antiunitary_pairing_by_label) {
  auto c = parse_config(R"({
    "modes": [{"label": "a", "omega": 1}, {"label": "b", "omega": 1}],
    "symmetry": {"kind": "antiunitary", "pairing": ["b", "a"], "phases": [{"re": 1, "im": 0}, {"re": 1, "im": 0}]}
  })");
  const auto& v = std::get<AntiunitarySymmetry>(c.symmetry);
  EXPECT_EQ(v.pairing, (std::vector<std::size_t>{1, 0}));
}

TEST(config, rejects_malformed_input) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config("[]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"modes": [], "extra": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"modes": [{"label": "k", "omega": "1"}]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"modes": [{"label": "k", "omega": 1, "mass": 2}]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"modes": [{"label": "k", "omega": 1}],
                                "symmetry": {"kind": "orthogonal", "phases": []}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"modes": [{"label": "k", "omega": 1}],
                                "symmetry": {"kind": "antiunitary", "pairing": ["x"], "phases": [{"angle": 0}]}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"modes": [{"label": "k", "omega": 1}],
                                "symmetry": {"kind": "unitary", "phases": [{"re": 2, "im": 0}]}})"),
               ConfigError);
}

TEST(config, inadmissible_spectrum) {
  EXPECT_THROW(parse_config(R"({"modes": [{"label": "k", "omega": 0}]})"), AdmissibilityError);
}

TEST(config, empty_spectrum) {
  auto c = parse_config(R"({"modes": []})");
  EXPECT_TRUE(c.spectrum.empty());
}

TEST(config, dump_round_trip) {
  auto c = parse_config(R"({
    "modes": [{"label": "a", "omega": 0.7}, {"label": "b", "omega": 0.7}],
    "symmetry": {"kind": "antiunitary", "pairing": ["b", "a"], "phases": [{"angle": 0.3}, {"re": 1, "im": 0}]}
  })");
  auto again = parse_config(dump_config(c));
  EXPECT_EQ(again.spectrum, c.spectrum);
  const auto& v1 = std::get<AntiunitarySymmetry>(c.symmetry);
  const auto& v2 = std::get<AntiunitarySymmetry>(again.symmetry);
  EXPECT_EQ(v1.pairing, v2.pairing);
  for (std::size_t k = 0; k < v1.phases.size(); ++k) EXPECT_EQ(v1.phases[k], v2.phases[k]);
}

TEST(config, load_from_file) {
  const auto path = std::filesystem::temp_directory_path() / "twistkit_config_test.json";
  std::ofstream(path) << R"({"modes": [{"label": "k", "omega": 1.25}]})";
  EXPECT_EQ(load_config(path).spectrum.omega(0), 1.25);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), ConfigError);
}
