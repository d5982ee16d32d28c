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

#include "twistkit/spectrum.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "twistkit/errors.hpp"

using namespace twistkit;

namespace {

constexpr double kPi = std::numbers::pi;

ModeSpectrum two_equal_modes() { return validate_spectrum(std::vector<Mode>{{"a", 0.7}, {"b", 0.7}}); }

}  // namespace

TEST(spectrum, validate_sets_mu_to_smallest_omega) {
  auto s = validate_spectrum(std::vector<Mode>{{"k0", 2.0}, {"k1", 0.5}});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.mu(), 0.5);
  EXPECT_EQ(s.index_of("k1"), 1u);
  EXPECT_FALSE(s.index_of("k2"));
}

TEST(spectrum, empty_is_trivial) {
  auto s = validate_spectrum(std::vector<Mode>{});
  EXPECT_TRUE(s.empty());
  EXPECT_FALSE(s.mu());
}

TEST(spectrum, rejects_nonpositive_or_nonfinite_omega) {
  EXPECT_THROW(validate_spectrum(std::vector<Mode>{{"k", 0.0}}), AdmissibilityError);
  EXPECT_THROW(validate_spectrum(std::vector<Mode>{{"k", -1.0}}), AdmissibilityError);
  EXPECT_THROW(validate_spectrum(std::vector<Mode>{{"k", std::nan("")}}), AdmissibilityError);
  EXPECT_THROW(validate_spectrum(std::vector<Mode>{{"k", INFINITY}}), AdmissibilityError);
}

TEST(spectrum, mu_hint_must_be_a_lower_bound) {
  EXPECT_EQ(validate_spectrum(std::vector<Mode>{{"k", 1.0}}, 0.5).mu(), 0.5);
  EXPECT_THROW(validate_spectrum(std::vector<Mode>{{"k", 1.0}}, 1.5), AdmissibilityError);
  EXPECT_THROW(validate_spectrum(std::vector<Mode>{{"k", 1.0}}, 0.0), AdmissibilityError);
}

TEST(spectrum, duplicate_labels) {
  EXPECT_THROW(validate_spectrum(std::vector<Mode>{{"k", 1.0}, {"k", 2.0}}), ConfigError);
}

TEST(spectrum, revalidation_is_idempotent) {
  auto s = validate_spectrum(std::vector<Mode>{{"k0", 1.0}, {"k1", 3.0}}, 0.25);
  EXPECT_EQ(validate_spectrum(s), s);
}

TEST(spectrum, twisted_circle_modes) {
  auto s = twisted_circle_spectrum(kPi, 0.0, {-1, 1});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].label, "n=-1");
  EXPECT_DOUBLE_EQ(s.omega(0), 0.5);
  EXPECT_DOUBLE_EQ(s.omega(1), 0.5);
  EXPECT_DOUBLE_EQ(s.omega(2), 1.5);

  auto massive = twisted_circle_spectrum(0.0, 0.75, {0, 0});
  EXPECT_DOUBLE_EQ(massive.omega(0), 0.75);
}

TEST(spectrum, twisted_circle_zero_mode) {
  EXPECT_THROW(twisted_circle_spectrum(0.0, 0.0, {-2, 2}), AdmissibilityError);
  EXPECT_THROW(twisted_circle_spectrum(2.0 * kPi, 0.0, {-2, 2}), AdmissibilityError);
  EXPECT_THROW(twisted_circle_spectrum(1.0, -0.5, {0, 1}), AdmissibilityError);
  EXPECT_THROW(twisted_circle_spectrum(1.0, 0.5, {2, 1}), ConfigError);
}

TEST(spectrum, unitary_symmetry_alignment) {
  auto s = validate_spectrum(std::vector<Mode>{{"k", 1.0}});
  EXPECT_NO_THROW(validate_symmetry(s, UnitarySymmetry{{Complex{0.0, 1.0}}}));
  EXPECT_THROW(validate_symmetry(s, UnitarySymmetry{{Complex{1.0, 0.0}, Complex{1.0, 0.0}}}), ConfigError);
  EXPECT_THROW(validate_symmetry(s, UnitarySymmetry{{Complex{1.1, 0.0}}}), ConfigError);
}

TEST(spectrum, antiunitary_pairing_must_preserve_omega) {
  auto s = validate_spectrum(std::vector<Mode>{{"a", 0.7}, {"b", 0.9}});
  const Complex one{1.0, 0.0};
  EXPECT_NO_THROW(validate_symmetry(s, AntiunitarySymmetry{{0, 1}, {one, one}}));
  EXPECT_THROW(validate_symmetry(s, AntiunitarySymmetry{{1, 0}, {one, one}}), ConfigError);
  EXPECT_THROW(validate_symmetry(s, AntiunitarySymmetry{{0, 0}, {one, one}}), ConfigError);
  EXPECT_THROW(validate_symmetry(s, AntiunitarySymmetry{{0}, {one}}), ConfigError);
}

TEST(spectrum, twist_angle_range) {
  EXPECT_DOUBLE_EQ(twist_angle({1.0, 0.0}).theta, 0.0);
  EXPECT_DOUBLE_EQ(twist_angle({-1.0, 0.0}).theta, kPi);
  EXPECT_DOUBLE_EQ(twist_angle({0.0, -1.0}).theta, 1.5 * kPi);
  EXPECT_EQ(twist_angle({1.0, -1e-300}).theta, 0.0);
}

TEST(spectrum, symmetry_angles_kind) {
  EXPECT_EQ(symmetry_angles(identity_symmetry(3)).size(), 3u);
  EXPECT_THROW(symmetry_angles(AntiunitarySymmetry{{0}, {Complex{1.0, 0.0}}}), KindError);
  EXPECT_EQ(kind_of(identity_symmetry(1)), SymmetryKind::Unitary);
}

TEST(spectrum, square_of_conjugation_is_identity) {
  auto s = validate_spectrum(std::vector<Mode>{{"k", 0.3}});
  auto eig = square_eigenvalues(s, AntiunitarySymmetry{{0}, {std::polar(1.0, 0.4)}});
  ASSERT_EQ(eig.size(), 1u);
  EXPECT_NEAR(std::abs(eig[0].phase - 1.0), 0.0, 1e-15);
}

TEST(spectrum, square_of_swap_with_phases) {
  // V e_a = i e_b, V e_b = e_a: V^2 e_a = conj(i) e_a, V^2 e_b = i e_b.
  auto eig = square_eigenvalues(two_equal_modes(),
                                AntiunitarySymmetry{{1, 0}, {Complex{0.0, 1.0}, Complex{1.0, 0.0}}});
  ASSERT_EQ(eig.size(), 2u);
  EXPECT_NEAR(std::abs(eig[0].phase - Complex(0.0, -1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eig[1].phase - Complex(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_EQ(eig[0].omega, 0.7);
}

TEST(spectrum, square_of_three_cycle) {
  // pi = (0 1 2): pi^2 is a 3-cycle with weight product 1, roots of unity.
  auto s = validate_spectrum(std::vector<Mode>{{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
  const Complex one{1.0, 0.0};
  auto eig = square_eigenvalues(s, AntiunitarySymmetry{{1, 2, 0}, {one, one, one}});
  ASSERT_EQ(eig.size(), 3u);
  Complex product{1.0, 0.0};
  for (const auto& e : eig) {
    EXPECT_NEAR(std::abs(std::pow(e.phase, 3) - one), 0.0, 1e-14);
    product *= e.phase;
  }
  EXPECT_NEAR(std::abs(product - one), 0.0, 1e-14);
}
