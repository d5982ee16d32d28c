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

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace twistkit {

using Complex = std::complex<double>;

/// Tolerance on |phase| - 1 for symmetry phases.
inline constexpr double kUnitModulusTolerance = 1e-12;

struct Mode {
  std::string label;
  double omega = 0.0;

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Finite list of mode frequencies with ground-state energy mu.
///
/// Only `validate_spectrum` and `twisted_circle_spectrum` produce non-empty
/// spectra, so every instance satisfies omega >= mu > 0 with unique labels.
/// An empty spectrum is the trivial theory; its mu is unset.
class ModeSpectrum {
 public:
  ModeSpectrum() = default;

  std::span<const Mode> modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  bool empty() const { return modes_.empty(); }
  const Mode& operator[](std::size_t k) const { return modes_[k]; }
  double omega(std::size_t k) const { return modes_[k].omega; }
  std::optional<double> mu() const { return mu_; }

  std::optional<std::size_t> index_of(std::string_view label) const;

  friend bool operator==(const ModeSpectrum&, const ModeSpectrum&) = default;

 private:
  friend ModeSpectrum validate_spectrum(std::vector<Mode>, std::optional<double>);

  std::vector<Mode> modes_;
  std::optional<double> mu_;
};

/// Checks admissibility and label uniqueness.
///
/// Throws AdmissibilityError when some omega is not a positive finite number or
/// when `mu_hint` is not in (0, min omega]; ConfigError on duplicate labels.
ModeSpectrum validate_spectrum(std::vector<Mode> raw,
                               std::optional<double> mu_hint = std::nullopt);

/// Revalidates an existing spectrum; returns an equal value.
ModeSpectrum validate_spectrum(const ModeSpectrum& spectrum);

/// Inclusive integer interval [first, last].
struct IntRange {
  int first = 0;
  int last = 0;
};

/// Modes omega_n = sqrt((n + rho/2pi)^2 + m^2) of the circle Laplacian with
/// f(2pi) = e^{i rho} f(0), labelled "n=<n>".
ModeSpectrum twisted_circle_spectrum(double rho_twist, double mass, IntRange n_range);

/// S e_k = rho_k e_k.
struct UnitarySymmetry {
  std::vector<Complex> phases;
};

/// V(sum c_k e_k) = sum conj(c_k) eta_k e_{pi(k)}.
struct AntiunitarySymmetry {
  std::vector<std::size_t> pairing;  // pi, by mode index
  std::vector<Complex> phases;       // eta
};

using SymmetrySpec = std::variant<UnitarySymmetry, AntiunitarySymmetry>;

enum class SymmetryKind { Unitary, Antiunitary };

SymmetryKind kind_of(const SymmetrySpec& sym);

/// The identity symmetry on `n` modes.
UnitarySymmetry identity_symmetry(std::size_t n);

/// Throws ConfigError unless `sym` is aligned with `spectrum`: lengths match,
/// phases are unit modulus, the pairing is a permutation preserving omega.
void validate_symmetry(const ModeSpectrum& spectrum, const SymmetrySpec& sym);

/// theta in [0, 2pi) with e^{i theta} = rho.
struct TwistAngle {
  double theta = 0.0;
};

TwistAngle twist_angle(Complex rho);

/// Throws KindError for antiunitary input.
std::vector<TwistAngle> symmetry_angles(const SymmetrySpec& sym);

/// A frequency paired with a unit-modulus eigenvalue of a symmetry that
/// commutes with the frequency operator.
struct PhasedMode {
  double omega = 0.0;
  Complex phase{1.0, 0.0};
};

/// (omega_k, rho_k) for a unitary symmetry.
std::vector<PhasedMode> phased_modes(const ModeSpectrum& spectrum, const UnitarySymmetry& sym);

/// Joint eigenvalues of (V^2, Omega) for an antiunitary V.
///
/// V^2 e_k = conj(eta_k) eta_{pi(k)} e_{pi^2(k)}: a weighted cyclic shift on
/// every cycle of pi^2. A cycle of length L with weight product P contributes
/// the L roots of lambda^L = P, all at the cycle's common omega.
std::vector<PhasedMode> square_eigenvalues(const ModeSpectrum& spectrum,
                                           const AntiunitarySymmetry& sym);

}  // namespace twistkit
