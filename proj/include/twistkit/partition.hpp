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

#include <string>
#include <vector>

#include "twistkit/spectrum.hpp"

namespace twistkit {

/// Tr(e^{-beta H}) = prod_k (1 - e^{-beta omega_k})^{-2}.
///
/// All functions here throw DomainError unless beta is positive and finite.
double z_untwisted(const ModeSpectrum& spectrum, double beta);

/// prod_k |1 - rho_k e^{-beta omega_k}|^{-2}. The imaginary part is zero.
Complex z_twisted_unitary(const ModeSpectrum& spectrum, const UnitarySymmetry& sym, double beta);

/// prod over (omega, phase) of |1 - phase e^{-beta omega}|^{-2}, in log space.
double z_phased(std::span<const PhasedMode> modes, double beta);

/// prod over (omega, phase) of (1 - phase e^{-beta omega})^{-1}: the one-charge
/// trace, real exactly when the phases are closed under conjugation.
Complex z_one_charge(std::span<const PhasedMode> modes, double beta);

struct AntiunitaryPartition {
  double value = 1.0;          // sqrt(Tr(U_{S^2} e^{-2 beta H}))
  Complex one_charge{1.0, 0};  // prod over S^2 eigenvalues of (1 - lambda e^{-2 beta omega})^{-1}
  bool below_floor = false;    // value < 1e-300
};

/// Throws InternalConsistencyError when the one-charge product has a relative
/// imaginary part above 1e-10.
AntiunitaryPartition z_twisted_antiunitary(const ModeSpectrum& spectrum,
                                           const AntiunitarySymmetry& sym, double beta);

/// Real twisted partition function for either kind of symmetry.
double z_twisted(const ModeSpectrum& spectrum, const SymmetrySpec& sym, double beta);

/// e^{-2 sum_k log(1 + e^{-beta omega_k})}; a lower bound for every twisted Z.
double positivity_lower_bound(const ModeSpectrum& spectrum, double beta);

struct ModeFactor {
  std::string label;
  double factor = 1.0;
};

/// Per-mode factors of z_twisted. Unitary: |1 - rho_k x_k|^{-2}. Antiunitary:
/// |1 - lambda e^{-2 beta omega}|^{-1} per eigenvalue of S^2, labelled by the
/// first mode of its cycle with a "#j" suffix for the j-th root.
std::vector<ModeFactor> mode_factors(const ModeSpectrum& spectrum, const SymmetrySpec& sym,
                                     double beta);

/// Both sides of sum_k x_k/(1 - x_k) <= (1 - e^{-beta mu})^{-1} sum_k x_k.
struct TraceClassEstimate {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs * (1.0 + 1e-14); }
};

TraceClassEstimate trace_class_estimate(const ModeSpectrum& spectrum, double beta);

}  // namespace twistkit
