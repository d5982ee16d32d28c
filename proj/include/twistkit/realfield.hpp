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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twistkit/correlation.hpp"
#include "twistkit/fock.hpp"
#include "twistkit/spectrum.hpp"

namespace twistkit {

/// The doubled coefficient space E = E* (+) E.
///
/// Coordinates are q = (a; b) with a_k = conj(<e_k, f>) for f bar in E* and
/// b_k = <e_k, g> for g in E. The natural conjugation is J(a; b) = (conj b; conj a).
struct ExtendedSpectrum {
  ModeSpectrum base;
  SymmetrySpec source;
  /// S bar (+) S for unitary input; (a; b) -> (conj(V) b; V a) in coordinates
  /// for antiunitary input, i.e. V(f bar (+) g) = conj(V g) (+) V f.
  Eigen::MatrixXcd symmetry;

  std::size_t size() const { return 2 * base.size(); }
  double omega(std::size_t i) const { return base.omega(i % base.size()); }
  /// "dual.<label>" for the E* sector, "field.<label>" for E.
  std::string sector_label(std::size_t i) const;
};

/// Throws ConfigError when `sym` does not match the spectrum.
ExtendedSpectrum extend(const ModeSpectrum& spectrum, const SymmetrySpec& sym);

Eigen::VectorXcd natural_conjugation(const Eigen::VectorXcd& q);

/// max |J M J - M| entry: zero when M is real.
double reality_defect(const Eigen::MatrixXcd& m);

/// max |M* M - 1| entry.
double unitarity_defect(const Eigen::MatrixXcd& m);

struct InducedEigen {
  double omega = 0.0;
  Complex phase{1.0, 0.0};
  Eigen::VectorXcd vector;  // unit eigenvector in (a; b) coordinates
};

/// Eigen-decomposition of the induced symmetry within each equal-omega block.
///
/// Blocks are listed by first index; inside a block eigenvalues are ordered by
/// angle in [0, 2 pi), then by the index of the largest eigenvector entry.
/// Throws InternalConsistencyError when an eigenvalue is off the unit circle
/// by more than 1e-10 or the Schur form is not diagonal to that accuracy.
std::vector<InducedEigen> diagonalize_induced(const ExtendedSpectrum& ext);

/// True when the eigenvalue multiset is closed under conjugation (to `tolerance`).
bool conjugation_closed(const std::vector<InducedEigen>& eigen, double tolerance = 1e-10);

/// Tr(U e^{-beta H}) through the doubled theory: prod_i (1 - lambda_i e^{-beta omega_i})^{-1}
/// over the 2m eigenvalues. Throws InternalConsistencyError if the product is not real.
double z_real_field(const ExtendedSpectrum& ext, double beta);

struct ExtendedKernel {
  /// K_{theta_i}(t, s) in eigenvector order, theta_i the kernel twist of lambda_i.
  Eigen::VectorXcd diagonal;
  /// Q diag(...) Q* in (a; b) coordinates; blocks are dual/dual, dual/field, ...
  Eigen::MatrixXcd blocks;
};

ExtendedKernel extended_kernel(const ExtendedSpectrum& ext, const std::vector<InducedEigen>& eigen,
                               double beta, double t, double s);
ExtendedKernel extended_kernel(const ExtendedSpectrum& ext, double beta, double t, double s);

/// Largest entry of the dual/field and field/dual blocks.
double off_diagonal_size(const ExtendedSpectrum& ext, const Eigen::MatrixXcd& blocks);

/// The sampled block kernel on the grid t_i = i beta / M, indexed by
/// (time index) * 2m + coordinate.
Eigen::MatrixXcd sample_extended_kernel(const ExtendedSpectrum& ext, double beta, int grid_size);

/// psi(t, q) = phi(t, f bar) + phibar(t, g) on the truncated Fock space.
Operator real_field(const TruncatedFockSpace& space, double t, const Eigen::VectorXcd& q);
Operator real_field_rt(const TruncatedFockSpace& space, double t, const Eigen::VectorXcd& q);

/// (1/Z) Tr((psi(t, J eps_i) psi(s, eps_j))_+ U e^{-beta H}), the ordering being
/// psi(t) psi(s) for t < s and psi(s) psi(t) otherwise.
Eigen::MatrixXcd extended_kernel_oracle(const ExtendedSpectrum& ext, double beta, double t,
                                        double s, int cutoff, Capacity capacity = {});

/// Maximum deviations of the real-field identities on the sub-cutoff block.
struct RealFieldReport {
  double omega_reality = 0.0;    // J Omega J - Omega
  double symmetry_reality = 0.0; // J U J - U for the induced symmetry
  double adjoint = 0.0;          // psi(t, q)* - psi(t, J q)
  double canonical = 0.0;        // [psi(t, q), d/dt psi(t, r)] - i <J q, r>
  double equal_time = 0.0;       // [psi(t, q), psi(t, r)]
  double ladder = 0.0;           // [A(q), A*(r)] - <J q, r>
  double implementation = 0.0;   // U psi(t, q) U* - psi(t, V* q)

  double max() const;
};

/// Random q, r drawn from a seeded generator; t in [0, 1]. Throws CapacityError
/// when the space exceeds the matrix budget.
RealFieldReport real_field_checks(const ExtendedSpectrum& ext, int cutoff, std::uint64_t seed = 0,
                                  Capacity capacity = {});

}  // namespace twistkit
