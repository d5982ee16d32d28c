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

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "twistkit/fock.hpp"
#include "twistkit/spectrum.hpp"

namespace twistkit {

/// nu_n = (theta + 2 pi n) / beta for n in the window; e^{i nu_n beta} = e^{i theta}.
std::vector<double> twisted_frequencies(double theta, double beta, IntRange window);

/// A value together with a rigorous bound on its truncation error.
struct BoundedValue {
  Complex value;
  double tail_bound = 0.0;
};

/// (1/beta) sum_{|n| <= n_cutoff} e^{i nu_n (t - s)} / (nu_n^2 + omega^2).
///
/// The tail is bounded by (beta / 4 pi^2)(2/N + 1/N^2).
BoundedValue kernel_fourier(double omega, double theta, double beta, double t, double s,
                            int n_cutoff);

/// Green's function of -d^2/dt^2 + omega^2 on [0, beta) with g(beta) = e^{i theta} g(0):
///
///   K = (1/2 omega) sum_m e^{i m theta} e^{-omega |t - s - m beta|}
///
/// summed in closed form. Arguments outside [0, beta) follow the twisted continuation.
Complex kernel_closed_form(double omega, double theta, double beta, double t, double s);

/// Twist angle of the pair correlation for a symmetry with phase rho.
///
/// The correlation (1/Z) Tr((phi(t) phibar(s))_+ U_S e^{-beta H}) picks up
/// conj(rho) when t moves by beta, so the kernel twist is e^{i theta} = conj(rho).
TwistAngle kernel_twist_for_symmetry(Complex rho);

/// Kernel evaluated from the truncated Fock trace.
struct OracleValue {
  Complex value;
  double tail_bound = 0.0;
  int cutoff = 0;
};

/// (1/Z) Tr((phi(t, e bar) phibar(s, e))_+ U_S e^{-beta H}) for a single mode, with
/// phibar(s) phi(t) for t >= s and phi(t) phibar(s) for t < s.
///
/// Without an explicit cutoff the cutoff grows until the tail bound is below
/// 1e-11 or the matrix budget is reached. Throws ConfigError for more than one
/// mode, DomainError for t, s outside [0, beta], CapacityError on budget overrun.
OracleValue kernel_oracle(const ModeSpectrum& spectrum, const UnitarySymmetry& sym, double beta,
                          double t, double s, std::optional<int> cutoff = std::nullopt,
                          Capacity capacity = {});

/// Rigorous bound on |K_trunc - K| for the single-mode oracle at cutoff N.
double kernel_oracle_tail_bound(double omega, double beta, double t, double s, int cutoff,
                                double z_trunc_modulus);

/// True when |1 - e^{-beta omega}| < 1e-8, where the kernel loses precision for theta near 0.
bool kernel_ill_conditioned(double omega, double beta);

class TwistedKernel {
 public:
  /// Throws DomainError unless omega > 0, beta > 0 and theta in [0, 2 pi).
  TwistedKernel(double omega, double theta, double beta);

  double omega() const { return omega_; }
  double theta() const { return theta_; }
  double beta() const { return beta_; }
  Complex twist() const { return std::polar(1.0, theta_); }

  Complex operator()(double t, double s) const;

 private:
  double omega_, theta_, beta_;
};

/// Uniform grid t_i = i beta / M and the kernel matrix K(t_i, t_j).
struct KernelGrid {
  double beta = 1.0;
  Eigen::MatrixXcd matrix;

  Eigen::Index size() const { return matrix.rows(); }
  double spacing() const { return beta / static_cast<double>(size()); }
  double point(Eigen::Index i) const { return spacing() * static_cast<double>(i); }
};

/// Throws ConfigError unless M >= 1.
KernelGrid sample_kernel(const TwistedKernel& kernel, int grid_size);

/// Largest eigenvalue of (beta/M) K on the grid: the norm of the discrete C_beta.
double discrete_operator_norm(const KernelGrid& grid);

/// Smallest eigenvalue of the Hermitian part of a sampled kernel matrix.
double min_eigenvalue(const Eigen::MatrixXcd& matrix);

/// C_beta on the grid: column k of `samples` holds mode k at t_i = i beta / M.
///
/// Mode k is twisted by kernel_twist_for_symmetry(rho_k); its twisted Fourier
/// coefficients (frequencies n in [-M/2, M/2)) are divided by nu_n^2 + omega_k^2.
/// Throws ConfigError unless M is a power of two and the column count matches
/// the spectrum.
Eigen::MatrixXcd apply_inverse(const ModeSpectrum& spectrum, const UnitarySymmetry& sym,
                               double beta, const Eigen::MatrixXcd& samples);

/// Second-order finite-difference -D^2 + Omega^2 with the same twisted wrap.
Eigen::MatrixXcd apply_stencil(const ModeSpectrum& spectrum, const UnitarySymmetry& sym,
                               double beta, const Eigen::MatrixXcd& samples);

struct TestFunction {
  std::function<Complex(double)> value;
  std::function<Complex(double)> first_derivative;
  std::function<Complex(double)> second_derivative;
};

/// e^{i nu_n t}.
TestFunction twisted_mode(double theta, double beta, int n);

/// e^{i theta t / beta} exp(cos(2 pi t / beta)): smooth and twisted, not an eigenmode.
TestFunction twisted_bump(double theta, double beta);

struct ResidualReport {
  int grid_size = 0;
  double max_residual = 0.0;
};

/// max_i |(beta/M) sum_j K(t_i, s_j)(-g''(s_j) + omega^2 g(s_j)) - g(t_i)|.
///
/// Throws PreconditionError when g(beta) = e^{i theta} g(0) or the same for g'
/// fails by more than `boundary_tolerance` (relative to the size of g).
ResidualReport verify_resolvent(const TwistedKernel& kernel, const TestFunction& g, int grid_size,
                                double boundary_tolerance = 1e-9);

}  // namespace twistkit
