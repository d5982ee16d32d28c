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

#include "twistkit/correlation.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "twistkit/errors.hpp"

namespace twistkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << name << " must be positive and finite, got " << value;
    throw DomainError(msg.str());
  }
}

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Kernel twist angle for each mode of a unitary symmetry.
std::vector<double> kernel_angles(const ModeSpectrum& spectrum, const UnitarySymmetry& sym) {
  validate_symmetry(spectrum, sym);
  std::vector<double> out;
  out.reserve(sym.phases.size());
  for (Complex rho : sym.phases) out.push_back(kernel_twist_for_symmetry(rho).theta);
  return out;
}

void check_samples(const ModeSpectrum& spectrum, const Eigen::MatrixXcd& samples) {
  if (samples.cols() != static_cast<Eigen::Index>(spectrum.size())) {
    std::ostringstream msg;
    msg << "samples have " << samples.cols() << " columns for " << spectrum.size() << " modes";
    throw ConfigError(msg.str());
  }
  if (!is_power_of_two(samples.rows())) {
    std::ostringstream msg;
    msg << "grid size " << samples.rows() << " is not a power of two";
    throw ConfigError(msg.str());
  }
}

}  // namespace

std::vector<double> twisted_frequencies(double theta, double beta, IntRange window) {
  std::vector<double> out;
  for (int n = window.first; n <= window.last; ++n) out.push_back((theta + kTwoPi * n) / beta);
  return out;
}

BoundedValue kernel_fourier(double omega, double theta, double beta, double t, double s,
                            int n_cutoff) {
  if (n_cutoff < 1) throw ConfigError("Fourier cutoff must be at least 1");
  const double tau = t - s;
  // Pair n and -n so the partial sum is accumulated from small to large terms.
  Complex sum{};
  for (int n = n_cutoff; n >= 1; --n) {
    for (int m : {n, -n}) {
      const double nu = (theta + kTwoPi * m) / beta;
      sum += std::polar(1.0, nu * tau) / (nu * nu + omega * omega);
    }
  }
  const double nu0 = theta / beta;
  sum += std::polar(1.0, nu0 * tau) / (nu0 * nu0 + omega * omega);
  const double n = static_cast<double>(n_cutoff);
  return {sum / beta, beta / (4.0 * std::numbers::pi * std::numbers::pi) * (2.0 / n + 1.0 / (n * n))};
}

Complex kernel_closed_form(double omega, double theta, double beta, double t, double s) {
  const Complex sigma = std::polar(1.0, theta);
  double tau = t - s;
  // Reduce tau to [0, beta) using K(tau + beta) = sigma K(tau).
  const double shifts = std::floor(tau / beta);
  tau -= shifts * beta;
  if (tau >= beta) tau = 0.0;
  const Complex shift_phase = std::polar(1.0, theta * shifts);
  const double x = std::exp(-beta * omega);
  const Complex direct = std::exp(-omega * tau) / (Complex{1.0, 0.0} - std::conj(sigma) * x);
  const Complex wrapped =
      sigma * std::exp(-omega * (beta - tau)) / (Complex{1.0, 0.0} - sigma * x);
  return shift_phase * (direct + wrapped) / (2.0 * omega);
}

TwistAngle kernel_twist_for_symmetry(Complex rho) { return twist_angle(std::conj(rho)); }

bool kernel_ill_conditioned(double omega, double beta) {
  return std::abs(-std::expm1(-beta * omega)) < 1e-8;
}

double kernel_oracle_tail_bound(double omega, double beta, double t, double s, int cutoff,
                                double z_trunc_modulus) {
  const double x = std::exp(-beta * omega);
  const double one_minus_x = -std::expm1(-beta * omega);
  const double n = static_cast<double>(cutoff);
  const double abs_tau = std::abs(t - s);
  // The diagonal of the time-ordered product is c1 (n + 1) on one charge and
  // c2 n on the other; creation from occupation N gives zero.
  const double c1 = std::exp(-omega * abs_tau) / (2.0 * omega);
  const double c2 = std::exp(omega * abs_tau) / (2.0 * omega);

  const double s0 = 1.0 / one_minus_x;                                  // sum x^n
  const double s1 = s0 * s0;                                            // sum (n+1) x^n
  const double s1n = x * s0 * s0;                                       // sum n x^n
  const double xn = std::pow(x, n);
  const double t0 = xn * x * s0;                                        // sum_{n>N} x^n
  const double a1 = xn * ((n + 1.0) - n * x) * s0 * s0;                 // sum_{n>=N} (n+1) x^n
  const double b1 = xn * x * ((n + 1.0) - n * x) * s0 * s0;             // sum_{n>N} n x^n

  const double numerator_error = c1 * (a1 * s0 + s1 * t0) + c2 * (b1 * s0 + s1n * t0);
  const double numerator_bound = (c1 * s1 + c2 * s1n) * s0;
  const double z_error = s0 * s0 - (s0 - t0) * (s0 - t0);
  const double z_lower = z_trunc_modulus - z_error;
  if (!(z_lower > 0.0)) return std::numeric_limits<double>::infinity();
  return numerator_error / z_trunc_modulus + numerator_bound * z_error / (z_trunc_modulus * z_lower);
}

OracleValue kernel_oracle(const ModeSpectrum& spectrum, const UnitarySymmetry& sym, double beta,
                          double t, double s, std::optional<int> cutoff, Capacity capacity) {
  if (spectrum.size() != 1) throw ConfigError("the kernel oracle takes a single-mode spectrum");
  validate_symmetry(spectrum, sym);
  check_positive(beta, "beta");
  if (!(t >= 0.0 && t <= beta && s >= 0.0 && s <= beta)) {
    throw DomainError("oracle times must lie in [0, beta]");
  }
  const double omega = spectrum.omega(0);

  auto trace_of_twist = [&](int n) {
    return std::abs(symmetry_trace(build_space(spectrum, n, capacity), beta, sym));
  };

  int n = 0;
  if (cutoff) {
    n = *cutoff;
  } else {
    n = 8;
    while (kernel_oracle_tail_bound(omega, beta, t, s, n, trace_of_twist(n)) >= 1e-11) {
      const int next = n + n / 2 + 1;
      const auto dim = static_cast<std::uint64_t>(next + 1) * static_cast<std::uint64_t>(next + 1);
      if (dim > capacity.matrix_dimension) break;
      n = next;
    }
  }

  const auto space = build_space(spectrum, n, capacity);
  const std::array<Complex, 1> e{Complex{1.0, 0.0}};
  const Operator phi = imaginary_time_field(space, t, e, false);
  const Operator phibar = imaginary_time_field(space, s, e, true);
  const Operator twist = implement_symmetry(space, sym);
  const std::array<Operator, 2> factors =
      t >= s ? std::array<Operator, 2>{phibar, phi} : std::array<Operator, 2>{phi, phibar};
  const Complex numerator = twisted_trace(space, factors, beta, twist);
  const Complex z = twisted_trace(space, {}, beta, twist);
  return {numerator / z, kernel_oracle_tail_bound(omega, beta, t, s, n, std::abs(z)), n};
}

// ---------------------------------------------------------------------------

TwistedKernel::TwistedKernel(double omega, double theta, double beta)
    : omega_(omega), theta_(theta), beta_(beta) {
  check_positive(omega, "omega");
  check_positive(beta, "beta");
  if (!(theta >= 0.0 && theta < kTwoPi)) throw DomainError("theta must lie in [0, 2 pi)");
}

Complex TwistedKernel::operator()(double t, double s) const {
  return kernel_closed_form(omega_, theta_, beta_, t, s);
}

KernelGrid sample_kernel(const TwistedKernel& kernel, int grid_size) {
  if (grid_size < 1) throw ConfigError("grid size must be at least 1");
  KernelGrid grid;
  grid.beta = kernel.beta();
  grid.matrix.resize(grid_size, grid_size);
  for (Eigen::Index i = 0; i < grid_size; ++i) {
    for (Eigen::Index j = 0; j < grid_size; ++j) {
      grid.matrix(i, j) = kernel(grid.beta * i / grid_size, grid.beta * j / grid_size);
    }
  }
  return grid;
}

double min_eigenvalue(const Eigen::MatrixXcd& matrix) {
  const Eigen::MatrixXcd hermitian = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double discrete_operator_norm(const KernelGrid& grid) {
  const Eigen::MatrixXcd scaled = grid.spacing() * grid.matrix;
  const Eigen::MatrixXcd hermitian = 0.5 * (scaled + scaled.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd apply_inverse(const ModeSpectrum& spectrum, const UnitarySymmetry& sym,
                               double beta, const Eigen::MatrixXcd& samples) {
  check_positive(beta, "beta");
  const auto thetas = kernel_angles(spectrum, sym);
  check_samples(spectrum, samples);
  const Eigen::Index m = samples.rows();

  Eigen::FFT<double> fft;
  Eigen::MatrixXcd out(m, samples.cols());
  std::vector<Complex> buffer(static_cast<std::size_t>(m)), spectrum_buffer;
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    const double theta = thetas[static_cast<std::size_t>(k)];
    const double omega = spectrum.omega(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < m; ++j) {
      buffer[j] = samples(j, k) * std::polar(1.0, -theta * j / static_cast<double>(m));
    }
    fft.fwd(spectrum_buffer, buffer);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index n = i < m / 2 ? i : i - m;
      const double nu = (theta + kTwoPi * static_cast<double>(n)) / beta;
      spectrum_buffer[i] /= nu * nu + omega * omega;
    }
    fft.inv(buffer, spectrum_buffer);
    for (Eigen::Index j = 0; j < m; ++j) {
      out(j, k) = buffer[j] * std::polar(1.0, theta * j / static_cast<double>(m));
    }
  }
  return out;
}

Eigen::MatrixXcd apply_stencil(const ModeSpectrum& spectrum, const UnitarySymmetry& sym,
                               double beta, const Eigen::MatrixXcd& samples) {
  check_positive(beta, "beta");
  const auto thetas = kernel_angles(spectrum, sym);
  check_samples(spectrum, samples);
  const Eigen::Index m = samples.rows();
  const double h = beta / static_cast<double>(m);

  Eigen::MatrixXcd out(m, samples.cols());
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    const Complex sigma = std::polar(1.0, thetas[static_cast<std::size_t>(k)]);
    const double omega = spectrum.omega(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < m; ++j) {
      const Complex next = j + 1 < m ? samples(j + 1, k) : sigma * samples(0, k);
      const Complex prev = j > 0 ? samples(j - 1, k) : std::conj(sigma) * samples(m - 1, k);
      out(j, k) = -(next - 2.0 * samples(j, k) + prev) / (h * h) + omega * omega * samples(j, k);
    }
  }
  return out;
}

TestFunction twisted_mode(double theta, double beta, int n) {
  const double nu = (theta + kTwoPi * n) / beta;
  const Complex i{0.0, 1.0};
  return {[nu](double t) { return std::polar(1.0, nu * t); },
          [nu, i](double t) { return i * nu * std::polar(1.0, nu * t); },
          [nu](double t) { return -nu * nu * std::polar(1.0, nu * t); }};
}

TestFunction twisted_bump(double theta, double beta) {
  const double a = theta / beta;
  const double b = kTwoPi / beta;
  const Complex i{0.0, 1.0};
  // g = e^{i a t} e^{c(t)}, c = cos(b t); g' = (i a - b sin) g;
  // g'' = ((i a - b sin)^2 - b^2 cos) g.
  auto g = [a, b](double t) { return std::polar(std::exp(std::cos(b * t)), a * t); };
  return {g, [=](double t) { return (i * a - b * std::sin(b * t)) * g(t); },
          [=](double t) {
            const Complex l = i * a - b * std::sin(b * t);
            return (l * l - b * b * std::cos(b * t)) * g(t);
          }};
}

ResidualReport verify_resolvent(const TwistedKernel& kernel, const TestFunction& g, int grid_size,
                                double boundary_tolerance) {
  if (grid_size < 1) throw ConfigError("grid size must be at least 1");
  const double beta = kernel.beta();
  const Complex sigma = kernel.twist();
  const double scale = std::max({1.0, std::abs(g.value(0.0)), std::abs(g.first_derivative(0.0))});
  const double value_gap = std::abs(g.value(beta) - sigma * g.value(0.0));
  const double slope_gap = std::abs(g.first_derivative(beta) - sigma * g.first_derivative(0.0));
  if (value_gap > boundary_tolerance * scale || slope_gap > boundary_tolerance * scale) {
    std::ostringstream msg;
    msg << "test function violates the twisted boundary condition (value gap " << value_gap
        << ", derivative gap " << slope_gap << ")";
    throw PreconditionError(msg.str());
  }

  const double h = beta / grid_size;
  const double omega2 = kernel.omega() * kernel.omega();
  std::vector<Complex> source(static_cast<std::size_t>(grid_size));
  for (int j = 0; j < grid_size; ++j) {
    const double s = h * j;
    source[j] = -g.second_derivative(s) + omega2 * g.value(s);
  }
  ResidualReport report{grid_size, 0.0};
  for (int i = 0; i < grid_size; ++i) {
    const double t = h * i;
    Complex integral{};
    for (int j = 0; j < grid_size; ++j) integral += kernel(t, h * j) * source[j];
    report.max_residual = std::max(report.max_residual, std::abs(h * integral - g.value(t)));
  }
  return report;
}

}  // namespace twistkit
