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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "twistkit/correlation.hpp"
#include "twistkit/errors.hpp"
#include "twistkit/fock.hpp"
#include "twistkit/partition.hpp"
#include "twistkit/realfield.hpp"
#include "twistkit/spectrum.hpp"

using namespace twistkit;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Complex unit(Rng& rng) { return std::polar(1.0, uniform(rng, 0.0, 2.0 * kPi)); }

ModeSpectrum random_spectrum(Rng& rng, std::size_t n, double lo = 0.5, double hi = 3.0) {
  std::vector<Mode> modes;
  for (std::size_t k = 0; k < n; ++k) modes.push_back({"k" + std::to_string(k), uniform(rng, lo, hi)});
  return validate_spectrum(std::move(modes));
}

UnitarySymmetry random_unitary(Rng& rng, std::size_t n) {
  UnitarySymmetry u;
  for (std::size_t k = 0; k < n; ++k) u.phases.push_back(unit(rng));
  return u;
}

// Two modes of equal frequency with an identity or swap pairing.
std::pair<ModeSpectrum, AntiunitarySymmetry> random_pairing(Rng& rng) {
  const double w = uniform(rng, 0.5, 3.0);
  auto spectrum = validate_spectrum(std::vector<Mode>{{"a", w}, {"b", w}});
  AntiunitarySymmetry v;
  v.pairing = std::bernoulli_distribution(0.5)(rng) ? std::vector<std::size_t>{1, 0}
                                                     : std::vector<std::size_t>{0, 1};
  v.phases = {unit(rng), unit(rng)};
  return {spectrum, v};
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, pattern, a, b);
  return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome product_formula() {
  Rng rng(101);
  const auto start = std::chrono::steady_clock::now();
  const double betas[] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t n = trial < 200 ? 1 : 2;
    auto spectrum = random_spectrum(rng, n);
    auto sym = random_unitary(rng, n);
    const double beta = betas[trial % 3];
    const int cutoff = cutoff_for_tail(spectrum, beta, 1e-10, Capacity{}.enumeration_dimension);
    const double tail = truncation_tail_bound(spectrum, beta, cutoff);
    const Complex closed = z_twisted_unitary(spectrum, sym, beta);
    const Complex oracle = symmetry_trace(build_space(spectrum, cutoff), beta, sym);
    const double rel = std::abs(closed - oracle) / std::abs(closed);
    worst = std::max(worst, rel);
    if (!(tail < 1e-10 && rel <= tail + 1e-10)) ++failures;
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 30.0,
          fmt("max rel err %.3e, %.1f s", worst, elapsed) + ", failures " + std::to_string(failures)};
}

Outcome twist_positivity() {
  Rng rng(102);
  int failures = 0;
  double worst_ratio = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 6)(rng));
    auto spectrum = random_spectrum(rng, n, 0.05, 5.0);
    auto sym = random_unitary(rng, n);
    const double beta = std::exp(uniform(rng, std::log(0.05), std::log(20.0)));
    const Complex z = z_twisted_unitary(spectrum, sym, beta);
    const double lower = positivity_lower_bound(spectrum, beta);
    worst_ratio = std::min(worst_ratio, z.real() / lower);
    if (!(z.real() > 0.0 && z.imag() == 0.0 && z.real() >= lower)) ++failures;
  }
  return {failures == 0, fmt("min Z / lower bound %.6f", worst_ratio) + ", failures " + std::to_string(failures)};
}

Outcome antiunitary_identity() {
  Rng rng(103);
  int failures = 0;
  double worst = 0.0;
  auto check = [&](const ModeSpectrum& spectrum, const AntiunitarySymmetry& v, double beta, double expected) {
    const int cutoff = cutoff_for_tail(spectrum, beta, 1e-10, Capacity{}.enumeration_dimension);
    const double tail = truncation_tail_bound(spectrum, beta, cutoff);
    const double formula = z_twisted_antiunitary(spectrum, v, beta).value;
    const Complex trace = symmetry_trace(build_space(spectrum, cutoff), beta, v);
    const double rel = std::abs(formula - trace) / formula;
    worst = std::max(worst, rel);
    if (rel > 1e-8 + tail) ++failures;
    if (expected > 0.0 && std::abs(formula / expected - 1.0) > 1e-12) ++failures;
  };
  const double ln2 = std::log(2.0);
  check(validate_spectrum(std::vector<Mode>{{"k0", 1.0}}), AntiunitarySymmetry{{0}, {Complex{1.0, 0.0}}}, ln2, 4.0 / 3.0);
  check(validate_spectrum(std::vector<Mode>{{"a", 1.0}, {"b", 1.0}}), AntiunitarySymmetry{{1, 0}, {1.0, 1.0}}, ln2, 16.0 / 9.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto [spectrum, v] = random_pairing(rng);
    check(spectrum, v, uniform(rng, 0.3, 3.0), 0.0);
  }
  return {failures == 0, fmt("max rel err %.3e", worst) + ", failures " + std::to_string(failures)};
}

Outcome kernel_agreement() {
  Rng rng(104);
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  double worst_oracle = 0.0, worst_fourier = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double omega = uniform(rng, 0.5, 3.0);
    const double theta = uniform(rng, 0.0, 2.0 * kPi);
    const double beta = uniform(rng, 0.5, 2.0);
    auto spectrum = validate_spectrum(std::vector<Mode>{{"k0", omega}});
    const UnitarySymmetry sym{{std::polar(1.0, -theta)}};
    const double twist = kernel_twist_for_symmetry(sym.phases[0]).theta;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const double t = beta * i / 8.0, s = beta * j / 8.0;
        const Complex closed = kernel_closed_form(omega, twist, beta, t, s);
        const auto oracle = kernel_oracle(spectrum, sym, beta, t, s);
        const auto fourier = kernel_fourier(omega, twist, beta, t, s, 2000);
        const double d_oracle = std::abs(closed - oracle.value);
        const double d_fourier = std::abs(closed - fourier.value);
        worst_oracle = std::max(worst_oracle, d_oracle);
        worst_fourier = std::max(worst_fourier, d_fourier / fourier.tail_bound);
        if (d_oracle > oracle.tail_bound + 1e-8 || d_fourier > fourier.tail_bound) ++failures;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 60.0,
          fmt("max |closed - oracle| %.3e, max fourier gap / tail %.3f", worst_oracle, worst_fourier) +
              fmt(", %.1f s", elapsed) + ", failures " + std::to_string(failures)};
}

Outcome resolvent_residual() {
  const double beta = 1.0, theta = 0.7;
  TwistedKernel kernel(1.0, theta, beta);
  bool pass = true;
  double worst_ratio = 0.0, worst_order = INFINITY;
  // Quadrature error at the kernel kink is about h^2 (nu^2 + omega^2) / 12, so the
  // 5 h^2 bound covers the low modes only.
  for (int n : {-1, 0, 1}) {
    auto g = twisted_mode(theta, beta, n);
    std::vector<double> residuals;
    for (int m : {64, 128, 256}) {
      const double r = verify_resolvent(kernel, g, m).max_residual;
      const double h = beta / m;
      worst_ratio = std::max(worst_ratio, r / (5.0 * h * h));
      if (r > 5.0 * h * h) pass = false;
      residuals.push_back(r);
    }
    for (std::size_t i = 1; i < residuals.size(); ++i) {
      const double order = std::log2(residuals[i - 1] / residuals[i]);
      worst_order = std::min(worst_order, order);
      if (order < 1.9) pass = false;
    }
  }
  return {pass, fmt("max residual / 5h^2 %.3f, min order %.3f", worst_ratio, worst_order)};
}

Operator diagonal_phase(const TruncatedFockSpace& space, double t) {
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  SparseMatrix m(dim, dim);
  m.reserve(Eigen::VectorXi::Constant(dim, 1));
  for (Eigen::Index i = 0; i < dim; ++i)
    m.insert(i, i) = std::polar(1.0, t * space.energy(space.record(static_cast<std::uint64_t>(i))));
  return Operator(std::move(m));
}

double restricted(const TruncatedFockSpace& space, const Operator& a, const Operator& b) {
  return max_deviation(restrict_sub_cutoff(space, a), restrict_sub_cutoff(space, b));
}

std::vector<Complex> random_vector(Rng& rng, std::size_t n) {
  std::vector<Complex> v;
  for (std::size_t k = 0; k < n; ++k) v.emplace_back(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  return v;
}

Outcome algebraic_suite() {
  Rng rng(106);
  double exact = 0.0, ccr = 0.0, dynamics = 0.0;
  for (std::size_t n : {1u, 2u}) {
    for (int cutoff : {2, 5, 10}) {
      auto spectrum = random_spectrum(rng, n);
      auto sym = random_unitary(rng, n);
      auto space = build_space(spectrum, cutoff);
      const auto dim = static_cast<Eigen::Index>(space.dimension());
      const auto id = Operator::identity(dim);
      const auto tc = tc_operator(space);
      const auto u = implement_symmetry(space, sym);
      const auto h = hamiltonian(space);
      exact = std::max(exact, max_deviation(tc * tc, id));
      exact = std::max(exact, max_deviation(u * tc, tc * u));
      exact = std::max(exact, max_deviation(u * h, h * u));

      auto f = random_vector(rng, n), g = random_vector(rng, n);
      Complex fg{0.0, 0.0}, gf{0.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) {
        fg += std::conj(f[k]) * g[k];
        gf += std::conj(g[k]) * f[k];
      }
      ccr = std::max(ccr, restricted(space,
                                     commutator(annihilation_functional(space, Charge::Plus, f),
                                                creation_functional(space, Charge::Plus, g)),
                                     gf * id));
      ccr = std::max(ccr, restricted(space,
                                     commutator(annihilation_functional(space, Charge::Minus, f),
                                                creation_functional(space, Charge::Minus, g)),
                                     fg * id));

      const double t = uniform(rng, -2.0, 2.0);
      const auto forward = diagonal_phase(space, t), backward = diagonal_phase(space, -t);
      std::vector<Complex> plus(n), minus(n);
      for (std::size_t k = 0; k < n; ++k) {
        plus[k] = std::polar(1.0, -t * spectrum.omega(k)) * f[k];
        minus[k] = std::polar(1.0, t * spectrum.omega(k)) * f[k];
      }
      dynamics = std::max(dynamics, restricted(space, forward * creation_functional(space, Charge::Plus, f) * backward,
                                               creation_functional(space, Charge::Plus, plus)));
      dynamics = std::max(dynamics, restricted(space, forward * creation_functional(space, Charge::Minus, f) * backward,
                                               creation_functional(space, Charge::Minus, minus)));
    }
  }
  return {exact == 0.0 && ccr < 1e-12 && dynamics < 1e-10,
          fmt("exact relations %.1e, ccr %.3e", exact, ccr) + fmt(", dynamics %.3e", dynamics)};
}

Outcome real_field_consistency() {
  Rng rng(107);
  int failures = 0;
  double worst_z = 0.0, worst_block = 0.0, min_eig = INFINITY;
  for (int trial = 0; trial < 50; ++trial) {
    auto [spectrum, v] = random_pairing(rng);
    const double beta = uniform(rng, 0.3, 3.0);
    const double rel = std::abs(z_real_field(extend(spectrum, v), beta) / z_twisted_antiunitary(spectrum, v, beta).value - 1.0);
    worst_z = std::max(worst_z, rel);
    if (rel > 1e-10) ++failures;
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto spectrum = random_spectrum(rng, 2);
    auto ext = extend(spectrum, random_unitary(rng, 2));
    const double beta = uniform(rng, 0.3, 3.0);
    for (int i = 0; i < 4; ++i) {
      const double block = off_diagonal_size(ext, extended_kernel(ext, beta, uniform(rng, 0.0, beta), uniform(rng, 0.0, beta)).blocks);
      worst_block = std::max(worst_block, block);
      if (block >= 1e-12) ++failures;
    }
  }
  for (int trial = 0; trial < 10; ++trial) {
    const double beta = uniform(rng, 0.5, 2.0);
    std::vector<ExtendedSpectrum> cases;
    cases.push_back(extend(random_spectrum(rng, 2), random_unitary(rng, 2)));
    auto [spectrum, v] = random_pairing(rng);
    cases.push_back(extend(spectrum, v));
    for (const auto& ext : cases) {
      const double eig = min_eigenvalue(sample_extended_kernel(ext, beta, 16));
      min_eig = std::min(min_eig, eig);
      if (!(eig > 0.0)) ++failures;
    }
  }
  return {failures == 0, fmt("max Z rel err %.3e, max off-diagonal %.3e", worst_z, worst_block) +
                             fmt(", min eigenvalue %.3e", min_eig) + ", failures " + std::to_string(failures)};
}

Outcome trace_bound() {
  Rng rng(108);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 50)(rng));
    auto spectrum = random_spectrum(rng, n, 0.01, 10.0);
    const double beta = std::exp(uniform(rng, std::log(0.01), std::log(50.0)));
    const auto est = trace_class_estimate(spectrum, beta);
    if (est.rhs > 0.0) worst = std::max(worst, est.lhs / est.rhs);
    if (!est.holds()) ++failures;
  }
  return {failures == 0, fmt("max lhs / rhs %.6f", worst) + ", failures " + std::to_string(failures)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"product_formula_matches_fock_trace", product_formula},
      {"unitary_twist_positivity", twist_positivity},
      {"antiunitary_square_root_identity", antiunitary_identity},
      {"kernel_three_way_agreement", kernel_agreement},
      {"resolvent_residual_second_order", resolvent_residual},
      {"fock_algebraic_relations", algebraic_suite},
      {"real_field_consistency", real_field_consistency},
      {"trace_class_estimate", trace_bound},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
