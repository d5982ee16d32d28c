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

#include "twistkit/partition.hpp"

#include <cmath>
#include <sstream>

#include "twistkit/errors.hpp"

namespace twistkit {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream msg;
    msg << "beta must be positive and finite, got " << beta;
    throw DomainError(msg.str());
  }
}

// log|1 - phase e^{-a}|^2 for a > 0, without cancellation near phase = 1:
// |1 - e^{i theta} x|^2 = (1 - x)^2 + 4 x sin^2(theta / 2).
double log_abs2_one_minus(Complex phase, double a) {
  const double x = std::exp(-a);
  const double one_minus_x = -std::expm1(-a);
  const double half_sin = std::sin(std::arg(phase) / 2.0);
  return std::log(one_minus_x * one_minus_x + 4.0 * x * half_sin * half_sin);
}

}  // namespace

double z_phased(std::span<const PhasedMode> modes, double beta) {
  check_beta(beta);
  double log_z = 0.0;
  for (const auto& m : modes) log_z -= log_abs2_one_minus(m.phase, beta * m.omega);
  return std::exp(log_z);
}

Complex z_one_charge(std::span<const PhasedMode> modes, double beta) {
  check_beta(beta);
  double log_modulus = 0.0;
  double angle = 0.0;
  for (const auto& m : modes) {
    log_modulus -= 0.5 * log_abs2_one_minus(m.phase, beta * m.omega);
    angle -= std::arg(Complex{1.0, 0.0} - m.phase * std::exp(-beta * m.omega));
  }
  return std::polar(std::exp(log_modulus), angle);
}

double z_untwisted(const ModeSpectrum& spectrum, double beta) {
  check_beta(beta);
  double log_z = 0.0;
  for (const auto& mode : spectrum.modes()) {
    log_z -= 2.0 * std::log(-std::expm1(-beta * mode.omega));
  }
  return std::exp(log_z);
}

Complex z_twisted_unitary(const ModeSpectrum& spectrum, const UnitarySymmetry& sym, double beta) {
  check_beta(beta);
  const auto modes = phased_modes(spectrum, sym);
  return {z_phased(modes, beta), 0.0};
}

AntiunitaryPartition z_twisted_antiunitary(const ModeSpectrum& spectrum,
                                           const AntiunitarySymmetry& sym, double beta) {
  check_beta(beta);
  const auto square = square_eigenvalues(spectrum, sym);
  AntiunitaryPartition out;
  out.one_charge = z_one_charge(square, 2.0 * beta);
  if (std::abs(out.one_charge.imag()) > 1e-10 * std::abs(out.one_charge)) {
    std::ostringstream msg;
    msg << "trace of U_{S^2} e^{-2 beta H} is not real: " << out.one_charge.real() << " + "
        << out.one_charge.imag() << "i";
    throw InternalConsistencyError(msg.str());
  }
  out.value = std::sqrt(z_phased(square, 2.0 * beta));
  out.below_floor = out.value < 1e-300;
  return out;
}

double z_twisted(const ModeSpectrum& spectrum, const SymmetrySpec& sym, double beta) {
  if (const auto* u = std::get_if<UnitarySymmetry>(&sym)) {
    return z_twisted_unitary(spectrum, *u, beta).real();
  }
  return z_twisted_antiunitary(spectrum, std::get<AntiunitarySymmetry>(sym), beta).value;
}

double positivity_lower_bound(const ModeSpectrum& spectrum, double beta) {
  check_beta(beta);
  double sum = 0.0;
  for (const auto& mode : spectrum.modes()) sum += std::log1p(std::exp(-beta * mode.omega));
  return std::exp(-2.0 * sum);
}

std::vector<ModeFactor> mode_factors(const ModeSpectrum& spectrum, const SymmetrySpec& sym,
                                     double beta) {
  check_beta(beta);
  std::vector<ModeFactor> out;
  if (const auto* u = std::get_if<UnitarySymmetry>(&sym)) {
    const auto modes = phased_modes(spectrum, *u);
    for (std::size_t k = 0; k < modes.size(); ++k) {
      out.push_back({spectrum[k].label,
                     std::exp(-log_abs2_one_minus(modes[k].phase, beta * modes[k].omega))});
    }
    return out;
  }
  const auto& v = std::get<AntiunitarySymmetry>(sym);
  const auto square = square_eigenvalues(spectrum, v);
  // square_eigenvalues walks the cycles of pi^2 from the smallest unvisited
  // mode; repeat the walk to recover the labels.
  std::vector<bool> visited(spectrum.size(), false);
  std::size_t next = 0;
  for (std::size_t start = 0; start < spectrum.size(); ++start) {
    if (visited[start]) continue;
    std::size_t length = 0;
    for (std::size_t k = start; !visited[k]; k = v.pairing[v.pairing[k]]) {
      visited[k] = true;
      ++length;
    }
    for (std::size_t j = 0; j < length; ++j, ++next) {
      const auto& m = square[next];
      out.push_back({spectrum[start].label + "#" + std::to_string(j),
                     std::exp(-0.5 * log_abs2_one_minus(m.phase, 2.0 * beta * m.omega))});
    }
  }
  return out;
}

TraceClassEstimate trace_class_estimate(const ModeSpectrum& spectrum, double beta) {
  check_beta(beta);
  TraceClassEstimate out;
  if (spectrum.empty()) return out;
  const double mu = *spectrum.mu();
  double sum_x = 0.0;
  for (const auto& mode : spectrum.modes()) {
    const double x = std::exp(-beta * mode.omega);
    out.lhs += x / -std::expm1(-beta * mode.omega);
    sum_x += x;
  }
  out.rhs = sum_x / -std::expm1(-beta * mu);
  return out;
}

}  // namespace twistkit
