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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "twistkit/errors.hpp"

namespace twistkit {

std::optional<std::size_t> ModeSpectrum::index_of(std::string_view label) const {
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (modes_[k].label == label) return k;
  }
  return std::nullopt;
}

ModeSpectrum validate_spectrum(std::vector<Mode> raw, std::optional<double> mu_hint) {
  std::set<std::string, std::less<>> seen;
  double min_omega = std::numeric_limits<double>::infinity();
  for (const auto& mode : raw) {
    if (!std::isfinite(mode.omega) || mode.omega <= 0.0) {
      std::ostringstream msg;
      msg << "mode '" << mode.label << "' has omega = " << mode.omega
          << "; frequencies must be bounded below by a positive constant";
      throw AdmissibilityError(msg.str());
    }
    if (!seen.insert(mode.label).second) {
      throw ConfigError("duplicate mode label '" + mode.label + "'");
    }
    min_omega = std::min(min_omega, mode.omega);
  }

  ModeSpectrum out;
  out.modes_ = std::move(raw);
  if (mu_hint) {
    const double mu = *mu_hint;
    if (!std::isfinite(mu) || mu <= 0.0) {
      throw AdmissibilityError("mu must be a positive finite number");
    }
    if (!out.modes_.empty() && mu > min_omega) {
      std::ostringstream msg;
      msg << "mu = " << mu << " exceeds the smallest frequency " << min_omega;
      throw AdmissibilityError(msg.str());
    }
    out.mu_ = mu;
  } else if (!out.modes_.empty()) {
    out.mu_ = min_omega;
  }
  return out;
}

ModeSpectrum validate_spectrum(const ModeSpectrum& spectrum) {
  return validate_spectrum(std::vector<Mode>(spectrum.modes().begin(), spectrum.modes().end()),
                           spectrum.mu());
}

ModeSpectrum twisted_circle_spectrum(double rho_twist, double mass, IntRange n_range) {
  if (!std::isfinite(rho_twist) || !std::isfinite(mass) || mass < 0.0) {
    throw AdmissibilityError("twisted circle needs finite rho and a nonnegative mass");
  }
  if (n_range.last < n_range.first) {
    throw ConfigError("empty mode range");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (mass == 0.0 && std::remainder(rho_twist, two_pi) == 0.0) {
    throw AdmissibilityError(
        "massless field on the untwisted circle has a zero mode (mu = 0)");
  }
  const double shift = rho_twist / two_pi;
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(n_range.last - n_range.first) + 1);
  for (int n = n_range.first; n <= n_range.last; ++n) {
    const double wave = static_cast<double>(n) + shift;
    modes.push_back({"n=" + std::to_string(n), std::hypot(wave, mass)});
  }
  return validate_spectrum(std::move(modes));
}

SymmetryKind kind_of(const SymmetrySpec& sym) {
  return std::holds_alternative<UnitarySymmetry>(sym) ? SymmetryKind::Unitary
                                                      : SymmetryKind::Antiunitary;
}

UnitarySymmetry identity_symmetry(std::size_t n) {
  return UnitarySymmetry{std::vector<Complex>(n, Complex{1.0, 0.0})};
}

namespace {

void check_phases(std::span<const Complex> phases, std::size_t expected) {
  if (phases.size() != expected) {
    std::ostringstream msg;
    msg << "symmetry has " << phases.size() << " phases for " << expected << " modes";
    throw ConfigError(msg.str());
  }
  for (std::size_t k = 0; k < phases.size(); ++k) {
    if (!(std::abs(std::abs(phases[k]) - 1.0) <= kUnitModulusTolerance)) {
      std::ostringstream msg;
      msg << "phase " << k << " has modulus " << std::abs(phases[k]) << ", expected 1";
      throw ConfigError(msg.str());
    }
  }
}

}  // namespace

void validate_symmetry(const ModeSpectrum& spectrum, const SymmetrySpec& sym) {
  const std::size_t n = spectrum.size();
  if (const auto* u = std::get_if<UnitarySymmetry>(&sym)) {
    check_phases(u->phases, n);
    return;
  }
  const auto& v = std::get<AntiunitarySymmetry>(sym);
  check_phases(v.phases, n);
  if (v.pairing.size() != n) {
    throw ConfigError("antiunitary pairing length does not match the number of modes");
  }
  std::vector<bool> hit(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t target = v.pairing[k];
    if (target >= n || hit[target]) {
      throw ConfigError("antiunitary pairing is not a permutation of the modes");
    }
    hit[target] = true;
    if (spectrum.omega(target) != spectrum.omega(k)) {
      throw ConfigError("antiunitary pairing maps '" + spectrum[k].label + "' to '" +
                        spectrum[target].label + "' with a different omega");
    }
  }
}

TwistAngle twist_angle(Complex rho) {
  double theta = std::arg(rho);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  // A tiny negative angle plus 2pi rounds to 2pi.
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return {theta};
}

std::vector<TwistAngle> symmetry_angles(const SymmetrySpec& sym) {
  const auto* u = std::get_if<UnitarySymmetry>(&sym);
  if (u == nullptr) {
    throw KindError("twist angles are defined for unitary symmetries only");
  }
  std::vector<TwistAngle> out;
  out.reserve(u->phases.size());
  for (const auto& rho : u->phases) out.push_back(twist_angle(rho));
  return out;
}

std::vector<PhasedMode> phased_modes(const ModeSpectrum& spectrum, const UnitarySymmetry& sym) {
  validate_symmetry(spectrum, sym);
  std::vector<PhasedMode> out;
  out.reserve(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    out.push_back({spectrum.omega(k), sym.phases[k]});
  }
  return out;
}

std::vector<PhasedMode> square_eigenvalues(const ModeSpectrum& spectrum,
                                           const AntiunitarySymmetry& sym) {
  validate_symmetry(spectrum, sym);
  const std::size_t n = spectrum.size();
  const auto& pi = sym.pairing;
  const auto& eta = sym.phases;

  std::vector<bool> visited(n, false);
  std::vector<PhasedMode> out;
  out.reserve(n);
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    std::size_t length = 0;
    Complex product{1.0, 0.0};
    for (std::size_t k = start; !visited[k]; k = pi[pi[k]]) {
      visited[k] = true;
      product *= std::conj(eta[k]) * eta[pi[k]];
      ++length;
    }
    const double omega = spectrum.omega(start);
    const double root_modulus = std::pow(std::abs(product), 1.0 / static_cast<double>(length));
    const double base_angle = std::arg(product) / static_cast<double>(length);
    for (std::size_t j = 0; j < length; ++j) {
      const double angle =
          base_angle + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(length);
      out.push_back({omega, std::polar(root_modulus, angle)});
    }
  }
  return out;
}

}  // namespace twistkit
