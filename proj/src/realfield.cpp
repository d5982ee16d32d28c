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

#include "twistkit/realfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "twistkit/errors.hpp"
#include "twistkit/partition.hpp"

namespace twistkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double positive_angle(Complex z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

double max_entry(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// J M J as a matrix: (J M J) q = P conj(M) P q with P the sector swap.
Eigen::MatrixXcd conjugate_by_j(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows() / 2;
  Eigen::MatrixXcd out(m.rows(), m.cols());
  out.topLeftCorner(n, n) = m.bottomRightCorner(n, n).conjugate();
  out.topRightCorner(n, n) = m.bottomLeftCorner(n, n).conjugate();
  out.bottomLeftCorner(n, n) = m.topRightCorner(n, n).conjugate();
  out.bottomRightCorner(n, n) = m.topLeftCorner(n, n).conjugate();
  return out;
}

// Bilinear form <J q, r> = sum_k (a_k d_k + b_k c_k).
Complex pairing(const Eigen::VectorXcd& q, const Eigen::VectorXcd& r) {
  return natural_conjugation(q).dot(r);
}

std::vector<Complex> to_vector(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

// Sector halves of q = (a; b): f = conj(a) feeds phi(t, f bar), g = b feeds phibar(t, g).
std::pair<std::vector<Complex>, std::vector<Complex>> split(const TruncatedFockSpace& space,
                                                             const Eigen::VectorXcd& q) {
  const auto m = static_cast<Eigen::Index>(space.spectrum().size());
  if (q.size() != 2 * m) throw ConfigError("extended coefficient vector has the wrong length");
  return {to_vector(q.head(m).conjugate()), to_vector(q.tail(m))};
}

Eigen::VectorXcd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = {normal(rng), normal(rng)};
  return v;
}

double restricted_deviation(const TruncatedFockSpace& space, const Operator& a, const Operator& b) {
  return max_deviation(restrict_sub_cutoff(space, a), restrict_sub_cutoff(space, b));
}

}  // namespace

std::string ExtendedSpectrum::sector_label(std::size_t i) const {
  const std::size_t m = base.size();
  return (i < m ? "dual." : "field.") + base[i % m].label;
}

ExtendedSpectrum extend(const ModeSpectrum& spectrum, const SymmetrySpec& sym) {
  validate_symmetry(spectrum, sym);
  const auto m = static_cast<Eigen::Index>(spectrum.size());
  ExtendedSpectrum ext{spectrum, sym, Eigen::MatrixXcd::Zero(2 * m, 2 * m)};
  if (const auto* u = std::get_if<UnitarySymmetry>(&sym)) {
    for (Eigen::Index k = 0; k < m; ++k) {
      ext.symmetry(k, k) = std::conj(u->phases[k]);
      ext.symmetry(m + k, m + k) = u->phases[k];
    }
    return ext;
  }
  const auto& v = std::get<AntiunitarySymmetry>(sym);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto target = static_cast<Eigen::Index>(v.pairing[k]);
    ext.symmetry(target, m + k) = std::conj(v.phases[k]);
    ext.symmetry(m + target, k) = v.phases[k];
  }
  return ext;
}

Eigen::VectorXcd natural_conjugation(const Eigen::VectorXcd& q) {
  const Eigen::Index m = q.size() / 2;
  Eigen::VectorXcd out(q.size());
  out.head(m) = q.tail(m).conjugate();
  out.tail(m) = q.head(m).conjugate();
  return out;
}

double reality_defect(const Eigen::MatrixXcd& m) { return max_entry(conjugate_by_j(m) - m); }

double unitarity_defect(const Eigen::MatrixXcd& m) {
  return max_entry(m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols()));
}

std::vector<InducedEigen> diagonalize_induced(const ExtendedSpectrum& ext) {
  const std::size_t n = ext.size();
  std::vector<bool> assigned(n, false);
  std::vector<InducedEigen> out;
  out.reserve(n);
  for (std::size_t first = 0; first < n; ++first) {
    if (assigned[first]) continue;
    std::vector<Eigen::Index> block;
    for (std::size_t i = first; i < n; ++i) {
      if (!assigned[i] && ext.omega(i) == ext.omega(first)) {
        block.push_back(static_cast<Eigen::Index>(i));
        assigned[i] = true;
      }
    }
    const auto size = static_cast<Eigen::Index>(block.size());
    Eigen::MatrixXcd sub(size, size);
    for (Eigen::Index r = 0; r < size; ++r) {
      for (Eigen::Index c = 0; c < size; ++c) sub(r, c) = ext.symmetry(block[r], block[c]);
    }
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(sub);
    const Eigen::MatrixXcd& tri = schur.matrixT();
    const Eigen::MatrixXcd& vecs = schur.matrixU();
    const double strict_upper = max_entry(tri.triangularView<Eigen::StrictlyUpper>().toDenseMatrix());
    if (strict_upper > 1e-10) {
      throw InternalConsistencyError("induced symmetry is not normal on an equal-omega block");
    }

    struct Entry {
      double angle;
      Eigen::Index lead;
      InducedEigen eigen;
    };
    std::vector<Entry> entries;
    for (Eigen::Index j = 0; j < size; ++j) {
      const Complex lambda = tri(j, j);
      if (std::abs(std::abs(lambda) - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << "induced symmetry eigenvalue " << lambda << " is off the unit circle";
        throw InternalConsistencyError(msg.str());
      }
      InducedEigen e{ext.omega(first), lambda / std::abs(lambda), Eigen::VectorXcd::Zero(2 * ext.base.size())};
      for (Eigen::Index r = 0; r < size; ++r) e.vector[block[r]] = vecs(r, j);
      Eigen::Index lead = 0;
      e.vector.cwiseAbs().maxCoeff(&lead);
      entries.push_back({positive_angle(e.phase), lead, std::move(e)});
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      if (std::abs(x.angle - y.angle) > 1e-12) return x.angle < y.angle;
      return x.lead < y.lead;
    });
    for (auto& entry : entries) out.push_back(std::move(entry.eigen));
  }
  return out;
}

bool conjugation_closed(const std::vector<InducedEigen>& eigen, double tolerance) {
  std::vector<bool> used(eigen.size(), false);
  for (std::size_t i = 0; i < eigen.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < eigen.size() && !found; ++j) {
      if (used[j] || std::abs(eigen[j].omega - eigen[i].omega) > tolerance) continue;
      if (std::abs(eigen[j].phase - std::conj(eigen[i].phase)) <= tolerance) {
        used[j] = true;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

double z_real_field(const ExtendedSpectrum& ext, double beta) {
  std::vector<PhasedMode> modes;
  for (const auto& e : diagonalize_induced(ext)) modes.push_back({e.omega, e.phase});
  const Complex z = z_one_charge(modes, beta);
  if (std::abs(z.imag()) > 1e-10 * std::abs(z)) {
    throw InternalConsistencyError("real-field partition product is not real");
  }
  return z.real();
}

ExtendedKernel extended_kernel(const ExtendedSpectrum& ext, const std::vector<InducedEigen>& eigen,
                               double beta, double t, double s) {
  const auto n = static_cast<Eigen::Index>(ext.size());
  ExtendedKernel out{Eigen::VectorXcd(n), Eigen::MatrixXcd(n, n)};
  Eigen::MatrixXcd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = eigen[static_cast<std::size_t>(i)];
    out.diagonal[i] =
        kernel_closed_form(e.omega, kernel_twist_for_symmetry(e.phase).theta, beta, t, s);
    q.col(i) = e.vector;
  }
  out.blocks = q * out.diagonal.asDiagonal() * q.adjoint();
  return out;
}

ExtendedKernel extended_kernel(const ExtendedSpectrum& ext, double beta, double t, double s) {
  return extended_kernel(ext, diagonalize_induced(ext), beta, t, s);
}

double off_diagonal_size(const ExtendedSpectrum& ext, const Eigen::MatrixXcd& blocks) {
  const auto m = static_cast<Eigen::Index>(ext.base.size());
  if (m == 0) return 0.0;
  return std::max(max_entry(blocks.topRightCorner(m, m)), max_entry(blocks.bottomLeftCorner(m, m)));
}

Eigen::MatrixXcd sample_extended_kernel(const ExtendedSpectrum& ext, double beta, int grid_size) {
  if (grid_size < 1) throw ConfigError("grid size must be at least 1");
  const auto eigen = diagonalize_induced(ext);
  const auto n = static_cast<Eigen::Index>(ext.size());
  Eigen::MatrixXcd out(grid_size * n, grid_size * n);
  for (int i = 0; i < grid_size; ++i) {
    for (int j = 0; j < grid_size; ++j) {
      const auto k = extended_kernel(ext, eigen, beta, beta * i / grid_size, beta * j / grid_size);
      out.block(i * n, j * n, n, n) = k.blocks;
    }
  }
  return out;
}

Operator real_field(const TruncatedFockSpace& space, double t, const Eigen::VectorXcd& q) {
  const auto [f, g] = split(space, q);
  return imaginary_time_field(space, t, f, false) + imaginary_time_field(space, t, g, true);
}

Operator real_field_rt(const TruncatedFockSpace& space, double t, const Eigen::VectorXcd& q) {
  const auto [f, g] = split(space, q);
  return real_time_field(space, t, f, false) + real_time_field(space, t, g, true);
}

Eigen::MatrixXcd extended_kernel_oracle(const ExtendedSpectrum& ext, double beta, double t,
                                        double s, int cutoff, Capacity capacity) {
  const auto space = build_space(ext.base, cutoff, capacity);
  const Operator twist = implement_symmetry(space, ext.source);
  const Complex z = twisted_trace(space, {}, beta, twist);
  const auto n = static_cast<Eigen::Index>(ext.size());
  std::vector<Operator> left, right;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXcd unit = Eigen::VectorXcd::Unit(n, i);
    left.push_back(real_field(space, t, natural_conjugation(unit)));
    right.push_back(real_field(space, s, unit));
  }
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::array<Operator, 2> factors = t < s ? std::array<Operator, 2>{left[i], right[j]}
                                                    : std::array<Operator, 2>{right[j], left[i]};
      out(i, j) = twisted_trace(space, factors, beta, twist) / z;
    }
  }
  return out;
}

double RealFieldReport::max() const {
  return std::max({omega_reality, symmetry_reality, adjoint, canonical, equal_time, ladder,
                   implementation});
}

RealFieldReport real_field_checks(const ExtendedSpectrum& ext, int cutoff, std::uint64_t seed,
                                  Capacity capacity) {
  const auto space = build_space(ext.base, cutoff, capacity);
  space.require_materializable();
  const auto m = static_cast<Eigen::Index>(ext.base.size());
  const Eigen::Index n = 2 * m;
  std::mt19937_64 rng(seed);
  const Eigen::VectorXcd q = random_vector(rng, n);
  const Eigen::VectorXcd r = random_vector(rng, n);
  const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  const Operator identity = Operator::identity(dim);

  RealFieldReport report;

  Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) omega(i, i) = ext.omega(static_cast<std::size_t>(i));
  report.omega_reality = reality_defect(omega);
  report.symmetry_reality = reality_defect(ext.symmetry);

  const Operator psi_q = real_field_rt(space, t, q);
  report.adjoint = restricted_deviation(space, psi_q.adjoint(),
                                        real_field_rt(space, t, natural_conjugation(q)));

  // Richardson-extrapolated central difference for d/dt psi(t, r).
  auto central = [&](double h) {
    return (1.0 / (2.0 * h)) * (real_field_rt(space, t + h, r) - real_field_rt(space, t - h, r));
  };
  const double h = 1e-3;
  const Operator derivative = (4.0 / 3.0) * central(h / 2.0) - (1.0 / 3.0) * central(h);
  const Complex bilinear = pairing(q, r);
  report.canonical = restricted_deviation(space, commutator(psi_q, derivative),
                                          (Complex{0.0, 1.0} * bilinear) * identity);

  report.equal_time = restricted_deviation(space, commutator(psi_q, real_field_rt(space, t, r)),
                                           Operator::zero(dim));

  const auto [qa, qb] = std::pair{q.head(m), q.tail(m)};
  const auto [rc, rd] = std::pair{r.head(m), r.tail(m)};
  const Operator lowered = annihilation_functional(space, Charge::Minus, to_vector(qa.conjugate())) +
                           annihilation_functional(space, Charge::Plus, to_vector(qb));
  const Operator raised = creation_functional(space, Charge::Plus, to_vector(rc.conjugate())) +
                          creation_functional(space, Charge::Minus, to_vector(rd));
  report.ladder = restricted_deviation(space, commutator(lowered, raised), bilinear * identity);

  const Operator u = implement_symmetry(space, ext.source);
  const Eigen::VectorXcd pulled = ext.symmetry.adjoint() * q;
  report.implementation =
      restricted_deviation(space, u * psi_q * u.adjoint(), real_field_rt(space, t, pulled));
  return report;
}

}  // namespace twistkit
