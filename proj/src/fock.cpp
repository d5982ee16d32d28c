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

#include "twistkit/fock.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twistkit/errors.hpp"

namespace twistkit {

namespace {

using Triplet = Eigen::Triplet<Complex>;

// Neumaier compensated sum of complex terms.
class CompensatedSum {
 public:
  void add(Complex term) {
    add_part(re_, re_c_, term.real());
    add_part(im_, im_c_, term.imag());
  }
  Complex value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double& sum, double& comp, double term) {
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

// Advances `digits` as an odometer with the last digit fastest; returns the
// position of the most significant digit that changed, or -1 on wrap-around.
int advance(OccupationRecord& digits, int cutoff) {
  for (int pos = static_cast<int>(digits.size()) - 1; pos >= 0; --pos) {
    if (digits[pos] < cutoff) {
      ++digits[pos];
      return pos;
    }
    digits[pos] = 0;
  }
  return -1;
}

void check_dimension(const TruncatedFockSpace& space, const Operator& op) {
  if (op.dimension() != static_cast<Eigen::Index>(space.dimension())) {
    std::ostringstream msg;
    msg << "operator dimension " << op.dimension() << " does not match the space dimension "
        << space.dimension();
    throw ConfigError(msg.str());
  }
}

void check_coefficients(const TruncatedFockSpace& space, std::span<const Complex> f) {
  if (f.size() != space.spectrum().size()) {
    std::ostringstream msg;
    msg << "coefficient vector has length " << f.size() << " for "
        << space.spectrum().size() << " modes";
    throw ConfigError(msg.str());
  }
}

SparseMatrix diagonal_matrix(const Eigen::VectorXcd& diag) {
  SparseMatrix m(diag.size(), diag.size());
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(diag.size()));
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag[i] != Complex{}) triplets.emplace_back(i, i, diag[i]);
  }
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

// Ladder operator on one oscillator, scaled by `scale`.
SparseMatrix ladder(const TruncatedFockSpace& space, std::size_t osc, bool raise, Complex scale) {
  space.require_materializable();
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  const auto stride = space.stride(osc);
  const int cutoff = space.cutoff();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dim));
  for (std::uint64_t i = 0; i < space.dimension(); ++i) {
    const int n = static_cast<int>((i / stride) % static_cast<std::uint64_t>(cutoff + 1));
    if (raise && n < cutoff) {
      triplets.emplace_back(static_cast<Eigen::Index>(i + stride), static_cast<Eigen::Index>(i),
                            scale * std::sqrt(static_cast<double>(n + 1)));
    } else if (!raise && n > 0) {
      triplets.emplace_back(static_cast<Eigen::Index>(i - stride), static_cast<Eigen::Index>(i),
                            scale * std::sqrt(static_cast<double>(n)));
    }
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

// sum_k c_k * ladder(osc(k, charge), raise).
Operator ladder_sum(const TruncatedFockSpace& space, Charge charge, bool raise,
                    std::span<const Complex> coefficients) {
  space.require_materializable();
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  SparseMatrix total(dim, dim);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (coefficients[k] == Complex{}) continue;
    total += ladder(space, TruncatedFockSpace::oscillator(k, charge), raise, coefficients[k]);
  }
  return Operator(std::move(total));
}

Complex ipow(Complex z, int n) {
  Complex out{1.0, 0.0};
  for (; n > 0; n >>= 1, z *= z) {
    if (n & 1) out *= z;
  }
  return out;
}

std::size_t checked_mode(const TruncatedFockSpace& space, std::size_t mode) {
  if (mode >= space.spectrum().size()) {
    throw ConfigError("mode index " + std::to_string(mode) + " is out of range");
  }
  return mode;
}

}  // namespace

OccupationRecord TruncatedFockSpace::record(std::uint64_t index) const {
  OccupationRecord out(num_oscillators());
  const auto base = static_cast<std::uint64_t>(cutoff_ + 1);
  for (std::size_t o = out.size(); o-- > 0;) {
    out[o] = static_cast<int>(index % base);
    index /= base;
  }
  return out;
}

std::uint64_t TruncatedFockSpace::index(std::span<const int> record) const {
  std::uint64_t out = 0;
  for (std::size_t o = 0; o < record.size(); ++o) {
    out += static_cast<std::uint64_t>(record[o]) * strides_[o];
  }
  return out;
}

double TruncatedFockSpace::energy(std::span<const int> record) const {
  double e = 0.0;
  for (std::size_t k = 0; k < spectrum_.size(); ++k) {
    e += spectrum_.omega(k) * static_cast<double>(record[2 * k] + record[2 * k + 1]);
  }
  return e;
}

void TruncatedFockSpace::require_materializable() const {
  if (dimension_ > capacity_.matrix_dimension) {
    std::ostringstream msg;
    msg << "Fock space of dimension " << dimension_ << " exceeds the matrix budget of "
        << capacity_.matrix_dimension << " (set TWISTKIT_CAPACITY to raise it)";
    throw CapacityError(msg.str());
  }
}

TruncatedFockSpace build_space(const ModeSpectrum& spectrum, int cutoff, Capacity capacity) {
  if (cutoff < 1) throw ConfigError("occupation cutoff must be at least 1");
  TruncatedFockSpace space;
  space.spectrum_ = spectrum;
  space.cutoff_ = cutoff;
  space.capacity_ = capacity;
  const std::size_t oscillators = 2 * spectrum.size();
  const auto base = static_cast<std::uint64_t>(cutoff) + 1;
  space.strides_.assign(oscillators, 1);
  std::uint64_t dim = 1;
  for (std::size_t o = oscillators; o-- > 0;) {
    space.strides_[o] = dim;
    if (dim > capacity.enumeration_dimension / base) {
      std::ostringstream msg;
      msg << "Fock space with " << spectrum.size() << " modes and cutoff " << cutoff
          << " exceeds the enumeration budget of " << capacity.enumeration_dimension << " states";
      throw CapacityError(msg.str());
    }
    dim *= base;
  }
  space.dimension_ = dim;
  return space;
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(SparseMatrix matrix, bool antilinear)
    : matrix_(std::move(matrix)), antilinear_(antilinear) {
  if (matrix_.rows() != matrix_.cols()) throw ConfigError("operator matrix must be square");
  matrix_.makeCompressed();
}

Operator Operator::identity(Eigen::Index dimension) {
  SparseMatrix m(dimension, dimension);
  m.setIdentity();
  return Operator(std::move(m));
}

Operator Operator::zero(Eigen::Index dimension) { return Operator(SparseMatrix(dimension, dimension)); }

Eigen::VectorXcd Operator::apply(const Eigen::VectorXcd& x) const {
  if (antilinear_) return matrix_ * x.conjugate();
  return matrix_ * x;
}

Operator Operator::adjoint() const {
  if (antilinear_) return Operator(SparseMatrix(matrix_.transpose()), true);
  return Operator(SparseMatrix(matrix_.adjoint()), false);
}

Operator& Operator::operator+=(const Operator& other) {
  if (antilinear_ != other.antilinear_) {
    throw ConfigError("cannot add a linear and an antilinear operator");
  }
  if (dimension() != other.dimension()) throw ConfigError("operator dimensions differ");
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  if (antilinear_ != other.antilinear_) {
    throw ConfigError("cannot subtract a linear and an antilinear operator");
  }
  if (dimension() != other.dimension()) throw ConfigError("operator dimensions differ");
  matrix_ -= other.matrix_;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dimension() != b.dimension()) throw ConfigError("operator dimensions differ");
  SparseMatrix product = a.antilinear_ ? SparseMatrix(a.matrix_ * b.matrix_.conjugate())
                                       : SparseMatrix(a.matrix_ * b.matrix_);
  return Operator(std::move(product), a.antilinear_ != b.antilinear_);
}

Operator operator*(Complex c, const Operator& a) {
  return Operator(SparseMatrix(c * a.matrix_), a.antilinear_);
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double max_deviation(const Operator& a, const Operator& b) {
  if (a.antilinear() != b.antilinear()) {
    throw ConfigError("cannot compare a linear and an antilinear operator");
  }
  const SparseMatrix diff = a.matrix() - b.matrix();
  double worst = 0.0;
  for (Eigen::Index col = 0; col < diff.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(diff, col); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

Operator sub_cutoff_projector(const TruncatedFockSpace& space) {
  space.require_materializable();
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(space.dimension()));
  OccupationRecord rec(space.num_oscillators(), 0);
  for (std::uint64_t i = 0; i < space.dimension(); ++i) {
    bool inside = true;
    for (int n : rec) inside = inside && n < space.cutoff();
    diag[static_cast<Eigen::Index>(i)] = inside ? 1.0 : 0.0;
    advance(rec, space.cutoff());
  }
  return Operator(diagonal_matrix(diag));
}

Operator restrict_sub_cutoff(const TruncatedFockSpace& space, const Operator& op) {
  check_dimension(space, op);
  const auto p = sub_cutoff_projector(space);
  return p * op * p;
}

// ---------------------------------------------------------------------------
// Ladder operators, functionals, fields

Operator creation(const TruncatedFockSpace& space, Charge charge, std::size_t mode) {
  return Operator(ladder(space, TruncatedFockSpace::oscillator(checked_mode(space, mode), charge),
                         true, 1.0));
}

Operator creation(const TruncatedFockSpace& space, Charge charge, std::string_view label) {
  auto index = space.spectrum().index_of(label);
  if (!index) throw ConfigError("unknown mode '" + std::string(label) + "'");
  return creation(space, charge, *index);
}

Operator annihilation(const TruncatedFockSpace& space, Charge charge, std::size_t mode) {
  return Operator(ladder(space, TruncatedFockSpace::oscillator(checked_mode(space, mode), charge),
                         false, 1.0));
}

Operator creation_functional(const TruncatedFockSpace& space, Charge charge,
                             std::span<const Complex> f) {
  check_coefficients(space, f);
  std::vector<Complex> c(f.begin(), f.end());
  if (charge == Charge::Plus) {
    for (auto& v : c) v = std::conj(v);
  }
  return ladder_sum(space, charge, true, c);
}

Operator annihilation_functional(const TruncatedFockSpace& space, Charge charge,
                                 std::span<const Complex> f) {
  check_coefficients(space, f);
  std::vector<Complex> c(f.begin(), f.end());
  if (charge == Charge::Minus) {
    for (auto& v : c) v = std::conj(v);
  }
  return ladder_sum(space, charge, false, c);
}

Operator hamiltonian(const TruncatedFockSpace& space) {
  space.require_materializable();
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(space.dimension()));
  OccupationRecord rec(space.num_oscillators(), 0);
  for (std::uint64_t i = 0; i < space.dimension(); ++i) {
    diag[static_cast<Eigen::Index>(i)] = space.energy(rec);
    advance(rec, space.cutoff());
  }
  return Operator(diagonal_matrix(diag));
}

Operator number_operator(const TruncatedFockSpace& space) {
  space.require_materializable();
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(space.dimension()));
  OccupationRecord rec(space.num_oscillators(), 0);
  for (std::uint64_t i = 0; i < space.dimension(); ++i) {
    int total = 0;
    for (int n : rec) total += n;
    diag[static_cast<Eigen::Index>(i)] = static_cast<double>(total);
    advance(rec, space.cutoff());
  }
  return Operator(diagonal_matrix(diag));
}

namespace {

// 2^{-1/2} sum_k c_k w_k^{-1/2} (lead_k * raise(first) + trail_k * lower(second)).
Operator field(const TruncatedFockSpace& space, std::span<const Complex> f, bool conjugate,
               auto&& lead_factor, auto&& trail_factor) {
  check_coefficients(space, f);
  const std::size_t m = f.size();
  std::vector<Complex> raise_c(m), lower_c(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double omega = space.spectrum().omega(k);
    const Complex c = (conjugate ? f[k] : std::conj(f[k])) / std::sqrt(2.0 * omega);
    raise_c[k] = c * lead_factor(omega);
    lower_c[k] = c * trail_factor(omega);
  }
  // phi: a*_+ and a_- ; phibar: a*_- and a_+.
  const Charge raised = conjugate ? Charge::Minus : Charge::Plus;
  const Charge lowered = conjugate ? Charge::Plus : Charge::Minus;
  return ladder_sum(space, raised, true, raise_c) + ladder_sum(space, lowered, false, lower_c);
}

}  // namespace

Operator imaginary_time_field(const TruncatedFockSpace& space, double t,
                              std::span<const Complex> f, bool conjugate) {
  return field(
      space, f, conjugate, [t](double w) { return Complex{std::exp(-t * w), 0.0}; },
      [t](double w) { return Complex{std::exp(t * w), 0.0}; });
}

Operator real_time_field(const TruncatedFockSpace& space, double t, std::span<const Complex> f,
                         bool conjugate) {
  return field(
      space, f, conjugate, [t](double w) { return std::polar(1.0, t * w); },
      [t](double w) { return std::polar(1.0, -t * w); });
}

// ---------------------------------------------------------------------------
// Symmetries

RecordImage symmetry_image(const SymmetrySpec& sym, std::span<const int> record) {
  RecordImage out{OccupationRecord(record.begin(), record.end()), {1.0, 0.0}};
  if (const auto* u = std::get_if<UnitarySymmetry>(&sym)) {
    for (std::size_t k = 0; k < u->phases.size(); ++k) {
      const Complex rho = u->phases[k];
      out.phase *= ipow(rho, record[2 * k]) * ipow(std::conj(rho), record[2 * k + 1]);
    }
    return out;
  }
  const auto& v = std::get<AntiunitarySymmetry>(sym);
  for (std::size_t j = 0; j < v.pairing.size(); ++j) {
    const std::size_t src = v.pairing[j];
    const int plus = record[2 * src];
    const int minus = record[2 * src + 1];
    out.record[2 * j] = minus;
    out.record[2 * j + 1] = plus;
    out.phase *= ipow(v.phases[j], plus) * ipow(std::conj(v.phases[j]), minus);
  }
  return out;
}

Operator implement_symmetry(const TruncatedFockSpace& space, const SymmetrySpec& sym) {
  validate_symmetry(space.spectrum(), sym);
  space.require_materializable();
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dim));
  OccupationRecord rec(space.num_oscillators(), 0);
  for (std::uint64_t i = 0; i < space.dimension(); ++i) {
    const auto image = symmetry_image(sym, rec);
    triplets.emplace_back(static_cast<Eigen::Index>(space.index(image.record)),
                          static_cast<Eigen::Index>(i), image.phase);
    advance(rec, space.cutoff());
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m));
}

Operator tc_operator(const TruncatedFockSpace& space) {
  space.require_materializable();
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dim));
  OccupationRecord rec(space.num_oscillators(), 0);
  OccupationRecord swapped(space.num_oscillators(), 0);
  for (std::uint64_t i = 0; i < space.dimension(); ++i) {
    for (std::size_t k = 0; 2 * k < rec.size(); ++k) {
      swapped[2 * k] = rec[2 * k + 1];
      swapped[2 * k + 1] = rec[2 * k];
    }
    triplets.emplace_back(static_cast<Eigen::Index>(space.index(swapped)),
                          static_cast<Eigen::Index>(i), 1.0);
    advance(rec, space.cutoff());
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m), true);
}

// ---------------------------------------------------------------------------
// Traces

Eigen::VectorXd heat_weights(const TruncatedFockSpace& space, double beta) {
  space.require_materializable();
  Eigen::VectorXd w(static_cast<Eigen::Index>(space.dimension()));
  OccupationRecord rec(space.num_oscillators(), 0);
  for (std::uint64_t i = 0; i < space.dimension(); ++i) {
    w[static_cast<Eigen::Index>(i)] = std::exp(-beta * space.energy(rec));
    advance(rec, space.cutoff());
  }
  return w;
}

Complex twisted_trace(const TruncatedFockSpace& space, std::span<const Operator> factors,
                      double beta, const Operator& twist) {
  check_dimension(space, twist);
  for (const auto& f : factors) check_dimension(space, f);

  Operator product = twist;
  for (std::size_t i = factors.size(); i-- > 0;) product = factors[i] * product;
  if (product.antilinear()) throw ConfigError("the trace of an antilinear operator is undefined");

  const Eigen::VectorXd weights = heat_weights(space, beta);
  CompensatedSum sum;
  const SparseMatrix& m = product.matrix();
  for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      if (it.row() == col) sum.add(it.value() * weights[col]);
    }
  }
  return sum.value();
}

Complex symmetry_trace(const TruncatedFockSpace& space, double beta, const SymmetrySpec& sym) {
  validate_symmetry(space.spectrum(), sym);
  const std::size_t oscillators = space.num_oscillators();
  const int cutoff = space.cutoff();
  const std::size_t levels = static_cast<std::size_t>(cutoff) + 1;
  CompensatedSum sum;

  if (oscillators == 0) return {1.0, 0.0};

  if (const auto* u = std::get_if<UnitarySymmetry>(&sym)) {
    // table[o][n] = (phase_o e^{-beta omega})^n, read off from the record image
    // of a single excited oscillator.
    std::vector<std::vector<Complex>> table(oscillators, std::vector<Complex>(levels));
    for (std::size_t o = 0; o < oscillators; ++o) {
      OccupationRecord single(oscillators, 0);
      single[o] = 1;
      const Complex phase = symmetry_image(*u, single).phase;
      const double x = std::exp(-beta * space.spectrum().omega(o / 2));
      Complex v{1.0, 0.0};
      for (std::size_t n = 0; n < levels; ++n) {
        table[o][n] = v;
        v *= phase * x;
      }
    }
    // prefix[o] = product of the table entries for oscillators < o.
    OccupationRecord rec(oscillators, 0);
    std::vector<Complex> prefix(oscillators + 1, Complex{1.0, 0.0});
    int changed = 0;
    while (changed >= 0) {
      for (std::size_t o = static_cast<std::size_t>(changed); o < oscillators; ++o) {
        prefix[o + 1] = prefix[o] * table[o][static_cast<std::size_t>(rec[o])];
      }
      sum.add(prefix[oscillators]);
      changed = advance(rec, cutoff);
    }
    return sum.value();
  }

  const auto& v = std::get<AntiunitarySymmetry>(sym);
  OccupationRecord rec(oscillators, 0);
  do {
    bool fixed = true;
    for (std::size_t j = 0; fixed && j < v.pairing.size(); ++j) {
      const std::size_t src = v.pairing[j];
      fixed = rec[2 * j] == rec[2 * src + 1] && rec[2 * j + 1] == rec[2 * src];
    }
    if (fixed) {
      const auto image = symmetry_image(v, rec);
      sum.add(image.phase * std::exp(-beta * space.energy(rec)));
    }
  } while (advance(rec, cutoff) >= 0);
  return sum.value();
}

double truncation_tail_bound(const ModeSpectrum& spectrum, double beta, int cutoff) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  double log_sum = 0.0;
  for (const auto& mode : spectrum.modes()) {
    const double y = std::exp(-beta * mode.omega * (static_cast<double>(cutoff) + 1.0));
    log_sum += 2.0 * std::log1p(y);
  }
  return std::expm1(log_sum);
}

int cutoff_for_tail(const ModeSpectrum& spectrum, double beta, double target,
                    std::uint64_t max_dimension) {
  const std::size_t oscillators = 2 * spectrum.size();
  auto fits = [&](int cutoff) {
    double dim = 1.0;
    for (std::size_t o = 0; o < oscillators; ++o) dim *= static_cast<double>(cutoff) + 1.0;
    return dim <= static_cast<double>(max_dimension);
  };
  int cutoff = 1;
  while (truncation_tail_bound(spectrum, beta, cutoff) >= target && fits(cutoff + 1)) ++cutoff;
  return cutoff;
}

}  // namespace twistkit
