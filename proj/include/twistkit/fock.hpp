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
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "twistkit/spectrum.hpp"

namespace twistkit {

enum class Charge { Plus, Minus };

/// Budgets for truncated Fock spaces.
///
/// `matrix_dimension` bounds the dimension of spaces on which operators are
/// materialized; `enumeration_dimension` bounds spaces that are only walked
/// record by record (lazy traces).
struct Capacity {
  std::uint64_t matrix_dimension = 2'000'000;
  std::uint64_t enumeration_dimension = 1'000'000'000;
};

/// Occupation numbers, one per oscillator. Oscillator 2k is (mode k, +),
/// oscillator 2k+1 is (mode k, -).
using OccupationRecord = std::vector<int>;

/// Two-charge bosonic Fock space with occupations 0..cutoff per oscillator.
///
/// Basis index i <-> record is the mixed-radix expansion of i in base
/// (cutoff+1) with oscillator 0 the most significant digit, so the order is
/// lexicographic in (mode, charge, occupation) and the vacuum is index 0.
class TruncatedFockSpace {
 public:
  const ModeSpectrum& spectrum() const { return spectrum_; }
  int cutoff() const { return cutoff_; }
  std::size_t num_oscillators() const { return 2 * spectrum_.size(); }
  std::uint64_t dimension() const { return dimension_; }
  const Capacity& capacity() const { return capacity_; }

  static std::size_t oscillator(std::size_t mode, Charge charge) {
    return 2 * mode + (charge == Charge::Plus ? 0 : 1);
  }

  /// Place value of an oscillator's digit in the basis index.
  std::uint64_t stride(std::size_t oscillator) const { return strides_[oscillator]; }

  OccupationRecord record(std::uint64_t index) const;
  std::uint64_t index(std::span<const int> record) const;

  /// Sum of omega_k (n+_k + n-_k).
  double energy(std::span<const int> record) const;

  /// Throws CapacityError when operators may not be materialized on this space.
  void require_materializable() const;

 private:
  friend TruncatedFockSpace build_space(const ModeSpectrum&, int, Capacity);

  ModeSpectrum spectrum_;
  int cutoff_ = 1;
  std::uint64_t dimension_ = 1;
  std::vector<std::uint64_t> strides_;
  Capacity capacity_;
};

/// Throws ConfigError for cutoff < 1 and CapacityError when the dimension
/// (cutoff+1)^(2 #modes) exceeds `capacity.enumeration_dimension`.
TruncatedFockSpace build_space(const ModeSpectrum& spectrum, int cutoff, Capacity capacity = {});

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Linear or antilinear operator on a truncated Fock space.
///
/// An antilinear operator acts as x -> M conj(x) in the fixed occupation
/// basis. Composition follows (A o B) = A.M * (A antilinear ? conj(B.M) : B.M)
/// with the antilinear flags xor-ed.
class Operator {
 public:
  Operator() = default;
  explicit Operator(SparseMatrix matrix, bool antilinear = false);

  static Operator identity(Eigen::Index dimension);
  static Operator zero(Eigen::Index dimension);

  const SparseMatrix& matrix() const { return matrix_; }
  bool antilinear() const { return antilinear_; }
  Eigen::Index dimension() const { return matrix_.rows(); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  /// <x, A y> = <A* x, y> (linear) or conj(<A* x, y>) (antilinear).
  Operator adjoint() const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);

  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex c, const Operator& a);
  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }

 private:
  SparseMatrix matrix_;
  bool antilinear_ = false;
};

Operator commutator(const Operator& a, const Operator& b);

/// Largest entry of |A - B|; throws ConfigError if the linearity differs.
double max_deviation(const Operator& a, const Operator& b);

/// Projector onto records with every occupation strictly below the cutoff.
Operator sub_cutoff_projector(const TruncatedFockSpace& space);

/// P A P with P the sub-cutoff projector.
Operator restrict_sub_cutoff(const TruncatedFockSpace& space, const Operator& op);

/// alpha*_+(k) or alpha*_-(-k). Occupation `cutoff` is sent to zero.
Operator creation(const TruncatedFockSpace& space, Charge charge, std::size_t mode);
Operator creation(const TruncatedFockSpace& space, Charge charge, std::string_view label);
Operator annihilation(const TruncatedFockSpace& space, Charge charge, std::size_t mode);

/// Coefficients are f_k = <e_k, f>.
///
/// Plus:  A+*(f bar) = sum_k conj(f_k) alpha*_+(k)
/// Minus: A-*(f)     = sum_k f_k alpha*_-(-k)
Operator creation_functional(const TruncatedFockSpace& space, Charge charge,
                             std::span<const Complex> f);

/// A+(f) = (A+*(f bar))* and A-(f bar) = (A-*(f))*.
Operator annihilation_functional(const TruncatedFockSpace& space, Charge charge,
                                 std::span<const Complex> f);

Operator hamiltonian(const TruncatedFockSpace& space);
Operator number_operator(const TruncatedFockSpace& space);

/// phi(t, f bar), or phi bar(t, f) when `conjugate`:
///
///   phi(t, f bar)  = 2^{-1/2} sum_k conj(f_k) w_k^{-1/2} (e^{-t w} a*_+(k) + e^{t w} a_-(-k))
///   phibar(t, f)   = 2^{-1/2} sum_k f_k       w_k^{-1/2} (e^{-t w} a*_-(-k) + e^{t w} a_+(k))
///
/// The e^{t w} factors are finite for finite t but grow like e^{t omega_max}.
Operator imaginary_time_field(const TruncatedFockSpace& space, double t,
                              std::span<const Complex> f, bool conjugate);

/// Real-time fields phi_RT(t, f bar) and phi*_RT(t, f) (e^{-tw} -> e^{itw}).
Operator real_time_field(const TruncatedFockSpace& space, double t, std::span<const Complex> f,
                         bool conjugate);

/// Image of a basis record under the Fock implementation of `sym`.
struct RecordImage {
  OccupationRecord record;
  Complex phase{1.0, 0.0};
};

/// Unitary S:     same record, phase prod_k rho_k^{n+_k} conj(rho_k)^{n-_k}.
/// Antiunitary V: n+_j <- n-_{pi(j)}, n-_j <- n+_{pi(j)},
///                phase prod_j eta_j^{n+_{pi(j)}} conj(eta_j)^{n-_{pi(j)}}.
///
/// Both follow from U A+*(f bar) U* = A+*(S bar* f bar), U A-*(f) U* = A-*(S* f)
/// and U_V A+*(f bar) U_V* = A-*(V* f), U_V A-*(f) U_V* = A+*(V bar* f bar).
RecordImage symmetry_image(const SymmetrySpec& sym, std::span<const int> record);

/// U_S (always linear; an antiunitary symmetry has a unitary implementation).
Operator implement_symmetry(const TruncatedFockSpace& space, const SymmetrySpec& sym);

/// Antilinear charge swap: TC |n+, n-> = |n-, n+>, TC(c x) = conj(c) TC x.
Operator tc_operator(const TruncatedFockSpace& space);

/// Diagonal of e^{-beta H}.
Eigen::VectorXd heat_weights(const TruncatedFockSpace& space, double beta);

/// Tr(factors[0] ... factors[n-1] * twist * e^{-beta H}).
///
/// Throws ConfigError on dimension mismatch or if the product is antilinear.
Complex twisted_trace(const TruncatedFockSpace& space, std::span<const Operator> factors,
                      double beta, const Operator& twist);

/// Tr(U_sym e^{-beta H}) by walking every basis record; no operator storage.
Complex symmetry_trace(const TruncatedFockSpace& space, double beta, const SymmetrySpec& sym);

/// Upper bound on |Z_trunc / Z - 1| for traces of e^{-beta H} twisted by
/// generalized permutations with unit-modulus phases (U_S, U_V):
/// prod_k (1 + y_k)^2 - 1 with y_k = e^{-beta omega_k (N+1)}.
double truncation_tail_bound(const ModeSpectrum& spectrum, double beta, int cutoff);

/// Smallest cutoff whose tail bound is below `target`, or the largest cutoff
/// that fits `max_dimension` when none does.
int cutoff_for_tail(const ModeSpectrum& spectrum, double beta, double target,
                    std::uint64_t max_dimension);

}  // namespace twistkit
