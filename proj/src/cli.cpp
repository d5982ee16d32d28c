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

#include "twistkit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "twistkit/config.hpp"
#include "twistkit/correlation.hpp"
#include "twistkit/errors.hpp"
#include "twistkit/fock.hpp"
#include "twistkit/partition.hpp"
#include "twistkit/realfield.hpp"

namespace twistkit::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.16e", value);
  return buffer;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Capacity capacity_from_env() {
  Capacity capacity;
  const char* text = std::getenv("TWISTKIT_CAPACITY");
  if (text == nullptr || *text == '\0') return capacity;
  std::uint64_t value = 0;
  const char* end = text + std::char_traits<char>::length(text);
  const auto [ptr, ec] = std::from_chars(text, end, value);
  if (ec != std::errc{} || ptr != end || value == 0) {
    throw ConfigError(std::string("TWISTKIT_CAPACITY must be a positive integer, got '") + text + "'");
  }
  capacity.matrix_dimension = value;
  return capacity;
}

// Records walked by the lazy partition oracle.
std::uint64_t enumeration_budget(const Capacity& capacity) {
  const std::uint64_t scaled = capacity.matrix_dimension > std::numeric_limits<std::uint64_t>::max() / 10
                                   ? std::numeric_limits<std::uint64_t>::max()
                                   : 10 * capacity.matrix_dimension;
  return std::min(capacity.enumeration_dimension, scaled);
}

double dimension_for(std::size_t modes, int cutoff) {
  return std::pow(static_cast<double>(cutoff) + 1.0, 2.0 * static_cast<double>(modes));
}

// Largest cutoff in [2, max_cutoff] whose space fits `limit` and the matrix budget.
int verification_cutoff(std::size_t modes, const Capacity& capacity, double limit, int max_cutoff) {
  const double budget = std::min(limit, static_cast<double>(capacity.matrix_dimension));
  int cutoff = max_cutoff;
  while (cutoff > 2 && dimension_for(modes, cutoff) > budget) --cutoff;
  if (dimension_for(modes, cutoff) > budget) {
    std::ostringstream msg;
    msg << "a " << modes << "-mode space with cutoff " << cutoff
        << " exceeds the matrix budget of " << capacity.matrix_dimension;
    throw CapacityError(msg.str());
  }
  return cutoff;
}

// Output goes to a file when a path is given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

// ---------------------------------------------------------------------------
// partition

struct PartitionOptions {
  std::string config;
  std::vector<double> betas;
  std::optional<int> cutoff;
  std::string output;
  std::string factors;
};

int cmd_partition(const PartitionOptions& opts, std::ostream& out, std::ostream& err) {
  const auto config = load_config(opts.config);
  const auto capacity = capacity_from_env();
  const auto& spectrum = config.spectrum;
  const bool antiunitary = kind_of(config.symmetry) == SymmetryKind::Antiunitary;

  Sink sink(opts.output, out);
  *sink << "beta,z_untwisted,z_twisted,lower_bound,oracle_z,rel_err,tail_bound\n";
  std::optional<Sink> factor_sink;
  if (!opts.factors.empty()) {
    factor_sink.emplace(opts.factors, out);
    **factor_sink << "beta,label,factor\n";
  }

  bool ok = true;
  for (double beta : opts.betas) {
    const double z0 = z_untwisted(spectrum, beta);
    const double z = z_twisted(spectrum, config.symmetry, beta);
    const double lower = positivity_lower_bound(spectrum, beta);

    double oracle = std::numeric_limits<double>::quiet_NaN();
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    double tail = std::numeric_limits<double>::quiet_NaN();
    int cutoff = 0;
    if (opts.cutoff) {
      cutoff = *opts.cutoff;
      if (dimension_for(spectrum.size(), cutoff) > static_cast<double>(enumeration_budget(capacity))) {
        throw CapacityError("oracle space with cutoff " + std::to_string(cutoff) +
                            " exceeds the enumeration budget");
      }
    } else if (dimension_for(spectrum.size(), 1) <= static_cast<double>(enumeration_budget(capacity))) {
      cutoff = cutoff_for_tail(spectrum, beta, 1e-10, enumeration_budget(capacity));
    } else {
      err << "warning: spectrum too large for the Fock oracle at beta=" << format_double(beta)
          << "; oracle columns left as nan\n";
    }
    if (cutoff > 0) {
      Capacity walk = capacity;
      walk.enumeration_dimension = enumeration_budget(capacity);
      const auto space = build_space(spectrum, cutoff, walk);
      const Complex trace = symmetry_trace(space, beta, config.symmetry);
      oracle = trace.real();
      rel_err = std::abs(trace - z) / z;
      tail = truncation_tail_bound(spectrum, beta, cutoff);
      const double slack = antiunitary ? 1e-8 : 1e-10;
      if (!(rel_err <= tail + slack)) {
        err << "assertion failed: beta=" << format_double(beta) << " oracle disagrees with the product formula (rel err "
            << format_double(rel_err) << ", tail bound " << format_double(tail) << ")\n";
        ok = false;
      }
    }
    if (!(z > 0.0) || !(z >= lower * (1.0 - 1e-12)) || !(z <= z0 * (1.0 + 1e-12))) {
      err << "assertion failed: beta=" << format_double(beta)
          << " twisted Z violates lower_bound <= Z <= z_untwisted\n";
      ok = false;
    }
    if (antiunitary) {
      const auto anti = z_twisted_antiunitary(spectrum, std::get<AntiunitarySymmetry>(config.symmetry), beta);
      if (anti.below_floor) {
        err << "warning: beta=" << format_double(beta) << " twisted Z below 1e-300\n";
      }
    }
    *sink << format_double(beta) << ',' << format_double(z0) << ',' << format_double(z) << ','
          << format_double(lower) << ',' << format_double(oracle) << ',' << format_double(rel_err)
          << ',' << format_double(tail) << '\n';
    if (factor_sink) {
      for (const auto& f : mode_factors(spectrum, config.symmetry, beta)) {
        **factor_sink << format_double(beta) << ',' << f.label << ',' << format_double(f.factor) << '\n';
      }
    }
  }
  return ok ? kOk : kAssertionFailed;
}

// ---------------------------------------------------------------------------
// kernel

struct KernelOptions {
  std::string config;
  double beta = 1.0;
  int grid = 256;
  std::string output;
  bool verify = false;
  bool extended = false;
  std::string mode;
  std::string source = "closed";
  int fourier_cutoff = 100000;
};

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int cmd_kernel(const KernelOptions& opts, std::ostream& out, std::ostream& err) {
  const auto config = load_config(opts.config);
  const auto capacity = capacity_from_env();
  const auto& spectrum = config.spectrum;
  if (!power_of_two(opts.grid)) throw ConfigError("grid size must be a power of two");
  if (!(opts.beta > 0.0) || !std::isfinite(opts.beta)) throw DomainError("beta must be positive");
  if (spectrum.empty()) throw ConfigError("the kernel needs at least one mode");
  const bool antiunitary = kind_of(config.symmetry) == SymmetryKind::Antiunitary;
  if (antiunitary && !opts.extended) {
    throw ConfigError("antiunitary symmetries have no per-mode kernel; pass --extended");
  }
  for (const auto& m : spectrum.modes()) {
    if (kernel_ill_conditioned(m.omega, opts.beta)) {
      err << "warning: |1 - exp(-beta omega)| < 1e-8 for mode " << m.label
          << "; kernel values near theta = 0 are ill-conditioned\n";
    }
  }
  const int grid = opts.grid;
  const double beta = opts.beta;
  auto point = [&](int i) { return beta * static_cast<double>(i) / static_cast<double>(grid); };
  Sink sink(opts.output, out);
  std::ostream& report = opts.output.empty() ? err : out;

  if (opts.extended) {
    if (opts.source != "closed") throw ConfigError("the extended kernel is only available in closed form");
    const auto ext = extend(spectrum, config.symmetry);
    const auto eigen = diagonalize_induced(ext);
    *sink << "t,s,sector,re,im,tail_bound\n";
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const auto k = extended_kernel(ext, eigen, beta, point(i), point(j));
        for (std::size_t a = 0; a < ext.size(); ++a) {
          for (std::size_t b = 0; b < ext.size(); ++b) {
            const Complex v = k.blocks(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            *sink << format_double(point(i)) << ',' << format_double(point(j)) << ','
                  << ext.sector_label(a) << ':' << ext.sector_label(b) << ',' << format_double(v.real())
                  << ',' << format_double(v.imag()) << ',' << format_double(0.0) << '\n';
          }
        }
      }
    }
    if (!opts.verify) return kOk;
    // Fock check of the block kernel on a 4x4 subgrid.
    const int cutoff = verification_cutoff(spectrum.size(), capacity, 40000.0, 60);
    const double tail = truncation_tail_bound(spectrum, beta, cutoff);
    double worst = 0.0;
    const int step = std::max(1, grid / 4);
    for (int i = 0; i < grid; i += step) {
      for (int j = 0; j < grid; j += step) {
        const auto closed = extended_kernel(ext, eigen, beta, point(i), point(j)).blocks;
        const auto oracle = extended_kernel_oracle(ext, beta, point(i), point(j), cutoff, capacity);
        worst = std::max(worst, (closed - oracle).cwiseAbs().maxCoeff());
      }
    }
    report << "max |closed - oracle| = " << format_double(worst) << " (cutoff " << cutoff
           << ", partition tail bound " << format_double(tail) << ")\n";
    return worst <= 1e-6 ? kOk : kAssertionFailed;
  }

  std::size_t mode = 0;
  if (!opts.mode.empty()) {
    const auto index = spectrum.index_of(opts.mode);
    if (!index) throw ConfigError("unknown mode '" + opts.mode + "'");
    mode = *index;
  }
  const auto& u = std::get<UnitarySymmetry>(config.symmetry);
  const double omega = spectrum.omega(mode);
  const double theta = kernel_twist_for_symmetry(u.phases[mode]).theta;
  if (opts.source != "closed" && opts.source != "fourier") {
    throw ConfigError("unknown kernel source '" + opts.source + "'");
  }
  if (opts.fourier_cutoff < 1) throw ConfigError("Fourier cutoff must be at least 1");

  *sink << "t,s,re,im,tail_bound\n";
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      BoundedValue v{kernel_closed_form(omega, theta, beta, point(i), point(j)), 0.0};
      if (opts.source == "fourier") v = kernel_fourier(omega, theta, beta, point(i), point(j), opts.fourier_cutoff);
      *sink << format_double(point(i)) << ',' << format_double(point(j)) << ','
            << format_double(v.value.real()) << ',' << format_double(v.value.imag()) << ','
            << format_double(v.tail_bound) << '\n';
    }
  }
  if (!opts.verify) return kOk;

  const auto single = validate_spectrum({spectrum[mode]});
  const UnitarySymmetry single_sym{{u.phases[mode]}};
  double oracle_gap = 0.0, oracle_tail = 0.0, fourier_gap = 0.0, fourier_tail = 0.0, excess = 0.0;
  const int step = std::max(1, grid / 8);
  for (int i = 0; i < grid; i += step) {
    for (int j = 0; j < grid; j += step) {
      const Complex closed = kernel_closed_form(omega, theta, beta, point(i), point(j));
      const auto oracle = kernel_oracle(single, single_sym, beta, point(i), point(j), std::nullopt, capacity);
      const auto fourier = kernel_fourier(omega, theta, beta, point(i), point(j), opts.fourier_cutoff);
      const double og = std::abs(closed - oracle.value);
      const double fg = std::abs(closed - fourier.value);
      oracle_gap = std::max(oracle_gap, og);
      oracle_tail = std::max(oracle_tail, oracle.tail_bound);
      fourier_gap = std::max(fourier_gap, fg);
      fourier_tail = fourier.tail_bound;
      excess = std::max({excess, og - oracle.tail_bound - 1e-8, fg - fourier.tail_bound});
    }
  }
  report << "max |closed - oracle| = " << format_double(oracle_gap) << " (tail bound "
         << format_double(oracle_tail) << ")\n"
         << "max |closed - fourier| = " << format_double(fourier_gap) << " (tail bound "
         << format_double(fourier_tail) << ")\n"
         << "max three-way disagreement = " << format_double(std::max(oracle_gap, fourier_gap)) << '\n';
  return excess <= 0.0 ? kOk : kAssertionFailed;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

class Report {
 public:
  void add(std::string name, double deviation, double tolerance) {
    checks_.push_back({std::move(name), deviation, tolerance, deviation <= tolerance});
  }
  void expect(std::string name, bool condition, double value) {
    checks_.push_back({std::move(name), value, 0.0, condition});
  }
  void skip(std::string name, std::string reason) { skipped_.push_back(std::move(name) + ": " + reason); }

  int write(std::ostream& out) const {
    int failed = 0;
    for (const auto& c : checks_) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name << " deviation=" << format_double(c.deviation)
          << " tolerance=" << format_double(c.tolerance) << '\n';
      failed += c.passed ? 0 : 1;
    }
    for (const auto& s : skipped_) out << "SKIP " << s << '\n';
    out << "summary: " << checks_.size() - static_cast<std::size_t>(failed) << " passed, " << failed
        << " failed, " << skipped_.size() << " skipped\n";
    return failed;
  }

 private:
  std::vector<Check> checks_;
  std::vector<std::string> skipped_;
};

std::vector<Complex> random_coefficients(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<Complex> out(n);
  for (auto& c : out) c = {normal(rng), normal(rng)};
  return out;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex sum{};
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::conj(a[k]) * b[k];
  return sum;
}

// e^{factor H} from the record energies.
Operator diagonal_exp(const TruncatedFockSpace& space, Complex factor) {
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double energy = space.energy(space.record(static_cast<std::uint64_t>(i)));
    triplets.emplace_back(i, i, std::exp(factor * energy));
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m));
}

double restricted(const TruncatedFockSpace& space, const Operator& a, const Operator& b) {
  return max_deviation(restrict_sub_cutoff(space, a), restrict_sub_cutoff(space, b));
}

void suite_ccr(const TheoryConfig& config, const Capacity& capacity, std::mt19937_64& rng, Report& report) {
  const auto& spectrum = config.spectrum;
  const int cutoff = verification_cutoff(spectrum.size(), capacity, 20000.0, 10);
  const auto space = build_space(spectrum, cutoff, capacity);
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  const auto f = random_coefficients(rng, spectrum.size());
  const auto g = random_coefficients(rng, spectrum.size());
  const Operator id = Operator::identity(dim);

  report.add("ccr.plus", restricted(space, commutator(annihilation_functional(space, Charge::Plus, f),
                                                      creation_functional(space, Charge::Plus, g)),
                                    inner(g, f) * id),
             1e-12);
  report.add("ccr.minus", restricted(space, commutator(annihilation_functional(space, Charge::Minus, f),
                                                       creation_functional(space, Charge::Minus, g)),
                                     inner(f, g) * id),
             1e-12);
  report.add("ccr.independence",
             max_deviation(commutator(creation_functional(space, Charge::Plus, f),
                                      creation_functional(space, Charge::Minus, g)),
                           Operator::zero(dim)),
             0.0);
  report.add("ccr.hamiltonian_number",
             max_deviation(commutator(hamiltonian(space), number_operator(space)), Operator::zero(dim)), 0.0);

  const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const Operator forward = diagonal_exp(space, Complex{0.0, t});
  const Operator backward = diagonal_exp(space, Complex{0.0, -t});
  std::vector<Complex> evolved(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) evolved[k] = std::polar(1.0, -t * spectrum.omega(k)) * f[k];
  report.add("ccr.dynamics_plus",
             restricted(space, forward * creation_functional(space, Charge::Plus, f) * backward,
                        creation_functional(space, Charge::Plus, evolved)),
             1e-10);
  for (std::size_t k = 0; k < f.size(); ++k) evolved[k] = std::polar(1.0, t * spectrum.omega(k)) * f[k];
  report.add("ccr.dynamics_minus",
             restricted(space, forward * creation_functional(space, Charge::Minus, f) * backward,
                        creation_functional(space, Charge::Minus, evolved)),
             1e-10);

  report.add("ccr.field_adjoint_t0",
             restricted(space, imaginary_time_field(space, 0.0, f, false).adjoint(),
                        imaginary_time_field(space, 0.0, f, true)),
             1e-12);
  report.add("ccr.field_adjoint",
             restricted(space, imaginary_time_field(space, t, f, false).adjoint(),
                        imaginary_time_field(space, -t, f, true)),
             1e-10);
}

void suite_tc(const TheoryConfig& config, const Capacity& capacity, std::mt19937_64& rng, Report& report) {
  const auto& spectrum = config.spectrum;
  const int cutoff = verification_cutoff(spectrum.size(), capacity, 20000.0, 10);
  const auto space = build_space(spectrum, cutoff, capacity);
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  const Operator tc = tc_operator(space);
  const Operator u = implement_symmetry(space, config.symmetry);

  const Operator square = tc * tc;
  report.add("tc.square", max_deviation(square, Operator::identity(dim)), 0.0);
  const Eigen::VectorXcd vacuum = Eigen::VectorXcd::Unit(dim, 0);
  report.add("tc.vacuum", (tc.apply(vacuum) - vacuum).cwiseAbs().maxCoeff(), 0.0);
  report.add("tc.symmetry", max_deviation(u * tc, tc * u), 0.0);

  std::normal_distribution<double> normal;
  Eigen::VectorXcd x(dim), y(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    x[i] = {normal(rng), normal(rng)};
    y[i] = {normal(rng), normal(rng)};
  }
  const Complex before = x.dot(y);
  const Complex after = tc.apply(x).dot(tc.apply(y));
  report.add("tc.antiunitary", std::abs(after - std::conj(before)) / std::max(1.0, std::abs(before)), 1e-12);

  const auto f = random_coefficients(rng, spectrum.size());
  report.add("tc.creation", restricted(space, tc * creation_functional(space, Charge::Plus, f) * tc,
                                       creation_functional(space, Charge::Minus, f)),
             1e-12);
  const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  report.add("tc.field", restricted(space, tc * imaginary_time_field(space, t, f, false) * tc,
                                    imaginary_time_field(space, t, f, true)),
             1e-12);
}

void suite_symmetry(const TheoryConfig& config, const Capacity& capacity, std::mt19937_64& rng,
                    Report& report) {
  const auto& spectrum = config.spectrum;
  const int cutoff = verification_cutoff(spectrum.size(), capacity, 20000.0, 10);
  const auto space = build_space(spectrum, cutoff, capacity);
  const auto dim = static_cast<Eigen::Index>(space.dimension());
  const Operator u = implement_symmetry(space, config.symmetry);

  report.add("symmetry.unitary", max_deviation(u * u.adjoint(), Operator::identity(dim)), 1e-14);
  const Eigen::VectorXcd vacuum = Eigen::VectorXcd::Unit(dim, 0);
  report.add("symmetry.vacuum", (u.apply(vacuum) - vacuum).cwiseAbs().maxCoeff(), 0.0);
  double omega_max = 0.0;
  for (const auto& m : spectrum.modes()) omega_max = std::max(omega_max, m.omega);
  report.add("symmetry.hamiltonian", max_deviation(commutator(u, hamiltonian(space)), Operator::zero(dim)),
             1e-12 * std::max(1.0, omega_max));

  const auto ext = extend(spectrum, config.symmetry);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd q(static_cast<Eigen::Index>(ext.size()));
  for (auto& c : q) c = {normal(rng), normal(rng)};
  const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  report.add("symmetry.implementation",
             restricted(space, u * real_field_rt(space, t, q) * u.adjoint(),
                        real_field_rt(space, t, ext.symmetry.adjoint() * q)),
             1e-12);
  if (const auto* s = std::get_if<UnitarySymmetry>(&config.symmetry)) {
    double worst = 0.0;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      const Operator a = creation(space, Charge::Plus, k);
      worst = std::max(worst, max_deviation(u * a * u.adjoint(), s->phases[k] * a));
    }
    report.add("symmetry.phase_convention", worst, 1e-14);
  }
}

void suite_partition(const TheoryConfig& config, const Capacity& capacity, std::mt19937_64& rng,
                     Report& report) {
  const auto& spectrum = config.spectrum;
  const bool antiunitary = kind_of(config.symmetry) == SymmetryKind::Antiunitary;
  Capacity walk = capacity;
  walk.enumeration_dimension = enumeration_budget(capacity);
  for (double beta : {0.5, 1.0, 2.0}) {
    const std::string tag = "beta=" + format_double(beta);
    const double z = z_twisted(spectrum, config.symmetry, beta);
    if (dimension_for(spectrum.size(), 1) <= static_cast<double>(walk.enumeration_dimension)) {
      const int cutoff = cutoff_for_tail(spectrum, beta, 1e-10, walk.enumeration_dimension);
      const Complex trace = symmetry_trace(build_space(spectrum, cutoff, walk), beta, config.symmetry);
      report.add("partition.oracle " + tag, std::abs(trace - z) / z,
                 truncation_tail_bound(spectrum, beta, cutoff) + (antiunitary ? 1e-8 : 1e-10));
    } else {
      report.skip("partition.oracle " + tag, "spectrum too large for the Fock oracle");
    }
    const double lower = positivity_lower_bound(spectrum, beta);
    report.expect("partition.lower_bound " + tag, z > 0.0 && z >= lower * (1.0 - 1e-12), z - lower);
    if (antiunitary) {
      report.add("partition.real_field_route " + tag,
                 std::abs(z_real_field(extend(spectrum, config.symmetry), beta) - z) / z, 1e-10);
    }
    const auto estimate = trace_class_estimate(spectrum, beta);
    report.expect("partition.trace_class " + tag, estimate.holds(), estimate.lhs - estimate.rhs);
  }
  // Positivity for random unitary twists of the configured spectrum.
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> beta_dist(0.1, 5.0);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    UnitarySymmetry sym;
    for (std::size_t k = 0; k < spectrum.size(); ++k) sym.phases.push_back(std::polar(1.0, angle(rng)));
    const double beta = beta_dist(rng);
    const double z = z_twisted_unitary(spectrum, sym, beta).real();
    if (!(z > 0.0 && z >= positivity_lower_bound(spectrum, beta) * (1.0 - 1e-12))) ++failures;
  }
  report.add("partition.random_positivity", failures, 0.0);
}

void suite_kernel(const TheoryConfig& config, const Capacity& capacity, std::mt19937_64& rng,
                  Report& report) {
  const auto& spectrum = config.spectrum;
  if (spectrum.empty()) {
    report.skip("kernel", "empty spectrum");
    return;
  }
  const double beta = 1.0;
  std::uniform_real_distribution<double> time(0.0, beta);

  if (kind_of(config.symmetry) == SymmetryKind::Antiunitary) {
    const auto ext = extend(spectrum, config.symmetry);
    const auto eigen = diagonalize_induced(ext);
    double hermitian = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      const double t = time(rng), s = time(rng);
      const auto a = extended_kernel(ext, eigen, beta, t, s).blocks;
      const auto b = extended_kernel(ext, eigen, beta, s, t).blocks;
      hermitian = std::max(hermitian, (a - b.adjoint()).cwiseAbs().maxCoeff());
    }
    report.add("kernel.extended_hermitian", hermitian, 1e-14);
    const double min_eig = min_eigenvalue(sample_extended_kernel(ext, beta, 16));
    report.expect("kernel.extended_positive", min_eig > 0.0, min_eig);
    const double limit = std::min(40000.0, static_cast<double>(capacity.matrix_dimension));
    int cutoff = 2;
    while (dimension_for(spectrum.size(), cutoff + 1) <= limit) ++cutoff;
    if (dimension_for(spectrum.size(), cutoff) <= limit &&
        truncation_tail_bound(spectrum, beta, cutoff) < 1e-10) {
      double worst = 0.0;
      for (int trial = 0; trial < 4; ++trial) {
        const double t = time(rng), s = time(rng);
        const auto closed = extended_kernel(ext, eigen, beta, t, s).blocks;
        worst = std::max(worst, (closed - extended_kernel_oracle(ext, beta, t, s, cutoff, capacity))
                                    .cwiseAbs()
                                    .maxCoeff());
      }
      report.add("kernel.extended_oracle", worst, 1e-8);
    } else {
      report.skip("kernel.extended_oracle", "Fock space too small for a 1e-10 tail");
    }
    return;
  }

  const auto& u = std::get<UnitarySymmetry>(config.symmetry);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const std::string tag = " " + spectrum[k].label;
    const double omega = spectrum.omega(k);
    const double theta = kernel_twist_for_symmetry(u.phases[k]).theta;
    const auto single = validate_spectrum({spectrum[k]});
    const UnitarySymmetry single_sym{{u.phases[k]}};
    double oracle_excess = -1.0, fourier_excess = -1.0, hermitian = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      const double t = time(rng), s = time(rng);
      const Complex closed = kernel_closed_form(omega, theta, beta, t, s);
      const auto oracle = kernel_oracle(single, single_sym, beta, t, s, std::nullopt, capacity);
      const auto fourier = kernel_fourier(omega, theta, beta, t, s, 20000);
      oracle_excess = std::max(oracle_excess, std::abs(closed - oracle.value) - oracle.tail_bound);
      fourier_excess = std::max(fourier_excess, std::abs(closed - fourier.value) - fourier.tail_bound);
      hermitian = std::max(hermitian, std::abs(closed - std::conj(kernel_closed_form(omega, theta, beta, s, t))));
    }
    report.add("kernel.oracle" + tag, std::max(oracle_excess, 0.0), 1e-8);
    report.add("kernel.fourier" + tag, std::max(fourier_excess, 0.0), 0.0);
    report.add("kernel.hermitian" + tag, hermitian, 1e-14);

    const TwistedKernel kernel(omega, theta, beta);
    const double min_eig = min_eigenvalue(sample_kernel(kernel, 32).matrix);
    report.expect("kernel.positive" + tag, min_eig > 0.0, min_eig);
    const int grid = 64;
    const double h = beta / grid;
    const double nu = theta / beta;
    report.add("kernel.resolvent" + tag, verify_resolvent(kernel, twisted_mode(theta, beta, 0), grid).max_residual,
               h * h * (nu * nu + omega * omega) / 6.0 + 1e-12);
  }

  // Direct-sum law for apply_inverse.
  const int grid = 64;
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd samples(grid, static_cast<Eigen::Index>(spectrum.size()));
  for (Eigen::Index i = 0; i < samples.size(); ++i) samples.data()[i] = {normal(rng), normal(rng)};
  const auto joint = apply_inverse(spectrum, u, beta, samples);
  double worst = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const auto single = validate_spectrum({spectrum[k]});
    const auto col = apply_inverse(single, UnitarySymmetry{{u.phases[k]}}, beta,
                                   samples.col(static_cast<Eigen::Index>(k)));
    worst = std::max(worst, (col - joint.col(static_cast<Eigen::Index>(k))).cwiseAbs().maxCoeff());
  }
  report.add("kernel.direct_sum", worst, 0.0);
}

void suite_realfield(const TheoryConfig& config, const Capacity& capacity, std::uint64_t seed, Report& report) {
  const auto& spectrum = config.spectrum;
  const auto ext = extend(spectrum, config.symmetry);
  report.add("realfield.induced_unitary", unitarity_defect(ext.symmetry), 1e-12);
  report.add("realfield.induced_real", reality_defect(ext.symmetry), 1e-12);
  const auto eigen = diagonalize_induced(ext);
  report.expect("realfield.conjugate_pairs", conjugation_closed(eigen), 0.0);
  for (double beta : {0.5, 1.0, 2.0}) {
    const double z = z_twisted(spectrum, config.symmetry, beta);
    report.add("realfield.partition beta=" + format_double(beta), std::abs(z_real_field(ext, beta) - z) / z,
               1e-10);
  }
  if (!spectrum.empty()) {
    const double beta = 1.0;
    if (kind_of(config.symmetry) == SymmetryKind::Unitary) {
      double worst = 0.0;
      for (double t : {0.1, 0.5, 0.9}) {
        for (double s : {0.2, 0.7}) {
          worst = std::max(worst, off_diagonal_size(ext, extended_kernel(ext, eigen, beta, t, s).blocks));
        }
      }
      report.add("realfield.off_diagonal", worst, 1e-12);
    }
    const double min_eig = min_eigenvalue(sample_extended_kernel(ext, beta, 16));
    report.expect("realfield.positive", min_eig > 0.0, min_eig);
  }
  const int cutoff = verification_cutoff(spectrum.size(), capacity, 5000.0, 12);
  const auto checks = real_field_checks(ext, cutoff, seed, capacity);
  report.add("realfield.omega_real", checks.omega_reality, 0.0);
  report.add("realfield.symmetry_real", checks.symmetry_reality, 1e-15);
  report.add("realfield.adjoint", checks.adjoint, 1e-12);
  report.add("realfield.canonical", checks.canonical, 1e-8);
  report.add("realfield.equal_time", checks.equal_time, 1e-12);
  report.add("realfield.ladder", checks.ladder, 1e-12);
  report.add("realfield.implementation", checks.implementation, 1e-12);
}

struct VerifyOptions {
  std::string config;
  std::string suite;
  std::uint64_t seed = 0;
};

int cmd_verify(const VerifyOptions& opts, std::ostream& out) {
  static const std::vector<std::string> kSuites = {"ccr", "tc", "symmetry", "partition", "kernel", "realfield"};
  if (opts.suite != "all" && std::find(kSuites.begin(), kSuites.end(), opts.suite) == kSuites.end()) {
    throw ConfigError("unknown suite '" + opts.suite + "'");
  }
  const auto config = load_config(opts.config);
  const auto capacity = capacity_from_env();
  Report report;
  for (const auto& name : kSuites) {
    if (opts.suite != "all" && opts.suite != name) continue;
    std::mt19937_64 rng(opts.seed);
    if (name == "ccr") suite_ccr(config, capacity, rng, report);
    if (name == "tc") suite_tc(config, capacity, rng, report);
    if (name == "symmetry") suite_symmetry(config, capacity, rng, report);
    if (name == "partition") suite_partition(config, capacity, rng, report);
    if (name == "kernel") suite_kernel(config, capacity, rng, report);
    if (name == "realfield") suite_realfield(config, capacity, opts.seed, report);
  }
  return report.write(out) == 0 ? kOk : kAssertionFailed;
}

// ---------------------------------------------------------------------------
// spectrum gen twisted-circle

struct CircleOptions {
  double rho = 0.0;
  double mass = 0.0;
  int n_min = -2;
  int n_max = 2;
  std::string output;
};

int cmd_circle(const CircleOptions& opts, std::ostream& out) {
  if (opts.n_min > opts.n_max) throw ConfigError("--n-min must not exceed --n-max");
  const auto spectrum = twisted_circle_spectrum(opts.rho, opts.mass, {opts.n_min, opts.n_max});
  Sink sink(opts.output, out);
  *sink << dump_config({spectrum, identity_symmetry(spectrum.size())});
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted free-boson partition functions and correlation kernels", "twistkit"};
  app.require_subcommand(1);

  PartitionOptions partition;
  auto* partition_cmd = app.add_subcommand("partition", "Twisted partition functions with Fock oracle check");
  partition_cmd->add_option("--config", partition.config, "Theory config (JSON)")->required();
  partition_cmd->add_option("--beta", partition.betas, "Inverse temperatures")->required()->delimiter(',');
  partition_cmd->add_option("--cutoff", partition.cutoff, "Oracle occupation cutoff (default: tail < 1e-10)")
      ->check(CLI::PositiveNumber);
  partition_cmd->add_option("--output", partition.output, "CSV output path (default stdout)");
  partition_cmd->add_option("--factors", partition.factors, "Write per-mode factors to this CSV path");

  KernelOptions kernel;
  auto* kernel_cmd = app.add_subcommand("kernel", "Sample the twisted pair-correlation kernel");
  kernel_cmd->add_option("--config", kernel.config, "Theory config (JSON)")->required();
  kernel_cmd->add_option("--beta", kernel.beta, "Inverse temperature")->required();
  kernel_cmd->add_option("--grid", kernel.grid, "Grid size M (power of two)")->capture_default_str();
  kernel_cmd->add_option("--output", kernel.output, "CSV output path (default stdout)");
  kernel_cmd->add_flag("--verify", kernel.verify, "Compare closed form, Fourier sum and Fock oracle");
  kernel_cmd->add_flag("--extended", kernel.extended, "Block kernel on the doubled space");
  kernel_cmd->add_option("--mode", kernel.mode, "Mode label (default: first mode)");
  kernel_cmd->add_option("--source", kernel.source, "closed or fourier")->capture_default_str();
  kernel_cmd->add_option("--fourier-cutoff", kernel.fourier_cutoff, "Fourier partial-sum cutoff")
      ->capture_default_str();

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  verify_cmd->add_option("--config", verify.config, "Theory config (JSON)")->required();
  verify_cmd->add_option("--suite", verify.suite, "ccr, tc, symmetry, partition, kernel, realfield or all")
      ->required();
  verify_cmd->add_option("--seed", verify.seed, "Seed for randomized checks")->capture_default_str();

  CircleOptions circle;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Spectrum utilities");
  spectrum_cmd->require_subcommand(1);
  auto* gen_cmd = spectrum_cmd->add_subcommand("gen", "Generate a spectrum config");
  gen_cmd->require_subcommand(1);
  auto* circle_cmd = gen_cmd->add_subcommand("twisted-circle", "Laplacian on a circle with twisted boundary");
  circle_cmd->add_option("--rho", circle.rho, "Boundary twist angle")->required();
  circle_cmd->add_option("--mass", circle.mass, "Mass")->required();
  circle_cmd->add_option("--n-min", circle.n_min, "First mode number")->required();
  circle_cmd->add_option("--n-max", circle.n_max, "Last mode number")->required();
  circle_cmd->add_option("--output", circle.output, "Config output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (*partition_cmd) return cmd_partition(partition, out, err);
    if (*kernel_cmd) return cmd_kernel(kernel, out, err);
    if (*verify_cmd) return cmd_verify(verify, out);
    if (*circle_cmd) return cmd_circle(circle, out);
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kCapacityExceeded;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const AdmissibilityError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const KindError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kAssertionFailed;
  }
  return kInvalidInput;
}

}  // namespace twistkit::cli
