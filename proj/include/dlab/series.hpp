#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dlab/arith.hpp"
#include "dlab/complex.hpp"

namespace dlab {

/// Dense coefficients a_1..a_N, accessed 1-based.
class CoefficientList {
 public:
  CoefficientList() = default;
  explicit CoefficientList(std::size_t n) : values_(n) {}
  explicit CoefficientList(std::vector<Complex> values) : values_(std::move(values)) {}

  static CoefficientList unit(std::size_t n);  ///< e = (1, 0, 0, ...)
  static CoefficientList ones(std::size_t n);

  std::size_t size() const { return values_.size(); }
  Complex& operator[](std::size_t n) { return values_[n - 1]; }
  const Complex& operator[](std::size_t n) const { return values_[n - 1]; }
  std::span<const Complex> values() const { return values_; }

 private:
  std::vector<Complex> values_;
};

struct ExplicitCoefficients {
  /// (n, a_n) sorted by n, n >= 1, no duplicates; every other a_n is zero.
  std::vector<std::pair<std::uint64_t, Complex>> entries;
};

struct PrimePowerCoefficient {
  std::uint64_t p;
  unsigned e;
  Complex value;
};

/// a_{p^e} for listed prime powers; unlisted prime powers (e >= 1) are zero.
struct MultiplicativeRule {
  std::vector<PrimePowerCoefficient> prime_powers;
};

enum class BuiltinKind { kZeta, kMoebius, kDivisor, kCharacter };

struct BuiltinSeries {
  BuiltinKind kind = BuiltinKind::kZeta;
  unsigned k = 2;               ///< divisor_k order
  std::uint64_t modulus = 1;    ///< character modulus
  std::uint64_t index = 0;      ///< character index, 0 = principal
};

/// Where the a_n come from.
class CoefficientSource {
 public:
  using Kind = std::variant<ExplicitCoefficients, MultiplicativeRule, BuiltinSeries>;

  explicit CoefficientSource(ExplicitCoefficients c);
  explicit CoefficientSource(MultiplicativeRule r);
  explicit CoefficientSource(BuiltinSeries b);

  const Kind& kind() const { return kind_; }
  bool is_multiplicative() const;
  bool is_builtin(BuiltinKind k) const;

  Complex coefficient(std::uint64_t n) const;
  /// a_{p^e}; multiplicative sources only.
  Complex prime_power(std::uint64_t p, unsigned e) const;
  /// sum_e a_{p^e} p^{-es}; multiplicative sources only.
  Complex local_factor(std::uint64_t p, Complex s) const;
  /// sum_e |a_{p^e}| p^{-e beta}; throws NumericalError when it diverges.
  double abs_local_factor(std::uint64_t p, double beta) const;
  /// Nonzero (n, a_n) when the support is finite, sorted by n.
  std::optional<std::vector<std::pair<std::uint64_t, Complex>>> finite_support() const;
  /// True when every a_n is real.
  bool real_coefficients() const;

 private:
  Kind kind_;
  std::vector<Complex> character_table_;  // chi(a) for a mod q
};

/// A Dirichlet series: coefficients plus the abscissa of the mean-value
/// half plane (sigma_m) and of absolute convergence (sigma_a).
class SeriesSpec {
 public:
  SeriesSpec(std::string name, CoefficientSource coeffs, double sigma_m, double sigma_a);

  static SeriesSpec zeta();
  static SeriesSpec moebius();
  static SeriesSpec divisor(unsigned k);
  static SeriesSpec dirichlet_character(std::uint64_t modulus, std::uint64_t index);
  /// 1 - 2^{1-s}: zero ladder at 1 + 2 pi i k / log 2.
  static SeriesSpec eta_factor();
  /// Finite Dirichlet polynomial; both abscissas are -infinity.
  static SeriesSpec polynomial(std::string name, std::vector<std::pair<std::uint64_t, Complex>> entries);
  static SeriesSpec multiplicative(std::string name, MultiplicativeRule rule);

  const std::string& name() const { return name_; }
  const CoefficientSource& coeffs() const { return coeffs_; }
  double sigma_m() const { return sigma_m_; }
  double sigma_a() const { return sigma_a_; }

 private:
  std::string name_;
  CoefficientSource coeffs_;
  double sigma_m_;
  double sigma_a_;
};

/// Point of the torus indexed by the first m primes: coords[i] is theta_{p_{i+1}}.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> coords);
  static TorusPoint zero(std::size_t dims) { return TorusPoint(std::vector<double>(dims, 0.0)); }

  std::size_t dims() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

Complex coefficient(const SeriesSpec& spec, std::uint64_t n);

/// a_1..a_N densely; multiplicative sources are built by a prime sieve.
CoefficientList coefficient_list(const SeriesSpec& spec, std::size_t n);

/// sum_{n <= N} a_n n^{-s}, ascending n, compensated.
Complex partial_eval(const SeriesSpec& spec, Complex s, std::size_t n);

/// n^{-s} = exp(-s log n).
Complex power_minus(std::uint64_t n, Complex s);

struct SmoothTerm {
  std::uint64_t n;
  Complex a;
  double phase;              ///< sum_p alpha_p theta_p reduced mod 1
  std::uint64_t largest_prime;
};

/// Nonzero terms a_n with n <= bound and every prime factor <= r, ascending.
/// With theta, phase carries sum alpha_p theta_p; otherwise it is zero.
std::vector<SmoothTerm> smooth_terms(const SeriesSpec& spec, std::uint64_t r, std::uint64_t bound,
                                     const TorusPoint* theta = nullptr);

struct SmoothTruncation {
  Complex value;
  double tail_bound;  ///< certified bound on sum over omitted smooth n > M of |a_n| n^{-sigma}
};

struct SmoothTruncationOptions {
  /// Rankin exponent; defaults to (sigma + sigma_m) / 2.
  std::optional<double> beta;
};

/// f_k(s) = sum over 2^k-smooth n <= M of a_n n^{-s}, with a Rankin tail bound.
SmoothTruncation smooth_truncation_eval(const SeriesSpec& spec, Complex s, unsigned k, std::uint64_t bound,
                                        const SmoothTruncationOptions& opts = {});

/// prod_{p <= 2^k} sum_e a_{p^e} p^{-es}; the M -> infinity limit of f_k for
/// multiplicative sources.
Complex euler_product_eval(const SeriesSpec& spec, Complex s, unsigned k);

/// Smallest power-of-two enumeration cutoff M whose Rankin bound is below
/// tolerance (the largest index for finite support). Errors when that
/// needs M > 1e8.
std::uint64_t smooth_cutoff_for(const SeriesSpec& spec, double sigma, unsigned k, double tolerance,
                                const SmoothTruncationOptions& opts = {});

/// g_k(theta; s) = sum over 2^k-smooth n <= M of a_n n^{-s} e^{-2 pi i sum alpha_p theta_p}.
Complex twisted_eval(const SeriesSpec& spec, const TorusPoint& theta, Complex s, unsigned k,
                     std::uint64_t bound);

/// Kronecker point {t log p / 2 pi} over the first dims primes; twisting by
/// it reproduces the vertical shift s -> s + it.
TorusPoint kronecker_point(double t, std::size_t dims);

struct TailNorm {
  double value;       ///< sum_{n <= N} |a_n|^2 n^{-2 sigma}
  double tail_bound;  ///< bound on the remainder n > N
};

TailNorm tail_norm(const SeriesSpec& spec, double sigma, std::size_t n);

}  // namespace dlab
