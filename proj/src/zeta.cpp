#include "dlab/zeta.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace dlab {
namespace {

// B_{2j} / (2j)! for j = 1..5
constexpr std::array<double, 5> kBernoulliOverFactorial = {
    (1.0 / 6.0) / 2.0,
    (-1.0 / 30.0) / 24.0,
    (1.0 / 42.0) / 720.0,
    (-1.0 / 30.0) / 40320.0,
    (5.0 / 66.0) / 3628800.0,
};

constexpr std::size_t kLogTableSize = 1 << 17;

const std::vector<double>& log_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogTableSize);
    for (std::size_t n = 1; n < kLogTableSize; ++n) t[n] = std::log(static_cast<double>(n));
    return t;
  }();
  return table;
}

double log_of(std::size_t n) {
  const auto& t = log_table();
  return n < t.size() ? t[n] : std::log(static_cast<double>(n));
}

/// sum_{n=1}^{count} n^{-s}, ascending, compensated.
Complex head_sum(Complex s, std::size_t count) {
  const double sigma = s.real();
  const double t = s.imag();
  ComplexCompensatedSum acc;
  acc.add(1.0);
  for (std::size_t n = 2; n <= count; ++n) {
    const double ln = log_of(n);
    const double mag = std::exp(-sigma * ln);
    const double ph = -t * ln;
    acc.add({mag * std::cos(ph), mag * std::sin(ph)});
  }
  return acc.value();
}

/// Euler-Maclaurin remainder pieces at x = N + a: returns
/// x^{-s}/2 + sum_j B_2j/(2j)! (s)_{2j-1} x^{-s-2j+1}  (without the x^{1-s}/(s-1) term).
Complex correction(Complex s, double x) {
  const Complex x_pow = std::exp(-s * std::log(x));
  Complex sum = 0.5 * x_pow;
  Complex rising = s;  // s (s+1) ... (s+2j-2)
  double x_inv_pow = 1.0 / x;
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    sum += kBernoulliOverFactorial[j] * rising * x_pow * x_inv_pow;
    const double base = 2.0 * static_cast<double>(j) + 1.0;
    rising *= (s + base) * (s + base + 1.0);
    x_inv_pow /= x * x;
  }
  return sum;
}

void check_domain(Complex s) {
  if (!is_finite(s)) throw PreconditionError("zeta: non-finite argument");
  if (s.real() <= 0.0) throw PreconditionError("zeta: requires Re s > 0");
}

}  // namespace

std::size_t zeta_truncation(Complex s) {
  const double t = std::ceil(std::abs(s.imag()));
  return std::max<std::size_t>(static_cast<std::size_t>(t), 32);
}

ZetaEvaluation zeta_evaluate(Complex s) {
  check_domain(s);
  if (s == Complex(1.0, 0.0)) throw PreconditionError("zeta: pole at s = 1");
  const std::size_t n = zeta_truncation(s);
  const double x = static_cast<double>(n);
  Complex value = head_sum(s, n - 1);
  value += std::exp((1.0 - s) * std::log(x)) / (s - 1.0);
  value += correction(s, x);
  const bool validated = s.real() > 0.5 && s.real() <= 4.0 && std::abs(s.imag()) <= 1e4;
  return {require_finite(value, "zeta"),
          validated ? ZetaStatus::kValidated : ZetaStatus::kAccuracyNotGuaranteed};
}

Complex zeta(Complex s) { return zeta_evaluate(s).value; }

Complex zeta_regularized(Complex s) {
  check_domain(s);
  const std::size_t n = zeta_truncation(s);
  const double x = static_cast<double>(n);
  const Complex sm1 = s - 1.0;
  Complex value = sm1 * (head_sum(s, n - 1) + correction(s, x));
  value += std::exp((1.0 - s) * std::log(x));
  return require_finite(value, "regularized zeta");
}

Complex hurwitz_zeta(Complex s, double a) {
  check_domain(s);
  if (!(a > 0.0 && a <= 1.0)) throw PreconditionError("hurwitz_zeta: requires 0 < a <= 1");
  if (s == Complex(1.0, 0.0)) throw PreconditionError("hurwitz_zeta: pole at s = 1");
  const std::size_t n = zeta_truncation(s);
  ComplexCompensatedSum acc;
  for (std::size_t k = 0; k < n; ++k) {
    acc.add(std::exp(-s * std::log(static_cast<double>(k) + a)));
  }
  const double x = static_cast<double>(n) + a;
  Complex value = acc.value();
  value += std::exp((1.0 - s) * std::log(x)) / (s - 1.0);
  value += correction(s, x);
  return require_finite(value, "hurwitz zeta");
}

}  // namespace dlab
