#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "dlab/error.hpp"

namespace dlab {

using Complex = std::complex<double>;

/// A function s -> f(s). Evaluators handed to the parallel routines must be
/// safe to call concurrently.
using Evaluator = std::function<Complex(Complex)>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline Complex require_finite(Complex z, const char* what) {
  if (!is_finite(z)) throw NumericalError(std::string("non-finite value in ") + what);
  return z;
}

/// Fractional part in [0,1).
inline double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

/// e^{-2 pi i x}, reducing x mod 1 first.
inline Complex unit_phase(double x) {
  const double a = -kTwoPi * frac(x);
  return {std::cos(a), std::sin(a)};
}

/// Neumaier-compensated running sum. Order of add() calls fixes the result.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace dlab
