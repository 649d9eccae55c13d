#include "dlab/convolution.hpp"

#include <string>

namespace dlab {
namespace {

CoefficientList resized(const CoefficientList& a, std::size_t n) {
  CoefficientList out(n);
  for (std::size_t i = 1; i <= std::min(n, a.size()); ++i) out[i] = a[i];
  return out;
}

CoefficientList normalized(const CoefficientList& a, const char* which) {
  if (a.size() == 0 || a[1] == Complex(0.0, 0.0)) {
    throw PreconditionError(std::string("mollifier_coefficients: ") + which + "_1 must be nonzero");
  }
  const Complex lead = a[1];
  CoefficientList out(a.size());
  for (std::size_t i = 1; i <= a.size(); ++i) out[i] = a[i] / lead;
  out[1] = 1.0;
  return out;
}

}  // namespace

CoefficientList dirichlet_convolve(const CoefficientList& a, const CoefficientList& b) {
  if (a.size() != b.size()) throw PreconditionError("dirichlet_convolve: length mismatch");
  const std::size_t n = a.size();
  CoefficientList c(n);
  for (std::size_t d = 1; d <= n; ++d) {
    if (a[d] == Complex(0.0, 0.0)) continue;
    for (std::size_t e = 1; d * e <= n; ++e) c[d * e] += a[d] * b[e];
  }
  return c;
}

CoefficientList convolution_power(const CoefficientList& a, unsigned m, std::size_t n) {
  if (m < 1) throw PreconditionError("convolution_power: m must be >= 1");
  const CoefficientList base = resized(a, n);
  CoefficientList out = base;
  for (unsigned i = 1; i < m; ++i) out = dirichlet_convolve(out, base);
  return out;
}

CoefficientList inverse_coefficients(const CoefficientList& a) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  if (a[1] == Complex(0.0, 0.0)) throw PreconditionError("no Dirichlet inverse (a_1 = 0)");
  const Complex inv_lead = 1.0 / a[1];
  // acc[m] collects sum_{d | m, d > 1} a_d b_{m/d}; b_m is final once m is reached.
  CoefficientList acc(n);
  CoefficientList b(n);
  for (std::size_t m = 1; m <= n; ++m) {
    b[m] = ((m == 1 ? Complex(1.0, 0.0) : Complex(0.0, 0.0)) - acc[m]) * inv_lead;
    if (b[m] == Complex(0.0, 0.0)) continue;
    for (std::size_t d = 2; d * m <= n; ++d) acc[d * m] += a[d] * b[m];
  }
  return b;
}

CoefficientList inverse_coefficients(const SeriesSpec& spec, std::size_t n) {
  return inverse_coefficients(coefficient_list(spec, n));
}

CoefficientList mollifier_coefficients(const CoefficientList& a, const CoefficientList& b, std::size_t x,
                                       std::size_t n) {
  if (!(x >= 1 && x < n)) throw PreconditionError("mollifier_coefficients: requires 1 <= X < N");
  if (a.size() < n || b.size() < std::min(x, n)) {
    throw PreconditionError("mollifier_coefficients: coefficient lists shorter than N");
  }
  const CoefficientList an = normalized(resized(a, n), "a");
  const CoefficientList bn = normalized(resized(b, std::min(x, b.size())), "b");

  CoefficientList d(n);
  std::vector<double> scale(n + 1, 0.0);
  for (std::size_t k = 1; k <= x; ++k) {
    if (bn[k] == Complex(0.0, 0.0)) continue;
    for (std::size_t j = 1; k * j <= n; ++j) {
      d[k * j] += bn[k] * an[j];
      scale[k * j] += std::abs(bn[k]) * std::abs(an[j]);
    }
  }
  for (std::size_t m = 2; m <= x; ++m) {
    if (std::abs(d[m]) > 1e-10 * std::max(1.0, scale[m])) {
      throw PreconditionError("b is not the Dirichlet inverse of a up to X (d_" + std::to_string(m) + " != 0)");
    }
    d[m] = 0.0;
  }
  d[1] = 1.0;
  return d;
}

}  // namespace dlab
