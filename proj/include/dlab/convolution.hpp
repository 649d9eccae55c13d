#pragma once

#include "dlab/series.hpp"

namespace dlab {

/// c_n = sum_{d | n} a_d b_{n/d} for n <= N, by the divisor-sieve double loop.
CoefficientList dirichlet_convolve(const CoefficientList& a, const CoefficientList& b);

/// m-fold Dirichlet self-convolution truncated at N (a is truncated or
/// zero-padded to N first).
CoefficientList convolution_power(const CoefficientList& a, unsigned m, std::size_t n);

/// Dirichlet inverse of a_1..a_N: b_1 = 1/a_1, b_n = -a_1^{-1} sum_{d | n, d > 1} a_d b_{n/d}.
CoefficientList inverse_coefficients(const CoefficientList& a);
CoefficientList inverse_coefficients(const SeriesSpec& spec, std::size_t n);

/// d_n = sum_{d | n, d <= X} b_d a_{n/d}, the coefficients of f(s) M_X(s).
/// Both lists are normalized by their first coefficient. Checks that
/// d_n vanishes for 1 < n <= X and stores those entries as exact zeros.
CoefficientList mollifier_coefficients(const CoefficientList& a, const CoefficientList& b, std::size_t x,
                                       std::size_t n);

}  // namespace dlab
