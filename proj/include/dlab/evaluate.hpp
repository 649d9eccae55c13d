#pragma once

#include "dlab/complex.hpp"
#include "dlab/series.hpp"

namespace dlab {

/// Analytic value of the series at s, beyond its abscissa of convergence
/// where a closed form exists:
///   zeta -> zeta(s), moebius -> 1/zeta(s), divisor_k -> zeta(s)^k,
///   character chi mod q -> q^{-s} sum_a chi(a) zeta(s, a/q),
///   finite support -> the polynomial itself.
/// Other sources are summed directly and require Re s > sigma_a.
Evaluator make_evaluator(const SeriesSpec& spec);

/// Order of the pole at s = 1 (zeta: 1, divisor_k: k, principal character: 1).
unsigned pole_order_at_one(const SeriesSpec& spec);

/// make_evaluator times (s - 1)^order: entire near s = 1, so winding counts
/// see zeros only.
Evaluator make_zero_evaluator(const SeriesSpec& spec);

}  // namespace dlab
