#pragma once

#include <optional>
#include <vector>

#include "dlab/quadrature.hpp"
#include "dlab/series.hpp"

namespace dlab {

struct MomentReport {
  double sigma = 0.0;
  unsigned k = 1;  ///< integrand is |f|^{2k}
  double T = 0.0;
  double step = 0.0;
  TimeWindow window = TimeWindow::kHalf;
  QuadratureRule rule = QuadratureRule::kSimpson;
  double estimate = 0.0;
  std::optional<double> target;
  std::optional<double> rel_error;
};

/// (1/|W|) integral over the window W of |f(sigma + it)|^{2k} dt.
/// When target is given, the report carries rel_error = |estimate - target| / target.
MomentReport estimate_moment(const SeriesSpec& spec, double sigma, unsigned k, double T, const QuadratureConfig& cfg,
                             const Evaluator& evaluator, std::optional<double> target = std::nullopt);

/// sum |a_n|^2 n^{-2 sigma}: the T -> infinity mean of |sum a_n n^{-sigma-it}|^2.
double polynomial_mean_exact(const CoefficientList& coeffs, double sigma);
double polynomial_mean_exact(const SeriesSpec& spec, double sigma);

/// Exact T -> infinity mean of |P(sigma + it)|^{2k} for a Dirichlet
/// polynomial P: the k = 1 mean of P^k, whose coefficients are the k-fold
/// convolution of those of P.
double polynomial_moment_exact(const SeriesSpec& spec, double sigma, unsigned k);

struct LindelofTarget {
  double partial_sum;  ///< sum_{n <= N} tau_k(n)^2 n^{-2 sigma}
  double tail_bound;   ///< certified bound on the n > N remainder
  double euler_value;  ///< the full sum through its Euler product
};

/// sum tau_k(n)^2 n^{-2 sigma} for 1 <= k <= 6, 2 sigma > 1. The direct sum
/// and its Euler product are independent routes to the same number.
/// Throws NumericalError("increase N") if tail_bound > rel_tolerance * partial_sum.
LindelofTarget lindelof_target(unsigned k, double sigma, std::size_t n, double rel_tolerance = 0.05);

/// h_k(theta, sigma): integral over |z| <= r_disc of
/// |g_k(theta; z + sigma) - g_{k-1}(theta; z + sigma)|, with the smooth sums
/// enumerated up to bound.
double hk_disc_distance(const SeriesSpec& spec, const TorusPoint& theta, double sigma, unsigned k, double r_disc,
                        std::size_t grid = kDefaultDiscGrid, std::uint64_t bound = 100000);

/// Closed-form majorant pi r^2 (1 + sum_k 2^{-(k-1) delta/10})^{1/2} C(alpha - 3 delta/4)^{1/2}
/// for the theta-average of sum_k h_k, with alpha = sigma - r_disc and
/// delta = alpha - sigma_m. C is taken from tail_norm (value + tail bound).
double hk_sum_bound(const SeriesSpec& spec, double sigma, double r_disc, std::size_t n = 1'000'000);

struct OrderScan {
  std::vector<std::pair<double, double>> maxima;  ///< (T, max_{|t| <= T} |f(sigma + it)|)
  double slope;                                   ///< least-squares slope of log max vs log T
};

/// Running maxima of |f(sigma + it)| on a t-grid of the given step. For
/// real coefficients only t >= 0 is scanned (|f(sigma - it)| = |f(sigma + it)|).
OrderScan order_scan(const SeriesSpec& spec, double sigma, std::vector<double> T_list, const Evaluator& evaluator,
                     double step = 0.01);

}  // namespace dlab
