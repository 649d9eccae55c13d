#include "dlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "dlab/convolution.hpp"
#include "dlab/parallel.hpp"
#include "dlab/zeta.hpp"

namespace dlab {
namespace {

Complex checked_eval(const Evaluator& f, Complex s) {
  Complex v;
  try {
    v = f(s);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "evaluator failed at t=" << s.imag() << ": " << e.what();
    throw NumericalError(msg.str());
  }
  if (!is_finite(v)) {
    std::ostringstream msg;
    msg << "evaluator returned a non-finite value at t=" << s.imag();
    throw NumericalError(msg.str());
  }
  return v;
}

double log_of(std::uint64_t n) { return std::log(static_cast<double>(n)); }

}  // namespace

MomentReport estimate_moment(const SeriesSpec& spec, double sigma, unsigned k, double T, const QuadratureConfig& cfg,
                             const Evaluator& evaluator, std::optional<double> target) {
  cfg.validate();
  if (!(sigma > spec.sigma_m())) throw PreconditionError("estimate_moment: requires sigma > sigma_m");
  if (!(T > 0.0) || !std::isfinite(T)) throw PreconditionError("estimate_moment: requires T > 0");
  if (k < 1) throw PreconditionError("estimate_moment: requires k >= 1");
  if (spec.coeffs().is_builtin(BuiltinKind::kZeta) && cfg.step > 0.05) {
    throw PreconditionError("estimate_moment: step must be <= 0.05 for zeta integrands");
  }

  auto integrand = [&](double t) {
    const double m2 = std::norm(checked_eval(evaluator, Complex(sigma, t)));
    return std::pow(m2, static_cast<double>(k));
  };
  const double lo = cfg.window == TimeWindow::kHalf ? 0.0 : -T;
  const double integral = integrate(integrand, lo, T, cfg);

  MomentReport report;
  report.sigma = sigma;
  report.k = k;
  report.T = T;
  report.step = cfg.step;
  report.window = cfg.window;
  report.rule = cfg.rule;
  report.estimate = std::max(0.0, integral / (T - lo));
  if (target) {
    report.target = *target;
    report.rel_error = std::abs(report.estimate - *target) / *target;
  }
  return report;
}

double polynomial_mean_exact(const CoefficientList& coeffs, double sigma) {
  CompensatedSum acc;
  for (std::size_t n = 1; n <= coeffs.size(); ++n) {
    const double a2 = std::norm(coeffs[n]);
    if (a2 != 0.0) acc.add(a2 * std::exp(-2.0 * sigma * log_of(n)));
  }
  return acc.value();
}

double polynomial_mean_exact(const SeriesSpec& spec, double sigma) {
  auto support = spec.coeffs().finite_support();
  if (!support) throw PreconditionError("polynomial_mean_exact: requires finitely many nonzero coefficients");
  CompensatedSum acc;
  for (const auto& [n, a] : *support) acc.add(std::norm(a) * std::exp(-2.0 * sigma * log_of(n)));
  return acc.value();
}

double polynomial_moment_exact(const SeriesSpec& spec, double sigma, unsigned k) {
  auto support = spec.coeffs().finite_support();
  if (!support) throw PreconditionError("polynomial_moment_exact: requires finitely many nonzero coefficients");
  if (k < 1) throw PreconditionError("polynomial_moment_exact: requires k >= 1");
  std::map<std::uint64_t, Complex> power{{1, 1.0}};
  for (unsigned i = 0; i < k; ++i) {
    std::map<std::uint64_t, Complex> next;
    for (const auto& [m, c] : power) {
      for (const auto& [n, a] : *support) {
        if (m > kMaxFactorIndex / n) throw PreconditionError("polynomial_moment_exact: index overflow");
        next[m * n] += c * a;
      }
    }
    power = std::move(next);
  }
  CompensatedSum acc;
  for (const auto& [n, c] : power) acc.add(std::norm(c) * std::exp(-2.0 * sigma * log_of(n)));
  return acc.value();
}

namespace {

/// tau_j(n) for n <= N through a smallest-prime-factor sieve.
std::vector<double> divisor_table(unsigned j, std::size_t n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (std::size_t i = 2; i <= n; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t m = i; m <= n; m += i) {
      if (spf[m] == 0) spf[m] = static_cast<std::uint32_t>(i);
    }
  }
  std::vector<double> t(n + 1, 0.0);
  if (n >= 1) t[1] = 1.0;
  for (std::size_t m = 2; m <= n; ++m) {
    std::size_t rest = m;
    unsigned e = 0;
    while (rest % spf[m] == 0) {
      rest /= spf[m];
      ++e;
    }
    t[m] = t[rest] * divisor_k_prime_power(j, e);
  }
  return t;
}

}  // namespace

LindelofTarget lindelof_target(unsigned k, double sigma, std::size_t n, double rel_tolerance) {
  if (k < 1 || k > 6) throw PreconditionError("lindelof_target: requires 1 <= k <= 6");
  if (!(2.0 * sigma > 1.0)) throw PreconditionError("lindelof_target: requires 2 sigma > 1");
  if (n < 2) throw PreconditionError("lindelof_target: requires N >= 2");

  const auto tau = divisor_table(k, n);
  CompensatedSum head;
  for (std::size_t m = 1; m <= n; ++m) head.add(tau[m] * tau[m] * std::exp(-2.0 * sigma * log_of(m)));

  // tau_k^2 <= tau_{k^2} pointwise, so for 1/2 < beta < sigma
  //   sum_{n > N} tau_k^2 n^{-2 sigma} <= N^{-2(sigma - beta)} (zeta(2 beta)^{k^2} - sum_{n <= N} tau_{k^2} n^{-2 beta}).
  const auto big = divisor_table(k * k, n);
  const double kk = static_cast<double>(k * k);
  double bound = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 16; ++i) {
    const double beta = 0.5 + (sigma - 0.5) * i / 16.0;
    const double full = std::exp(kk * std::log(zeta(Complex(2.0 * beta, 0.0)).real()));
    CompensatedSum enumerated;
    for (std::size_t m = 1; m <= n; ++m) enumerated.add(big[m] * std::exp(-2.0 * beta * log_of(m)));
    const double rest = std::max(0.0, full - enumerated.value()) + 1e-11 * full;
    bound = std::min(bound, std::exp(-2.0 * (sigma - beta) * log_of(n)) * rest);
  }

  // Euler product: zeta(2 sigma)^{k^2} prod_p F_p(x) (1 - x)^{k^2}, x = p^{-2 sigma},
  // F_p(x) = sum_e C(e+k-1, k-1)^2 x^e. The correction factors are 1 + O(x^2).
  double log_euler = kk * std::log(zeta(Complex(2.0 * sigma, 0.0)).real());
  for (std::uint64_t p : primes_up_to(1'000'000)) {
    const double x = std::exp(-2.0 * sigma * log_of(p));
    double f = 1.0;
    double xe = 1.0;
    for (unsigned e = 1; e < 400; ++e) {
      xe *= x;
      const double c = divisor_k_prime_power(k, e);
      const double term = c * c * xe;
      f += term;
      if (term < 1e-19 * f) break;
    }
    log_euler += std::log(f) + kk * std::log1p(-x);
  }

  LindelofTarget out{head.value(), bound, std::exp(log_euler)};
  if (out.tail_bound > rel_tolerance * out.partial_sum) {
    throw NumericalError("lindelof_target: tail bound above tolerance; increase N");
  }
  return out;
}

double hk_disc_distance(const SeriesSpec& spec, const TorusPoint& theta, double sigma, unsigned k, double r_disc,
                        std::size_t grid, std::uint64_t bound) {
  if (!(r_disc > 0.0)) throw PreconditionError("hk_disc_distance: r_disc must be > 0");
  if (!(sigma - r_disc > spec.sigma_m())) {
    throw PreconditionError("hk_disc_distance: requires sigma - r_disc > sigma_m");
  }
  if (grid < 16) throw PreconditionError("hk_disc_distance: grid must be >= 16");
  if (k < 1 || k > 24) throw PreconditionError("hk_disc_distance: requires 1 <= k <= 24");

  // g_k - g_{k-1} keeps the n whose largest prime lies in (2^{k-1}, 2^k].
  const std::uint64_t r = std::uint64_t{1} << k;
  const std::uint64_t r_prev = r / 2;
  std::vector<std::pair<double, Complex>> block;  // (log n, a_n n^{-sigma} e^{-2 pi i phase})
  for (const auto& term : smooth_terms(spec, r, bound, &theta)) {
    if (term.largest_prime <= r_prev) continue;
    const double ln = log_of(term.n);
    block.emplace_back(ln, term.a * std::exp(-sigma * ln) * unit_phase(term.phase));
  }
  if (block.empty()) return 0.0;

  const DiscRule rule(Complex(0.0, 0.0), r_disc, grid);
  const auto& nodes = rule.nodes();
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (nodes.size() + kChunk - 1) / kChunk;
  auto partial = parallel::map_indices<double>(chunks, [&](std::size_t c) {
    CompensatedSum acc;
    for (std::size_t i = c * kChunk; i < std::min(nodes.size(), (c + 1) * kChunk); ++i) {
      const Complex z = nodes[i];
      ComplexCompensatedSum diff;
      for (const auto& [ln, c0] : block) diff.add(c0 * std::exp(-z * ln));
      acc.add(std::abs(diff.value()));
    }
    return acc.value();
  });
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value() * rule.cell_area();
}

double hk_sum_bound(const SeriesSpec& spec, double sigma, double r_disc, std::size_t n) {
  if (!std::isfinite(spec.sigma_m())) throw PreconditionError("hk_sum_bound: requires a finite sigma_m");
  const double alpha = sigma - r_disc;
  const double delta = alpha - spec.sigma_m();
  if (!(delta > 0.0)) throw PreconditionError("hk_sum_bound: requires sigma - r_disc > sigma_m");
  const double geometric = 1.0 / (1.0 - std::pow(2.0, -delta / 10.0));
  const auto c = tail_norm(spec, alpha - 0.75 * delta, n);
  return kPi * r_disc * r_disc * std::sqrt(1.0 + geometric) * std::sqrt(c.value + c.tail_bound);
}

OrderScan order_scan(const SeriesSpec& spec, double sigma, std::vector<double> T_list, const Evaluator& evaluator,
                     double step) {
  if (!(sigma > spec.sigma_m())) throw PreconditionError("order_scan: requires sigma > sigma_m");
  if (T_list.empty()) throw PreconditionError("order_scan: empty T list");
  if (!(step > 0.0)) throw PreconditionError("order_scan: step must be > 0");
  std::sort(T_list.begin(), T_list.end());
  if (!(T_list.front() > 0.0)) throw PreconditionError("order_scan: T values must be > 0");

  const bool symmetric = spec.coeffs().real_coefficients();
  const double t_max = T_list.back();
  const auto count = static_cast<std::size_t>(std::floor(t_max / step + 1e-9)) + 1;
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  // per grid index j >= 0: max(|f(sigma + i j h)|, |f(sigma - i j h)|)
  std::vector<double> modulus(count);
  parallel::for_each_index(chunks, [&](std::size_t c) {
    for (std::size_t j = c * kChunk; j < std::min(count, (c + 1) * kChunk); ++j) {
      const double t = static_cast<double>(j) * step;
      double m = std::abs(checked_eval(evaluator, Complex(sigma, t)));
      if (!symmetric && j > 0) m = std::max(m, std::abs(checked_eval(evaluator, Complex(sigma, -t))));
      modulus[j] = m;
    }
  });

  OrderScan out;
  double running = 0.0;
  std::size_t j = 0;
  for (double T : T_list) {
    for (; j < count && static_cast<double>(j) * step <= T + 1e-9 * step; ++j) running = std::max(running, modulus[j]);
    out.maxima.emplace_back(T, running);
  }

  if (out.maxima.size() < 2) {
    out.slope = 0.0;
  } else {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [T, m] : out.maxima) {
      const double x = std::log(T);
      const double y = std::log(m);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double cnt = static_cast<double>(out.maxima.size());
    const double denom = cnt * sxx - sx * sx;
    out.slope = denom > 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
  }
  return out;
}

}  // namespace dlab
