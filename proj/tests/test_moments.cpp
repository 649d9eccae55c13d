#include <doctest.h>

#include <cmath>
#include <random>

#include "dlab/evaluate.hpp"
#include "dlab/moments.hpp"
#include "dlab/parallel.hpp"
#include "dlab/zeta.hpp"

using namespace dlab;

namespace {

constexpr double kZeta2 = 1.6449340668482264;
constexpr double kZeta4Of2OverZeta4 = 6.7645202106946137;  // zeta(2)^4 / zeta(4)

QuadratureConfig config(double step) {
  QuadratureConfig cfg;
  cfg.step = step;
  return cfg;
}

SeriesSpec one_plus_half() { return SeriesSpec::polynomial("1+2^-s", {{1, 1.0}, {2, 1.0}}); }

}  // namespace

TEST_CASE("constant series has moment 1") {
  const auto one = SeriesSpec::polynomial("one", {{1, 1.0}});
  for (unsigned k : {1u, 3u}) {
    const auto r = estimate_moment(one, 0.5, k, 100.0, config(0.01), make_evaluator(one), 1.0);
    CHECK(r.estimate == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*r.rel_error < 1e-14);
  }
  CHECK(polynomial_moment_exact(one, 0.5, 4) == 1.0);
}

TEST_CASE("two-term polynomial: exact means and finite-T oscillation") {
  const auto p = one_plus_half();
  CHECK(polynomial_mean_exact(p, 1.0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(polynomial_moment_exact(p, 1.0, 1) == doctest::Approx(1.25).epsilon(1e-15));
  // P^2 = 1 + 2 2^{-s} + 4^{-s}
  CHECK(polynomial_moment_exact(p, 1.0, 2) == doctest::Approx(1.0 + 1.0 + 1.0 / 16.0).epsilon(1e-15));

  // |P(1 + it)|^2 = 5/4 + cos(t log 2): the [0, T] mean is 5/4 + sin(T log 2) / (T log 2)
  const double w = std::log(2.0);
  for (double T : {10.0, 137.0, 1000.0}) {
    const auto r = estimate_moment(p, 1.0, 1, T, config(0.01), make_evaluator(p));
    CAPTURE(T);
    CHECK(r.estimate == doctest::Approx(1.25 + std::sin(T * w) / (T * w)).epsilon(1e-10));
    CHECK(std::abs(r.estimate - 1.25) <= 1.0 / (T * w) + 1e-10);
  }
}

TEST_CASE("symmetric window for a polynomial") {
  const auto p = SeriesSpec::polynomial("p", {{1, 1.0}, {2, Complex(0.0, 1.0)}, {3, -0.5}});
  auto cfg = config(0.01);
  cfg.window = TimeWindow::kSymmetric;
  const auto r = estimate_moment(p, 0.5, 1, 2000.0, cfg, make_evaluator(p), polynomial_mean_exact(p, 0.5));
  CHECK(*r.rel_error < 2e-3);
  CHECK(r.window == TimeWindow::kSymmetric);
}

TEST_CASE("moment estimates do not depend on the worker count") {
  const auto z = SeriesSpec::zeta();
  const auto f = make_evaluator(z);
  std::vector<double> got;
  const auto saved = parallel::thread_count();
  for (std::size_t w : {1u, 3u, 8u}) {
    parallel::set_thread_count(w);
    got.push_back(estimate_moment(z, 1.5, 1, 50.0, config(0.01), f).estimate);
  }
  parallel::set_thread_count(saved);
  CHECK(got[0] == got[1]);
  CHECK(got[0] == got[2]);
}

TEST_CASE("moment preconditions and evaluator failures") {
  const auto z = SeriesSpec::zeta();
  const auto f = make_evaluator(z);
  CHECK_THROWS_AS(estimate_moment(z, 1.5, 1, 10.0, config(0.1), f), PreconditionError);
  CHECK_THROWS_AS(estimate_moment(z, 1.5, 0, 10.0, config(0.01), f), PreconditionError);
  CHECK_THROWS_AS(estimate_moment(z, 1.5, 1, -1.0, config(0.01), f), PreconditionError);
  CHECK_THROWS_AS(estimate_moment(z, 0.5, 1, 10.0, config(0.01), f), PreconditionError);

  const Evaluator flaky = [](Complex s) -> Complex {
    if (s.imag() > 5.0) throw PreconditionError("out of range");
    return 1.0;
  };
  CHECK_THROWS_WITH_AS(estimate_moment(z, 1.5, 1, 10.0, config(0.01), flaky), doctest::Contains("t=5.0"),
                       NumericalError);
  const Evaluator nan = [](Complex) { return Complex(NAN, 0.0); };
  CHECK_THROWS_WITH_AS(estimate_moment(z, 1.5, 1, 10.0, config(0.01), nan), doctest::Contains("non-finite"),
                       NumericalError);
  CHECK_THROWS_AS(polynomial_mean_exact(z, 1.0), PreconditionError);
}

TEST_CASE("lindelof targets") {
  const auto k1 = lindelof_target(1, 1.0, 100'000);
  CHECK(k1.euler_value == doctest::Approx(kZeta2).epsilon(1e-12));
  CHECK(k1.partial_sum <= k1.euler_value);
  CHECK(k1.euler_value <= k1.partial_sum + k1.tail_bound);

  const auto k2 = lindelof_target(2, 1.0, 100'000);
  CHECK(k2.euler_value == doctest::Approx(kZeta4Of2OverZeta4).epsilon(1e-10));
  CHECK(k2.partial_sum <= k2.euler_value);
  CHECK(k2.euler_value <= k2.partial_sum + k2.tail_bound);

  // zeta(2 sigma) at sigma = 0.75
  const auto k1b = lindelof_target(1, 0.75, 100'000);
  CHECK(k1b.euler_value == doctest::Approx(2.6123753486854883).epsilon(1e-12));
  CHECK(k1b.euler_value <= k1b.partial_sum + k1b.tail_bound);

  // tail bounds shrink as N grows
  CHECK(lindelof_target(2, 1.0, 200'000).tail_bound < k2.tail_bound);
}

TEST_CASE("lindelof target errors") {
  CHECK_THROWS_WITH_AS(lindelof_target(6, 0.6, 100), doctest::Contains("increase N"), NumericalError);
  CHECK_THROWS_AS(lindelof_target(0, 1.0, 100), PreconditionError);
  CHECK_THROWS_AS(lindelof_target(7, 1.0, 100), PreconditionError);
  CHECK_THROWS_AS(lindelof_target(1, 0.5, 100), PreconditionError);
  CHECK_THROWS_AS(lindelof_target(1, 1.0, 1), PreconditionError);
}

TEST_CASE("moment targets are ordered in k") {
  // sum tau_k^2 n^{-2 sigma} grows with k since tau_k <= tau_{k+1}
  double prev = 0.0;
  for (unsigned k = 1; k <= 4; ++k) {
    const double v = lindelof_target(k, 1.5, 100'000).euler_value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("h_k disc distances") {
  const auto one = SeriesSpec::polynomial("one", {{1, 1.0}});
  CHECK(hk_disc_distance(one, TorusPoint::zero(10), 0.0, 3, 0.1) == 0.0);

  const auto z = SeriesSpec::zeta();
  const double sigma = 1.6;
  const double r = 0.25;
  const double bound = hk_sum_bound(z, sigma, r);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double average = 0.0;
  constexpr int kSamples = 8;
  for (int i = 0; i < kSamples; ++i) {
    std::vector<double> c(100);
    for (auto& x : c) x = u(rng);
    const TorusPoint theta(c);
    double partial = 0.0;
    for (unsigned k = 1; k <= 8; ++k) {
      const double h = hk_disc_distance(z, theta, sigma, k, r, 32, 20'000);
      CHECK(h >= 0.0);
      partial += h;
    }
    average += partial / kSamples;
  }
  CHECK(average > 0.0);
  CHECK(average <= bound);

  const TorusPoint theta = kronecker_point(3.7, 100);
  const double coarse = hk_disc_distance(z, theta, sigma, 2, r, 64);
  const double fine = hk_disc_distance(z, theta, sigma, 2, r, 128);
  CHECK(std::abs(coarse - fine) < 0.01 * fine);

  CHECK_THROWS_AS(hk_disc_distance(z, theta, 0.6, 2, 0.2), PreconditionError);
  CHECK_THROWS_AS(hk_disc_distance(z, theta, sigma, 2, r, 8), PreconditionError);
  CHECK_THROWS_AS(hk_disc_distance(z, theta, sigma, 0, r), PreconditionError);
  CHECK_THROWS_AS(hk_sum_bound(one, 1.0, 0.1), PreconditionError);
}

TEST_CASE("order scans") {
  const auto z = SeriesSpec::zeta();
  const auto f = make_evaluator(z);
  const auto at2 = order_scan(z, 2.0, {10.0, 50.0, 100.0}, f, 0.05);
  REQUIRE(at2.maxima.size() == 3);
  for (const auto& [T, m] : at2.maxima) CHECK(m <= kZeta2 + 1e-12);
  CHECK(at2.maxima.front().second == doctest::Approx(kZeta2).epsilon(1e-12));
  CHECK(std::abs(at2.slope) < 1e-9);

  const auto one = SeriesSpec::polynomial("one", {{1, 1.0}});
  CHECK(order_scan(one, 0.0, {5.0, 10.0, 20.0}, make_evaluator(one), 0.1).slope == 0.0);

  // input order is irrelevant; maxima are running and nondecreasing
  const auto mid = order_scan(z, 0.75, {800.0, 100.0, 400.0, 200.0}, f, 0.05);
  for (std::size_t i = 1; i < mid.maxima.size(); ++i) {
    CHECK(mid.maxima[i].first > mid.maxima[i - 1].first);
    CHECK(mid.maxima[i].second >= mid.maxima[i - 1].second);
  }
  CHECK(mid.slope < 0.25);

  CHECK_THROWS_AS(order_scan(z, 2.0, {}, f), PreconditionError);
  CHECK_THROWS_AS(order_scan(z, 2.0, {-1.0, 5.0}, f), PreconditionError);
  CHECK_THROWS_AS(order_scan(z, 2.0, {5.0}, f, 0.0), PreconditionError);
}

TEST_CASE("order scan covers negative t for complex coefficients") {
  // |1 + i 2^{-s}| peaks where 2^{-it} = -i, i.e. t log 2 = pi/2 mod 2 pi
  const auto p = SeriesSpec::polynomial("p", {{1, 1.0}, {2, Complex(0.0, 1.0)}});
  const double peak = kPi / 2.0 / std::log(2.0);
  const auto scan = order_scan(p, 0.0, {peak + 0.01}, make_evaluator(p), 1e-3);
  CHECK(scan.maxima[0].second == doctest::Approx(2.0).epsilon(1e-5));
  // the mirrored peak lies at negative t only
  const auto q = SeriesSpec::polynomial("q", {{1, 1.0}, {2, Complex(0.0, -1.0)}});
  CHECK(order_scan(q, 0.0, {peak + 0.01}, make_evaluator(q), 1e-3).maxima[0].second ==
        doctest::Approx(2.0).epsilon(1e-5));
}
