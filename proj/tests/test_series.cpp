#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dlab/arith.hpp"
#include "dlab/series.hpp"
#include "dlab/zeta.hpp"

using namespace dlab;

namespace {

constexpr double kZeta2 = 1.6449340668482264;
constexpr double kZeta15 = 2.6123753486854883;
constexpr double kZeta4 = 1.0823232337111382;

int moebius_naive(std::uint64_t n) {
  int mu = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

SeriesSpec character_mod4() { return SeriesSpec::dirichlet_character(4, 1); }

}  // namespace

TEST_CASE("coefficient examples") {
  CHECK(coefficient(SeriesSpec::zeta(), 17) == Complex(1.0));
  CHECK(coefficient(SeriesSpec::moebius(), 12) == Complex(0.0));
  CHECK(coefficient(SeriesSpec::moebius(), 30) == Complex(-1.0));
  CHECK(coefficient(SeriesSpec::divisor(2), 6) == Complex(4.0));
  CHECK(coefficient(SeriesSpec::divisor(3), 8) == Complex(10.0));
  for (std::uint64_t n = 1; n <= 300; ++n) CHECK(coefficient(SeriesSpec::moebius(), n).real() == moebius_naive(n));
}

TEST_CASE("character mod 4 is the non-principal one") {
  const auto chi = character_mod4();
  CHECK(std::abs(coefficient(chi, 1) - 1.0) < 1e-15);
  CHECK(std::abs(coefficient(chi, 2)) == 0.0);
  CHECK(std::abs(coefficient(chi, 3) + 1.0) < 1e-15);
  CHECK(std::abs(coefficient(chi, 7) + 1.0) < 1e-15);
  CHECK(std::abs(coefficient(chi, 9) - 1.0) < 1e-15);
  // Catalan's constant
  CHECK(std::abs(euler_product_eval(chi, 2.0, 20) - 0.91596559417721902) < 1e-6);
  CHECK_THROWS_AS(SeriesSpec::dirichlet_character(8, 1), PreconditionError);  // (Z/8)^* is not cyclic
  CHECK_THROWS_AS(SeriesSpec::dirichlet_character(5, 4), PreconditionError);  // index >= phi(5)
}

TEST_CASE("explicit coefficients default to zero and are validated") {
  const auto p = SeriesSpec::polynomial("p", {{1, 1.0}, {4, Complex(0.0, 2.0)}});
  CHECK(coefficient(p, 1) == Complex(1.0));
  CHECK(coefficient(p, 2) == Complex(0.0));
  CHECK(coefficient(p, 4) == Complex(0.0, 2.0));
  CHECK(coefficient(p, 1000) == Complex(0.0));
  CHECK_THROWS_AS(SeriesSpec::polynomial("bad", {{0, 1.0}}), PreconditionError);
  CHECK_THROWS_AS(SeriesSpec::polynomial("bad", {{2, 1.0}, {2, 3.0}}), PreconditionError);
  CHECK_THROWS_AS(SeriesSpec::polynomial("bad", {{2, std::nan("")}}), PreconditionError);
  CHECK_THROWS_AS(coefficient(p, 0), PreconditionError);
}

TEST_CASE("series abscissas") {
  CHECK(SeriesSpec::zeta().sigma_m() == 0.5);
  CHECK(SeriesSpec::zeta().sigma_a() == 1.0);
  CHECK_THROWS_AS(SeriesSpec("bad", CoefficientSource(BuiltinSeries{}), 1.0, 0.5), PreconditionError);
}

TEST_CASE("multiplicative sources are multiplicative on coprime pairs") {
  MultiplicativeRule rule{{{2, 1, Complex(0.5, 0.5)}, {2, 3, 2.0}, {3, 1, -1.0}, {5, 2, Complex(0.0, 1.0)}}};
  const std::vector<SeriesSpec> specs{SeriesSpec::zeta(), SeriesSpec::moebius(), SeriesSpec::divisor(3),
                                      character_mod4(), SeriesSpec::dirichlet_character(7, 2),
                                      SeriesSpec::multiplicative("rule", rule)};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> pick(1, 3000);
  for (const auto& spec : specs) {
    CAPTURE(spec.name());
    CHECK(std::abs(coefficient(spec, 1) - 1.0) < 1e-15);
    for (int i = 0; i < 200; ++i) {
      const auto m = pick(rng);
      const auto n = pick(rng);
      if (std::gcd(m, n) != 1) continue;
      CHECK(std::abs(coefficient(spec, m * n) - coefficient(spec, m) * coefficient(spec, n)) < 1e-12);
    }
    const auto dense = coefficient_list(spec, 2000);
    for (std::uint64_t n = 1; n <= 2000; ++n) CHECK(std::abs(dense[n] - coefficient(spec, n)) < 1e-12);
  }
  const auto r = SeriesSpec::multiplicative("rule", rule);
  CHECK(coefficient(r, 8) == Complex(2.0));
  CHECK(coefficient(r, 4) == Complex(0.0));
  CHECK(std::abs(coefficient(r, 150) - Complex(0.5, 0.5) * -1.0 * Complex(0.0, 1.0)) < 1e-15);
}

TEST_CASE("coefficient of a huge index fails for factorizing sources") {
  CHECK_THROWS_WITH(coefficient(SeriesSpec::moebius(), kMaxFactorIndex + 7), doctest::Contains("n too large"));
}

TEST_CASE("partial_eval") {
  CHECK(partial_eval(SeriesSpec::zeta(), 2.0, 1) == Complex(1.0));
  // sum_{n > N} n^{-2} lies in (1/(N+1), 1/N)
  const double n = 1e6;
  const double head = partial_eval(SeriesSpec::zeta(), 2.0, 1'000'000).real();
  CHECK(kZeta2 - head > 1.0 / (n + 1.0));
  CHECK(kZeta2 - head < 1.0 / n);
  CHECK(std::abs(partial_eval(SeriesSpec::moebius(), 2.0, 1'000'000).real() - 1.0 / kZeta2) < 1e-6);
}

TEST_CASE("smooth truncation: Euler products") {
  const auto z = SeriesSpec::zeta();
  CHECK(std::abs(euler_product_eval(z, 2.0, 1) - 4.0 / 3.0) < 1e-15);

  const auto trunc = smooth_truncation_eval(z, 2.0, 3, 1'000'000);
  double product = 1.0;
  for (double p : {2.0, 3.0, 5.0, 7.0}) product /= 1.0 - 1.0 / (p * p);
  CHECK(std::abs(trunc.value - product) <= trunc.tail_bound);
  CHECK(trunc.tail_bound < 1e-4);
}

TEST_CASE("smooth truncation: doubling M stays inside the tail bound") {
  const auto z = SeriesSpec::zeta();
  const Complex s{0.75, 5.0};
  const auto a = smooth_truncation_eval(z, s, 5, 1'000'000);
  const auto b = smooth_truncation_eval(z, s, 5, 2'000'000);
  CHECK(std::abs(a.value - b.value) <= a.tail_bound);
  CHECK(b.tail_bound <= a.tail_bound);
}

TEST_CASE("smooth truncation: finite support has an exact tail") {
  const auto p = SeriesSpec::polynomial("p", {{1, 1.0}, {6, 1.0}, {49, 2.0}});
  const auto all = smooth_truncation_eval(p, 1.0, 3, 1000);
  CHECK(std::abs(all.value - (1.0 + 1.0 / 6.0 + 2.0 / 49.0)) < 1e-15);
  CHECK(all.tail_bound == 0.0);
  const auto cut = smooth_truncation_eval(p, 1.0, 3, 10);
  CHECK(std::abs(cut.value - (1.0 + 1.0 / 6.0)) < 1e-15);
  CHECK(std::abs(cut.tail_bound - 2.0 / 49.0) < 1e-15);
  const auto small = smooth_truncation_eval(p, 1.0, 2, 1000);  // 4-smooth keeps 6, drops 49
  CHECK(std::abs(small.value - (1.0 + 1.0 / 6.0)) < 1e-15);
}

TEST_CASE("Euler product agrees with the smooth sum within the certified bound") {
  MultiplicativeRule rule{{{2, 1, Complex(0.5, 0.5)}, {2, 2, 0.25}, {3, 1, -1.0}, {7, 1, Complex(0.0, 1.0)}}};
  const std::vector<SeriesSpec> specs{SeriesSpec::zeta(), SeriesSpec::moebius(), SeriesSpec::divisor(2),
                                      character_mod4(), SeriesSpec::multiplicative("rule", rule)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sig(1.1, 2.5);
  std::uniform_real_distribution<double> tt(-50.0, 50.0);
  for (const auto& spec : specs) {
    for (int i = 0; i < 10; ++i) {
      const Complex s{sig(rng), tt(rng)};
      const unsigned k = 1 + static_cast<unsigned>(rng() % 5);
      CAPTURE(spec.name());
      CAPTURE(s);
      const auto direct = smooth_truncation_eval(spec, s, k, 200'000);
      // the bound covers truncation only; allow for rounding in both routes
      CHECK(std::abs(direct.value - euler_product_eval(spec, s, k)) <= direct.tail_bound + 1e-14);
    }
  }
}

TEST_CASE("divergent local factor") {
  // claims sigma_m = -1 for zeta coefficients, so beta drops below 0
  const SeriesSpec fake("fake", CoefficientSource(BuiltinSeries{}), -1.0, 1.0);
  CHECK_THROWS_WITH_AS(smooth_truncation_eval(fake, 0.4, 2, 1000), doctest::Contains("not in J"), NumericalError);
  CHECK_THROWS_AS(smooth_truncation_eval(SeriesSpec::zeta(), 0.4, 2, 1000), PreconditionError);
}

TEST_CASE("smooth cutoff meets its tolerance") {
  const auto z = SeriesSpec::zeta();
  const auto m = smooth_cutoff_for(z, 2.0, 3, 1e-6);
  CHECK((m & (m - 1)) == 0);
  CHECK(smooth_truncation_eval(z, 2.0, 3, m).tail_bound <= 1e-6);
  CHECK_THROWS_AS(smooth_cutoff_for(z, 0.51, 8, 1e-12), NumericalError);
}

TEST_CASE("twisted_eval examples") {
  const auto z = SeriesSpec::zeta();
  const Complex s{1.5, 0.0};
  CHECK(std::abs(twisted_eval(z, TorusPoint::zero(6), s, 4, 50'000) - smooth_truncation_eval(z, s, 4, 50'000).value) <
        1e-14);

  const double t = 3.7;
  const auto theta = kronecker_point(t, prime_pi(16));
  CHECK(std::abs(twisted_eval(z, theta, s, 4, 50'000) - smooth_truncation_eval(z, s + Complex(0, t), 4, 50'000).value) <
        1e-9);

  // theta_2 = 1/2: sum_m (-1)^m 4^{-m} = 4/5
  CHECK(std::abs(twisted_eval(z, TorusPoint({0.5}), 2.0, 1, 1ULL << 40) - 0.8) < 1e-12);

  CHECK_THROWS_WITH_AS(twisted_eval(z, TorusPoint({0.5}), 2.0, 2, 100), doctest::Contains("theta_p"),
                       PreconditionError);
}

TEST_CASE("twist identity on random triples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> tt(-100.0, 100.0);
  std::uniform_real_distribution<double> sig(0.6, 3.0);
  const std::vector<SeriesSpec> specs{SeriesSpec::zeta(), SeriesSpec::moebius(), character_mod4()};
  for (int i = 0; i < 60; ++i) {
    const auto& spec = specs[i % specs.size()];
    const double t = tt(rng);
    const Complex s{sig(rng), tt(rng)};
    const unsigned k = 1 + static_cast<unsigned>(rng() % 8);
    const auto theta = kronecker_point(t, prime_pi(std::uint64_t{1} << k));
    CAPTURE(t);
    CAPTURE(s);
    CAPTURE(k);
    const auto twisted = twisted_eval(spec, theta, s, k, 20'000);
    const auto shifted = smooth_truncation_eval(spec, s + Complex(0.0, t), k, 20'000).value;
    CHECK(std::abs(twisted - shifted) < 1e-9);
  }
}

TEST_CASE("kronecker point coordinates") {
  const auto x = kronecker_point(10.0, 3);
  const double expect[] = {10.0 * std::log(2.0), 10.0 * std::log(3.0), 10.0 * std::log(5.0)};
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(frac(expect[i] / kTwoPi)).epsilon(1e-14));
  CHECK(kronecker_point(-1.0, 2)[0] >= 0.0);
}

TEST_CASE("orthogonality of new smooth blocks under a random torus average") {
  // mean over theta of |g_k - g_{k-1}|^2 = sum over the new block of |a_n|^2 n^{-2 sigma}
  const auto z = SeriesSpec::zeta();
  const unsigned k = 3;
  const std::uint64_t m = 2000;
  const double sigma = 1.0;
  double exact = 0.0;
  for (const auto& term : smooth_terms(z, 8, m)) {
    if (term.largest_prime > 4) exact += std::norm(term.a) / (static_cast<double>(term.n) * term.n);
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t samples = 4000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const TorusPoint theta({u(rng), u(rng), u(rng), u(rng)});
    const double v = std::norm(twisted_eval(z, theta, sigma, k, m) - twisted_eval(z, theta, sigma, k - 1, m));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("tail_norm brackets the full mean-square sum") {
  const auto a = tail_norm(SeriesSpec::zeta(), 1.0, 100'000);
  CHECK(a.value <= kZeta2);
  CHECK(kZeta2 <= a.value + a.tail_bound);
  CHECK(a.tail_bound < 2e-5);

  const auto b = tail_norm(SeriesSpec::zeta(), 0.75, 100'000);
  CHECK(b.value <= kZeta15);
  CHECK(kZeta15 <= b.value + b.tail_bound);

  const auto c = tail_norm(SeriesSpec::moebius(), 1.0, 100'000);
  CHECK(c.value <= kZeta2 / kZeta4);
  CHECK(kZeta2 / kZeta4 <= c.value + c.tail_bound);
  CHECK(kZeta2 / kZeta4 == doctest::Approx(1.519817754635066).epsilon(1e-14));

  const auto d = tail_norm(SeriesSpec::divisor(2), 1.0, 100'000);
  const double ramanujan = std::pow(kZeta2, 4) / kZeta4;
  CHECK(d.value <= ramanujan);
  CHECK(ramanujan <= d.value + d.tail_bound);

  const auto p = tail_norm(SeriesSpec::eta_factor(), 0.5, 10);
  CHECK(p.value == doctest::Approx(3.0));
  CHECK(p.tail_bound == 0.0);

  CHECK_THROWS_AS(tail_norm(SeriesSpec::zeta(), 0.5, 1000), NumericalError);
}

TEST_CASE("divisor functions obey a fixed power bound") {
  constexpr double c = 48.0;  // max tau_m(n) / n^0.9 over n <= 1e5, m <= 6 is 47.51 (m = 6, n = 10080)
  for (unsigned m = 1; m <= 6; ++m) {
    const auto tau = coefficient_list(SeriesSpec::divisor(m), 100'000);
    double worst = 0.0;
    for (std::size_t n = 1; n <= tau.size(); ++n) worst = std::max(worst, tau[n].real() / std::pow(n, 0.9));
    CAPTURE(m);
    CHECK(worst <= c);
  }
}
