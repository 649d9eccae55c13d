#include <doctest.h>

#include <cmath>

#include "dlab/series.hpp"
#include "dlab/zeta.hpp"

using namespace dlab;

namespace {

// Reference values from 30-digit mpmath runs.
struct Reference {
  Complex s;
  Complex value;
};

const Reference kReference[] = {
    {{2.0, 0.0}, {1.6449340668482264, 0.0}},
    {{1.5, 0.0}, {2.6123753486854883, 0.0}},
    {{3.0, 0.0}, {1.2020569031595943, 0.0}},
    {{0.75, 30.0}, {0.20089929565569284, -0.53664728987990206}},
    {{3.0, 100.0}, {1.0957985734149973, -0.028464249779226951}},
    {{0.6, 1000.0}, {0.62886128115380816, 0.59846078652818731}},
};

double rel_err(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

/// Independent route: alternating eta series accelerated by Borwein's
/// algorithm 2 (n = 60 terms), zeta = eta / (1 - 2^{1-s}).
Complex zeta_borwein(Complex s) {
  constexpr int n = 60;
  // d_k = n sum_{i <= k} (n + i - 1)! 4^i / ((n - i)! (2i)!)
  std::vector<double> d(n + 1);
  double term = 1.0;
  double acc = 1.0;
  d[0] = acc;
  for (int i = 1; i <= n; ++i) {
    term *= 4.0 * (n + i - 1) * (n - i + 1) / ((2.0 * i - 1.0) * (2.0 * i));
    acc += term;
    d[i] = acc;
  }
  Complex sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    sum += sign * (d[k] - d[n]) * std::exp(-s * std::log(static_cast<double>(k + 1)));
  }
  const Complex eta = -sum / d[n];
  return eta / (1.0 - std::exp((1.0 - s) * std::log(2.0)));
}

}  // namespace

TEST_CASE("zeta matches frozen reference values to 1e-10") {
  for (const auto& ref : kReference) {
    CAPTURE(ref.s);
    CHECK(rel_err(zeta(ref.s), ref.value) < 1e-10);
  }
}

TEST_CASE("zeta agrees with an accelerated alternating series at small height") {
  for (Complex s : {Complex(0.75, 3.0), Complex(1.5, 10.0), Complex(0.55, 7.5), Complex(2.5, -4.0)}) {
    CAPTURE(s);
    CHECK(rel_err(zeta(s), zeta_borwein(s)) < 1e-10);
  }
}

TEST_CASE("zeta at a critical-line zero is tiny") {
  CHECK(std::abs(zeta({0.5, 14.134725141734694})) < 1e-9);
}

TEST_CASE("zeta: conjugate symmetry and status") {
  const Complex s{0.8, 123.4};
  CHECK(std::abs(zeta(std::conj(s)) - std::conj(zeta(s))) < 1e-12);
  CHECK(zeta_evaluate(s).status == ZetaStatus::kValidated);
  CHECK(zeta_evaluate({0.25, 5.0}).status == ZetaStatus::kAccuracyNotGuaranteed);
  CHECK(zeta_evaluate({5.0, 0.0}).status == ZetaStatus::kAccuracyNotGuaranteed);
  CHECK(zeta_evaluate({0.75, 2e4}).status == ZetaStatus::kAccuracyNotGuaranteed);
  // still accurate just outside the validated strip
  CHECK(rel_err(zeta({0.25, 5.0}), {0.66883863246809319, 0.26008665492521415}) < 1e-9);
}

TEST_CASE("zeta truncation point") {
  CHECK(zeta_truncation({2.0, 0.0}) == 32);
  CHECK(zeta_truncation({0.5, 31.2}) == 32);
  CHECK(zeta_truncation({0.5, -1000.5}) == 1001);
}

TEST_CASE("zeta at 0.75+30i is stable under a longer direct head") {
  // |zeta| via partial sum to N plus Euler-Maclaurin remainder, doubled N
  const Complex s{0.75, 30.0};
  const auto z = zeta(s);
  auto em = [&](std::size_t n) {
    Complex head = partial_eval(SeriesSpec::zeta(), s, n - 1);
    const double x = static_cast<double>(n);
    const Complex xs = std::exp(-s * std::log(x));
    // x^{1-s}/(s-1) + x^{-s}/2 + s x^{-s-1}/12 - s(s+1)(s+2) x^{-s-3}/720
    return head + xs * x / (s - 1.0) + xs / 2.0 + s * xs / x / 12.0 - s * (s + 1.0) * (s + 2.0) * xs / (x * x * x) / 720.0;
  };
  CHECK(std::abs(std::abs(em(2000)) - std::abs(z)) < 1e-8);
  CHECK(std::abs(std::abs(em(4000)) - std::abs(z)) < 1e-8);
}

TEST_CASE("regularized zeta removes the pole") {
  CHECK(std::abs(zeta_regularized({1.0, 0.0}) - 1.0) < 1e-12);
  const Complex s{0.9, 0.3};
  CHECK(std::abs(zeta_regularized(s) - (s - 1.0) * zeta(s)) < 1e-12);
}

TEST_CASE("hurwitz zeta") {
  CHECK(rel_err(hurwitz_zeta({1.5, 0.0}, 0.25), {10.213055360466601, 0.0}) < 1e-10);
  CHECK(rel_err(hurwitz_zeta({0.8, 20.0}, 0.3), {1.3183051272366251, -0.70367861515870168}) < 1e-10);
  CHECK(std::abs(hurwitz_zeta({0.7, 11.0}, 1.0) - zeta({0.7, 11.0})) < 1e-11);
  CHECK_THROWS_AS(hurwitz_zeta({1.5, 0.0}, 0.0), PreconditionError);
  CHECK_THROWS_AS(hurwitz_zeta({1.5, 0.0}, 1.5), PreconditionError);
}

TEST_CASE("zeta domain errors") {
  CHECK_THROWS_AS(zeta({1.0, 0.0}), PreconditionError);
  CHECK_THROWS_WITH(zeta({1.0, 0.0}), doctest::Contains("pole"));
  CHECK_THROWS_AS(zeta({0.0, 3.0}), PreconditionError);
  CHECK_THROWS_AS(zeta({-1.0, 0.0}), PreconditionError);
}
