#include "dlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dlab/zeta.hpp"

namespace dlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t euler_phi(std::uint64_t q) {
  std::uint64_t phi = q;
  for (const auto& pp : factorize(q)) phi = phi / pp.p * (pp.p - 1);
  return phi;
}

std::vector<Complex> build_character_table(std::uint64_t q, std::uint64_t index) {
  if (q == 0) throw PreconditionError("dirichlet_character: modulus must be >= 1");
  if (q > 1'000'000) throw PreconditionError("dirichlet_character: modulus too large");
  const std::uint64_t phi = euler_phi(q);
  if (index >= phi) throw PreconditionError("dirichlet_character: index must be < phi(q)");
  std::vector<Complex> table(q, Complex(0.0, 0.0));
  if (q == 1) {
    table[0] = 1.0;
    return table;
  }
  // Characters are labelled through a generator of (Z/qZ)^*, so the group must be cyclic.
  std::vector<std::uint64_t> dlog(q, 0);
  for (std::uint64_t g = 1; g < q; ++g) {
    if (std::gcd(g, q) != 1) continue;
    std::fill(dlog.begin(), dlog.end(), std::numeric_limits<std::uint64_t>::max());
    std::uint64_t x = 1;
    std::uint64_t order = 0;
    do {
      dlog[x] = order;
      x = x * g % q;
      ++order;
    } while (x != 1);
    if (order != phi) continue;
    for (std::uint64_t a = 0; a < q; ++a) {
      if (dlog[a] == std::numeric_limits<std::uint64_t>::max()) continue;
      const double angle = kTwoPi * static_cast<double>((index * dlog[a]) % phi) / static_cast<double>(phi);
      table[a] = Complex(std::cos(angle), std::sin(angle));
    }
    return table;
  }
  throw PreconditionError("dirichlet_character: modulus has no primitive root");
}

Complex rule_lookup(const MultiplicativeRule& rule, std::uint64_t p, unsigned e) {
  for (const auto& pp : rule.prime_powers) {
    if (pp.p == p && pp.e == e) return pp.value;
  }
  return {0.0, 0.0};
}

double not_in_class(double x) {
  if (x >= 1.0) throw NumericalError("series not in J at this sigma (divergent local factor)");
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// CoefficientList

CoefficientList CoefficientList::unit(std::size_t n) {
  CoefficientList out(n);
  if (n > 0) out[1] = 1.0;
  return out;
}

CoefficientList CoefficientList::ones(std::size_t n) {
  return CoefficientList(std::vector<Complex>(n, Complex(1.0, 0.0)));
}

// ---------------------------------------------------------------------------
// CoefficientSource

CoefficientSource::CoefficientSource(ExplicitCoefficients c) : kind_(std::move(c)) {
  auto& entries = std::get<ExplicitCoefficients>(kind_).entries;
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first == 0) throw PreconditionError("explicit coefficients are indexed from n = 1");
    if (i > 0 && entries[i].first == entries[i - 1].first) {
      throw PreconditionError("explicit coefficients: duplicate index " + std::to_string(entries[i].first));
    }
    if (!is_finite(entries[i].second)) throw PreconditionError("explicit coefficients: non-finite value");
  }
}

CoefficientSource::CoefficientSource(MultiplicativeRule r) : kind_(std::move(r)) {
  for (const auto& pp : std::get<MultiplicativeRule>(kind_).prime_powers) {
    if (pp.e == 0) throw PreconditionError("multiplicative rule: exponent must be >= 1");
    const auto f = factorize(pp.p);
    if (f.size() != 1 || f[0].e != 1) {
      throw PreconditionError("multiplicative rule: " + std::to_string(pp.p) + " is not prime");
    }
    if (!is_finite(pp.value)) throw PreconditionError("multiplicative rule: non-finite value");
  }
}

CoefficientSource::CoefficientSource(BuiltinSeries b) : kind_(b) {
  if (b.kind == BuiltinKind::kDivisor && (b.k < 1 || b.k > 12)) {
    throw PreconditionError("divisor_k: k must be in [1, 12]");
  }
  if (b.kind == BuiltinKind::kCharacter) character_table_ = build_character_table(b.modulus, b.index);
}

bool CoefficientSource::is_multiplicative() const { return !std::holds_alternative<ExplicitCoefficients>(kind_); }

bool CoefficientSource::is_builtin(BuiltinKind k) const {
  const auto* b = std::get_if<BuiltinSeries>(&kind_);
  return b != nullptr && b->kind == k;
}

Complex CoefficientSource::prime_power(std::uint64_t p, unsigned e) const {
  if (e == 0) return 1.0;
  return std::visit(
      Overloaded{
          [&](const ExplicitCoefficients&) -> Complex {
            throw PreconditionError("prime_power: explicit coefficients are not multiplicative");
          },
          [&](const MultiplicativeRule& r) { return rule_lookup(r, p, e); },
          [&](const BuiltinSeries& b) -> Complex {
            switch (b.kind) {
              case BuiltinKind::kZeta:
                return 1.0;
              case BuiltinKind::kMoebius:
                return e == 1 ? -1.0 : 0.0;
              case BuiltinKind::kDivisor:
                return divisor_k_prime_power(b.k, e);
              case BuiltinKind::kCharacter:
                return std::pow(character_table_[p % b.modulus], static_cast<int>(e));
            }
            return 0.0;
          },
      },
      kind_);
}

Complex CoefficientSource::coefficient(std::uint64_t n) const {
  if (n == 0) throw PreconditionError("coefficient: n must be >= 1");
  if (const auto* ex = std::get_if<ExplicitCoefficients>(&kind_)) {
    auto it = std::lower_bound(ex->entries.begin(), ex->entries.end(), n,
                               [](const auto& entry, std::uint64_t key) { return entry.first < key; });
    return (it != ex->entries.end() && it->first == n) ? it->second : Complex(0.0, 0.0);
  }
  if (const auto* b = std::get_if<BuiltinSeries>(&kind_)) {
    if (b->kind == BuiltinKind::kZeta) {
      if (n > kMaxFactorIndex) throw PreconditionError("n too large");
      return 1.0;
    }
    if (b->kind == BuiltinKind::kCharacter) return character_table_[n % b->modulus];
  }
  Complex a = 1.0;
  for (const auto& pp : factorize(n)) a *= prime_power(pp.p, pp.e);
  return a;
}

Complex CoefficientSource::local_factor(std::uint64_t p, Complex s) const {
  const Complex x = power_minus(p, s);
  return std::visit(
      Overloaded{
          [&](const ExplicitCoefficients&) -> Complex {
            throw PreconditionError("local_factor: explicit coefficients have no Euler product");
          },
          [&](const MultiplicativeRule& r) {
            Complex f = 1.0;
            for (const auto& pp : r.prime_powers) {
              if (pp.p == p) f += pp.value * std::pow(x, static_cast<int>(pp.e));
            }
            return f;
          },
          [&](const BuiltinSeries& b) -> Complex {
            switch (b.kind) {
              case BuiltinKind::kZeta:
                return 1.0 / (1.0 - x);
              case BuiltinKind::kMoebius:
                return 1.0 - x;
              case BuiltinKind::kDivisor:
                return std::pow(1.0 - x, -static_cast<int>(b.k));
              case BuiltinKind::kCharacter:
                return 1.0 / (1.0 - character_table_[p % b.modulus] * x);
            }
            return 0.0;
          },
      },
      kind_);
}

double CoefficientSource::abs_local_factor(std::uint64_t p, double beta) const {
  const double x = std::exp(-beta * std::log(static_cast<double>(p)));
  return std::visit(
      Overloaded{
          [&](const ExplicitCoefficients&) -> double {
            throw PreconditionError("abs_local_factor: explicit coefficients have no Euler product");
          },
          [&](const MultiplicativeRule& r) {
            double f = 1.0;
            for (const auto& pp : r.prime_powers) {
              if (pp.p == p) f += std::abs(pp.value) * std::pow(x, static_cast<int>(pp.e));
            }
            return f;
          },
          [&](const BuiltinSeries& b) -> double {
            switch (b.kind) {
              case BuiltinKind::kZeta:
                return 1.0 / (1.0 - not_in_class(x));
              case BuiltinKind::kMoebius:
                return 1.0 + x;
              case BuiltinKind::kDivisor:
                return std::pow(1.0 - not_in_class(x), -static_cast<double>(b.k));
              case BuiltinKind::kCharacter: {
                const double c = std::abs(character_table_[p % b.modulus]);
                return c == 0.0 ? 1.0 : 1.0 / (1.0 - not_in_class(x));
              }
            }
            return 0.0;
          },
      },
      kind_);
}

std::optional<std::vector<std::pair<std::uint64_t, Complex>>> CoefficientSource::finite_support() const {
  if (const auto* ex = std::get_if<ExplicitCoefficients>(&kind_)) {
    std::vector<std::pair<std::uint64_t, Complex>> out;
    for (const auto& entry : ex->entries) {
      if (entry.second != Complex(0.0, 0.0)) out.push_back(entry);
    }
    return out;
  }
  if (const auto* rule = std::get_if<MultiplicativeRule>(&kind_)) {
    std::vector<std::uint64_t> primes;
    for (const auto& pp : rule->prime_powers) primes.push_back(pp.p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    std::vector<std::pair<std::uint64_t, Complex>> out{{1, Complex(1.0, 0.0)}};
    for (std::uint64_t p : primes) {
      const std::size_t existing = out.size();
      for (std::size_t i = 0; i < existing; ++i) {
        for (const auto& pp : rule->prime_powers) {
          if (pp.p != p || pp.value == Complex(0.0, 0.0)) continue;
          std::uint64_t n = out[i].first;
          for (unsigned j = 0; j < pp.e; ++j) {
            if (n > kMaxFactorIndex / p) throw PreconditionError("multiplicative rule: support index too large");
            n *= p;
          }
          out.emplace_back(n, out[i].second * pp.value);
        }
      }
      if (out.size() > 10'000'000) throw PreconditionError("multiplicative rule: support too large");
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }
  return std::nullopt;
}

bool CoefficientSource::real_coefficients() const {
  return std::visit(Overloaded{
                        [](const ExplicitCoefficients& c) {
                          return std::all_of(c.entries.begin(), c.entries.end(),
                                             [](const auto& e) { return e.second.imag() == 0.0; });
                        },
                        [](const MultiplicativeRule& r) {
                          return std::all_of(r.prime_powers.begin(), r.prime_powers.end(),
                                             [](const auto& pp) { return pp.value.imag() == 0.0; });
                        },
                        [&](const BuiltinSeries& b) {
                          if (b.kind != BuiltinKind::kCharacter) return true;
                          return std::all_of(character_table_.begin(), character_table_.end(),
                                             [](Complex c) { return std::abs(c.imag()) < 1e-12; });
                        },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------
// SeriesSpec

SeriesSpec::SeriesSpec(std::string name, CoefficientSource coeffs, double sigma_m, double sigma_a)
    : name_(std::move(name)), coeffs_(std::move(coeffs)), sigma_m_(sigma_m), sigma_a_(sigma_a) {
  if (std::isnan(sigma_m) || std::isnan(sigma_a) || sigma_m > sigma_a) {
    throw PreconditionError("SeriesSpec: requires sigma_m <= sigma_a");
  }
}

SeriesSpec SeriesSpec::zeta() {
  return SeriesSpec("zeta", CoefficientSource(BuiltinSeries{BuiltinKind::kZeta}), 0.5, 1.0);
}

SeriesSpec SeriesSpec::moebius() {
  return SeriesSpec("moebius", CoefficientSource(BuiltinSeries{BuiltinKind::kMoebius}), 0.5, 1.0);
}

SeriesSpec SeriesSpec::divisor(unsigned k) {
  BuiltinSeries b{BuiltinKind::kDivisor};
  b.k = k;
  return SeriesSpec("divisor_" + std::to_string(k), CoefficientSource(b), 0.5, 1.0);
}

SeriesSpec SeriesSpec::dirichlet_character(std::uint64_t modulus, std::uint64_t index) {
  BuiltinSeries b{BuiltinKind::kCharacter};
  b.modulus = modulus;
  b.index = index;
  return SeriesSpec("dirichlet_character(" + std::to_string(modulus) + "," + std::to_string(index) + ")",
                    CoefficientSource(b), 0.5, 1.0);
}

SeriesSpec SeriesSpec::eta_factor() { return polynomial("eta-factor", {{1, 1.0}, {2, -2.0}}); }

SeriesSpec SeriesSpec::polynomial(std::string name, std::vector<std::pair<std::uint64_t, Complex>> entries) {
  return SeriesSpec(std::move(name), CoefficientSource(ExplicitCoefficients{std::move(entries)}), -kInf, -kInf);
}

SeriesSpec SeriesSpec::multiplicative(std::string name, MultiplicativeRule rule) {
  return SeriesSpec(std::move(name), CoefficientSource(std::move(rule)), -kInf, -kInf);
}

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  for (double c : coords_) {
    if (!(c >= 0.0 && c < 1.0)) throw PreconditionError("TorusPoint: coordinates must lie in [0,1)");
  }
}

// ---------------------------------------------------------------------------
// Evaluation

Complex coefficient(const SeriesSpec& spec, std::uint64_t n) { return spec.coeffs().coefficient(n); }

Complex power_minus(std::uint64_t n, Complex s) {
  if (n == 1) return 1.0;
  const double ln = std::log(static_cast<double>(n));
  const double mag = std::exp(-s.real() * ln);
  const double ph = -s.imag() * ln;
  return {mag * std::cos(ph), mag * std::sin(ph)};
}

CoefficientList coefficient_list(const SeriesSpec& spec, std::size_t n) {
  const auto& src = spec.coeffs();
  CoefficientList out(n);
  if (n == 0) return out;
  if (auto support = src.finite_support()) {
    for (const auto& [m, a] : *support) {
      if (m > n) break;
      out[m] = a;
    }
    return out;
  }
  if (src.is_builtin(BuiltinKind::kZeta)) return CoefficientList::ones(n);
  if (src.is_builtin(BuiltinKind::kCharacter)) {
    for (std::size_t m = 1; m <= n; ++m) out[m] = src.coefficient(m);
    return out;
  }
  // smallest-prime-factor sieve; a_n = a_{n / p^e} a_{p^e}
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (std::size_t i = 2; i <= n; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t j = i; j <= n; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  out[1] = 1.0;
  for (std::size_t m = 2; m <= n; ++m) {
    const std::uint64_t p = spf[m];
    std::size_t rest = m;
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    out[m] = out[rest] * src.prime_power(p, e);
  }
  return out;
}

Complex partial_eval(const SeriesSpec& spec, Complex s, std::size_t n) {
  if (n < 1) throw PreconditionError("partial_eval: N must be >= 1");
  ComplexCompensatedSum acc;
  if (auto support = spec.coeffs().finite_support()) {
    for (const auto& [m, a] : *support) {
      if (m > n) break;
      acc.add(a * power_minus(m, s));
    }
    return require_finite(acc.value(), "partial_eval");
  }
  const auto list = coefficient_list(spec, n);
  for (std::size_t m = 1; m <= n; ++m) {
    if (list[m] != Complex(0.0, 0.0)) acc.add(list[m] * power_minus(m, s));
  }
  return require_finite(acc.value(), "partial_eval");
}

std::vector<SmoothTerm> smooth_terms(const SeriesSpec& spec, std::uint64_t r, std::uint64_t bound,
                                     const TorusPoint* theta) {
  const auto& src = spec.coeffs();
  const auto primes = primes_up_to(r);
  if (theta != nullptr && theta->dims() < primes.size()) {
    throw PreconditionError("twisted_eval: missing theta_p coordinate for p = " +
                            std::to_string(primes[theta->dims()]));
  }
  auto theta_of = [&](std::size_t prime_index) { return theta ? (*theta)[prime_index] : 0.0; };

  std::vector<SmoothTerm> terms;
  if (auto support = src.finite_support()) {
    for (const auto& [n, a] : *support) {
      if (n > bound) break;
      double phase = 0.0;
      std::uint64_t largest = 1;
      bool smooth = true;
      for (const auto& pp : factorize(n)) {
        if (pp.p > r) {
          smooth = false;
          break;
        }
        const auto idx = static_cast<std::size_t>(std::lower_bound(primes.begin(), primes.end(), pp.p) - primes.begin());
        phase = frac(phase + pp.e * theta_of(idx));
        largest = pp.p;
      }
      if (smooth) terms.push_back({n, a, phase, largest});
    }
    return terms;
  }

  terms.push_back({1, src.coefficient(1), 0.0, 1});
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const std::uint64_t p = primes[i];
    const std::size_t existing = terms.size();
    for (std::size_t j = 0; j < existing; ++j) {
      const SmoothTerm base = terms[j];
      std::uint64_t n = base.n;
      for (unsigned e = 1; n <= bound / p; ++e) {
        n *= p;
        const Complex v = src.prime_power(p, e);
        if (v == Complex(0.0, 0.0)) continue;
        terms.push_back({n, base.a * v, frac(base.phase + e * theta_of(i)), p});
      }
    }
  }
  std::sort(terms.begin(), terms.end(), [](const SmoothTerm& a, const SmoothTerm& b) { return a.n < b.n; });
  return terms;
}

namespace {

std::uint64_t smooth_radius(unsigned k) {
  if (k > 24) throw PreconditionError("smooth truncation: k must be <= 24");
  return std::uint64_t{1} << k;
}

void require_mean_value_half_plane(const SeriesSpec& spec, double sigma, const char* op) {
  if (!(sigma > spec.sigma_m())) {
    throw PreconditionError(std::string(op) + ": requires Re s > sigma_m");
  }
}

double rankin_beta(const SeriesSpec& spec, double sigma, const SmoothTruncationOptions& opts) {
  if (opts.beta) {
    if (!(*opts.beta < sigma)) throw PreconditionError("Rankin exponent must be below Re s");
    return *opts.beta;
  }
  return (sigma + spec.sigma_m()) / 2.0;
}

double rankin_product(const SeriesSpec& spec, std::uint64_t r, double beta) {
  double prod = 1.0;
  for (std::uint64_t p : primes_up_to(r)) prod *= spec.coeffs().abs_local_factor(p, beta);
  return prod;
}

}  // namespace

namespace {

/// Rankin: sum_{n > M} |a_n| n^{-sigma} <= M^{beta - sigma} sum_{n > M} |a_n| n^{-beta},
/// and the last sum is the full smooth Euler product minus the enumerated part.
double rankin_tail(const std::vector<SmoothTerm>& head_terms, double sigma, double beta, double full,
                   std::uint64_t bound) {
  CompensatedSum head;
  for (const auto& term : head_terms) head.add(std::abs(term.a) * std::exp(-beta * std::log(static_cast<double>(term.n))));
  const double rest = std::max(0.0, full - head.value()) + 1e-12 * full;
  return std::exp((beta - sigma) * std::log(static_cast<double>(bound))) * rest;
}

}  // namespace

SmoothTruncation smooth_truncation_eval(const SeriesSpec& spec, Complex s, unsigned k, std::uint64_t bound,
                                        const SmoothTruncationOptions& opts) {
  const double sigma = s.real();
  require_mean_value_half_plane(spec, sigma, "smooth_truncation_eval");
  if (bound < 1) throw PreconditionError("smooth_truncation_eval: M must be >= 1");
  const std::uint64_t r = smooth_radius(k);
  const auto terms = smooth_terms(spec, r, bound);

  ComplexCompensatedSum acc;
  for (const auto& term : terms) acc.add(term.a * power_minus(term.n, s));

  double tail = 0.0;
  if (auto support = spec.coeffs().finite_support()) {
    CompensatedSum omitted;
    for (const auto& term : smooth_terms(spec, r, std::numeric_limits<std::uint64_t>::max())) {
      if (term.n > bound) omitted.add(std::abs(term.a) * std::exp(-sigma * std::log(static_cast<double>(term.n))));
    }
    tail = omitted.value();
  } else {
    const double beta = rankin_beta(spec, sigma, opts);
    tail = rankin_tail(terms, sigma, beta, rankin_product(spec, r, beta), bound);
  }
  return {require_finite(acc.value(), "smooth_truncation_eval"), tail};
}

Complex euler_product_eval(const SeriesSpec& spec, Complex s, unsigned k) {
  if (!spec.coeffs().is_multiplicative()) {
    throw PreconditionError("euler_product_eval: requires a multiplicative source");
  }
  require_mean_value_half_plane(spec, s.real(), "euler_product_eval");
  Complex prod = 1.0;
  for (std::uint64_t p : primes_up_to(smooth_radius(k))) prod *= spec.coeffs().local_factor(p, s);
  return require_finite(prod, "euler_product_eval");
}

std::uint64_t smooth_cutoff_for(const SeriesSpec& spec, double sigma, unsigned k, double tolerance,
                                const SmoothTruncationOptions& opts) {
  constexpr double kMaxCutoff = 1e8;
  if (!(tolerance > 0.0)) throw PreconditionError("smooth_cutoff_for: tolerance must be positive");
  require_mean_value_half_plane(spec, sigma, "smooth_cutoff_for");
  if (auto support = spec.coeffs().finite_support()) {
    return support->empty() ? 1 : std::max<std::uint64_t>(1, support->back().first);
  }
  const double beta = rankin_beta(spec, sigma, opts);
  const std::uint64_t r = smooth_radius(k);
  const double full = rankin_product(spec, r, beta);
  // Closed form without the enumerated head: any M beyond it certainly works.
  const double sufficient = std::pow(full / tolerance, 1.0 / (sigma - beta));
  for (std::uint64_t m = 1; static_cast<double>(m) <= kMaxCutoff; m *= 2) {
    if (static_cast<double>(m) >= sufficient) return m;
    if (rankin_tail(smooth_terms(spec, r, m), sigma, beta, full, m) <= tolerance) return m;
  }
  throw NumericalError("smooth cutoff for this tolerance exceeds 1e8");
}

Complex twisted_eval(const SeriesSpec& spec, const TorusPoint& theta, Complex s, unsigned k, std::uint64_t bound) {
  require_mean_value_half_plane(spec, s.real(), "twisted_eval");
  const auto terms = smooth_terms(spec, smooth_radius(k), bound, &theta);
  ComplexCompensatedSum acc;
  for (const auto& term : terms) acc.add(term.a * power_minus(term.n, s) * unit_phase(term.phase));
  return require_finite(acc.value(), "twisted_eval");
}

TorusPoint kronecker_point(double t, std::size_t dims) {
  std::vector<double> coords;
  coords.reserve(dims);
  for (std::uint64_t p : first_primes(dims)) coords.push_back(frac(t * std::log(static_cast<double>(p)) / kTwoPi));
  return TorusPoint(std::move(coords));
}

// ---------------------------------------------------------------------------
// tail_norm

namespace {

double weighted_square_sum(const CoefficientList& list, double sigma, std::size_t from, std::size_t to) {
  CompensatedSum acc;
  for (std::size_t m = from; m <= to; ++m) {
    const double a2 = std::norm(list[m]);
    if (a2 != 0.0) acc.add(a2 * std::exp(-2.0 * sigma * std::log(static_cast<double>(m))));
  }
  return acc.value();
}

}  // namespace

TailNorm tail_norm(const SeriesSpec& spec, double sigma, std::size_t n) {
  if (n < 1) throw PreconditionError("tail_norm: N must be >= 1");
  const auto& src = spec.coeffs();
  if (auto support = src.finite_support()) {
    CompensatedSum head;
    CompensatedSum rest;
    for (const auto& [m, a] : *support) {
      const double term = std::norm(a) * std::exp(-2.0 * sigma * std::log(static_cast<double>(m)));
      (m <= n ? head : rest).add(term);
    }
    return {head.value(), rest.value()};
  }

  const auto* builtin = std::get_if<BuiltinSeries>(&src.kind());
  const double x = static_cast<double>(n);
  if (builtin != nullptr && builtin->kind != BuiltinKind::kDivisor && 2.0 * sigma > 1.0) {
    // |a_n| <= 1: remainder <= integral_N^inf x^{-2 sigma} dx
    const auto list = coefficient_list(spec, n);
    return {weighted_square_sum(list, sigma, 1, n), std::pow(x, 1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0)};
  }
  if (builtin != nullptr && builtin->kind == BuiltinKind::kDivisor && 2.0 * sigma > 1.0) {
    // tau_k(n)^2 <= tau_{k^2}(n), so by Rankin
    // sum_{n > N} tau_k^2 n^{-2 sigma} <= N^{-2(sigma - beta)} zeta(2 beta)^{k^2}, 1/2 < beta < sigma.
    const auto list = coefficient_list(spec, n);
    const double kk = static_cast<double>(builtin->k) * builtin->k;
    double best = kInf;
    for (int i = 1; i < 64; ++i) {
      const double beta = 0.5 + (sigma - 0.5) * i / 64.0;
      const double z = zeta(Complex(2.0 * beta, 0.0)).real();
      best = std::min(best, std::exp(-2.0 * (sigma - beta) * std::log(x) + kk * std::log(z)));
    }
    return {weighted_square_sum(list, sigma, 1, n), best};
  }

  // No analytic bound: require the doubling increments to contract.
  const auto list = coefficient_list(spec, 2 * n);
  const double lower = weighted_square_sum(list, sigma, 1, n / 2);
  const double mid = lower + weighted_square_sum(list, sigma, n / 2 + 1, n);
  const double upper = mid + weighted_square_sum(list, sigma, n + 1, 2 * n);
  const double d1 = mid - lower;
  const double d2 = upper - mid;
  if (!(d2 < 0.9 * d1) && d2 > 0.0) {
    throw NumericalError("tail_norm: partial sums not Cauchy under doubling; diverges at this sigma");
  }
  const double ratio = d1 > 0.0 ? d2 / d1 : 0.0;
  return {mid, ratio < 1.0 ? d2 / (1.0 - ratio) : kInf};
}

}  // namespace dlab
