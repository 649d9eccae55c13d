#include "dlab/evaluate.hpp"

#include <cmath>

#include "dlab/zeta.hpp"

namespace dlab {
namespace {

constexpr std::size_t kDirectTerms = 1'000'000;

const BuiltinSeries* builtin_of(const SeriesSpec& spec) { return std::get_if<BuiltinSeries>(&spec.coeffs().kind()); }

}  // namespace

Evaluator make_evaluator(const SeriesSpec& spec) {
  if (auto support = spec.coeffs().finite_support()) {
    return [terms = std::move(*support)](Complex s) {
      ComplexCompensatedSum acc;
      for (const auto& [n, a] : terms) acc.add(a * power_minus(n, s));
      return acc.value();
    };
  }
  if (const auto* b = builtin_of(spec)) {
    switch (b->kind) {
      case BuiltinKind::kZeta:
        return [](Complex s) { return zeta(s); };
      case BuiltinKind::kMoebius:
        return [](Complex s) { return 1.0 / zeta(s); };
      case BuiltinKind::kDivisor:
        return [k = b->k](Complex s) { return std::pow(zeta(s), static_cast<int>(k)); };
      case BuiltinKind::kCharacter: {
        const std::uint64_t q = b->modulus;
        std::vector<std::pair<double, Complex>> residues;
        for (std::uint64_t a = 1; a <= q; ++a) {
          const Complex chi = coefficient(spec, a);
          if (chi != 0.0) residues.emplace_back(static_cast<double>(a) / static_cast<double>(q), chi);
        }
        return [q, residues = std::move(residues)](Complex s) {
          ComplexCompensatedSum acc;
          for (const auto& [x, chi] : residues) acc.add(chi * hurwitz_zeta(s, x));
          return acc.value() * power_minus(q, s);
        };
      }
    }
  }
  const double sigma_a = spec.sigma_a();
  return [spec, sigma_a](Complex s) {
    if (!(s.real() > sigma_a)) throw PreconditionError("direct summation requires Re s > sigma_a");
    return partial_eval(spec, s, kDirectTerms);
  };
}

unsigned pole_order_at_one(const SeriesSpec& spec) {
  const auto* b = builtin_of(spec);
  if (b == nullptr) return 0;
  switch (b->kind) {
    case BuiltinKind::kZeta: return 1;
    case BuiltinKind::kDivisor: return b->k;
    case BuiltinKind::kCharacter: return b->index == 0 ? 1 : 0;
    case BuiltinKind::kMoebius: return 0;
  }
  return 0;
}

Evaluator make_zero_evaluator(const SeriesSpec& spec) {
  const unsigned order = pole_order_at_one(spec);
  if (order == 0) return make_evaluator(spec);
  const auto* b = builtin_of(spec);
  if (b->kind == BuiltinKind::kZeta) return [](Complex s) { return zeta_regularized(s); };
  if (b->kind == BuiltinKind::kDivisor) {
    return [k = b->k](Complex s) { return std::pow(zeta_regularized(s), static_cast<int>(k)); };
  }
  return [f = make_evaluator(spec), order](Complex s) {
    // (s - 1)^order f(s) -> finite limit at s = 1; evaluate beside the pole there.
    if (s == Complex(1.0, 0.0)) s += Complex(1e-9, 0.0);
    return std::pow(s - 1.0, static_cast<int>(order)) * f(s);
  };
}

}  // namespace dlab
