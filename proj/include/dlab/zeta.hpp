#pragma once

#include "dlab/complex.hpp"

namespace dlab {

enum class ZetaStatus {
  kValidated,              ///< 1/2 < Re s <= 4 and |Im s| <= 1e4
  kAccuracyNotGuaranteed,  ///< Re s > 0 but outside the validated strip
};

struct ZetaEvaluation {
  Complex value;
  ZetaStatus status;
};

/// Truncation point used by the Euler-Maclaurin sums: max(ceil|Im s|, 32).
std::size_t zeta_truncation(Complex s);

/// Riemann zeta by Euler-Maclaurin summation with Bernoulli corrections
/// through B_10. Requires Re s > 0 and s != 1.
ZetaEvaluation zeta_evaluate(Complex s);

/// zeta_evaluate(s).value.
Complex zeta(Complex s);

/// (s - 1) zeta(s): the pole removed, so argument-principle counts over
/// regions containing s = 1 see zeros only.
Complex zeta_regularized(Complex s);

/// Hurwitz zeta(s, a) = sum_{n >= 0} (n + a)^{-s}, 0 < a <= 1, same scheme.
Complex hurwitz_zeta(Complex s, double a);

}  // namespace dlab
