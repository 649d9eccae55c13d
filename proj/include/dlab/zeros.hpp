#pragma once

#include <optional>
#include <vector>

#include "dlab/complex.hpp"
#include "dlab/quadrature.hpp"
#include "dlab/series.hpp"

namespace dlab {

/// {sigma_lo <= Re s <= sigma_hi, t_lo <= Im s <= t_hi}
struct Rectangle {
  double sigma_lo;
  double sigma_hi;
  double t_lo;
  double t_hi;

  void validate() const;
  Complex center() const { return {(sigma_lo + sigma_hi) / 2.0, (t_lo + t_hi) / 2.0}; }
  bool contains(Complex z, double slack = 0.0) const;
};

/// Default spacing of contour samples before adaptive refinement.
inline constexpr double kDefaultBoundaryStep = 0.05;

/// Outward growth per retry when a rectangle edge passes through a zero.
inline constexpr double kBoundaryPerturbation = 1e-3;
inline constexpr unsigned kBoundaryRetries = 3;

/// Samples with |f| below this are treated as a zero on the contour.
inline constexpr double kBoundaryModulusFloor = 1e-10;

/// Number of zeros (minus poles) of f inside rect: boundary phase change /
/// 2 pi. The boundary is walked counter-clockwise at spacing boundary_step;
/// any step whose phase jump reaches pi/2 is halved until it does not.
/// Throws NumericalError("zero near boundary; perturb rectangle") when a
/// sample modulus drops below kBoundaryModulusFloor or refinement stalls.
int winding_count(const Evaluator& f, const Rectangle& rect, double boundary_step = kDefaultBoundaryStep);

/// Same count over the circle |s - center| = radius.
int circle_winding(const Evaluator& f, Complex center, double radius, double boundary_step = kDefaultBoundaryStep);

struct ZeroRecord {
  Complex location;
  bool winding_confirmed = false;  ///< residual <= 1e-8 and a winding circle of radius 1e-3 encloses it
  double refinement_residual = 0.0;
  int multiplicity = 1;
};

struct UnresolvedCell {
  Rectangle cell;
  int count;
};

struct ZeroScan {
  Rectangle scanned;                      ///< rect after any boundary perturbation
  std::vector<ZeroRecord> zeros;          ///< ordered by (Im, Re)
  std::vector<UnresolvedCell> unresolved; ///< cells Newton could not settle
};

/// Recursive bisection until every cell winds at most once, then Newton
/// (central-difference derivative) from the cell center. tol is the Newton
/// step tolerance. A zero on the edge of rect grows it outward by
/// kBoundaryPerturbation, at most kBoundaryRetries times.
ZeroScan zero_scan(const Evaluator& f, const Rectangle& rect, double tol = 1e-12,
                   double boundary_step = kDefaultBoundaryStep);

struct DensityOptions {
  double sigma_hi = 4.0;   ///< right edge; f must be zero-free beyond it
  double t_lo = -0.125;    ///< bottom edge, just below the real axis
  double boundary_step = kDefaultBoundaryStep;
  double perturbation = kBoundaryPerturbation;
  unsigned retries = kBoundaryRetries;
};

struct DensityRow {
  double sigma;       ///< as requested
  double T;
  int count;
  double sigma_used;  ///< after boundary perturbation
  double T_used;
};

/// N(sigma, T): zeros with real part > sigma and 0 <= Im <= T (the bottom
/// edge sits at opts.t_lo so real-axis zeros are counted).
std::vector<DensityRow> density_table(const Evaluator& f, const std::vector<double>& sigma_list, double T,
                                      const DensityOptions& opts = {});

struct RecurrenceHit {
  double t;
  double disc_integral;
};

struct RecurrenceReport {
  Complex s0;
  double r = 0.0;
  double m0 = 0.0;          ///< min_{|s - s0| = r} |f(s)|
  double T = 0.0;
  double t_step = 0.0;
  double threshold = 0.0;   ///< 0.2 pi r^2 m0
  std::vector<RecurrenceHit> hits;
  double lower_bound_rate = 0.0;  ///< hits / 2T
};

struct RecurrenceOptions {
  std::size_t grid = kDefaultDiscGrid;
  std::size_t circle_samples = 1024;
  double boundary_step = kDefaultBoundaryStep;
};

/// Scans t in [-T, T]: records the t where integral over |s - s0| <= r of
/// |f(s + it) - f(s)| falls to 0.2 pi r^2 m0, keeping one minimizer per unit
/// interval, hits pairwise >= 1 apart, and dropping the trivial |t| < 1.
RecurrenceReport recurrence_scan(const Evaluator& f, Complex s0, double r, double T, double t_step,
                                 const RecurrenceOptions& opts = {});

struct RoucheCheck {
  bool passed = false;
  double m0 = 0.0;              ///< recomputed min_{|s - s0| = r} |f(s)|
  double max_difference = 0.0;  ///< max_{|s - s0| = r} |f(s + i t_j) - f(s)|
  std::optional<int> winding;   ///< winding of f around s0 + i t_j, computed when the bound holds
};

/// max |f(s + i t_j) - f(s)| <= 0.8 m0 on the circle and f winds at least
/// once around s0 + i t_j. m0 is always recomputed here.
RoucheCheck rouche_verify(const Evaluator& f, Complex s0, double t_j, double r,
                          double boundary_step = kDefaultBoundaryStep, std::size_t circle_samples = 1024);

struct MollifierTail {
  std::size_t X;
  double tail;             ///< sum_{X < n <= N} |d_n|^2 n^{-2 sigma}
  double remainder_bound;  ///< extrapolated n > N remainder from dyadic mean-square growth of d_n
};

/// Tail of f M_X for each X. Throws NumericalError("increase N") when the
/// remainder exceeds 10% of the computed tail.
std::vector<MollifierTail> mollifier_tail_decay(const CoefficientList& a, const CoefficientList& b, double sigma,
                                                const std::vector<std::size_t>& X_list, std::size_t n);

}  // namespace dlab
