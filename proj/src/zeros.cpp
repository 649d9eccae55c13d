#include "dlab/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dlab/convolution.hpp"
#include "dlab/parallel.hpp"

namespace dlab {
namespace {

constexpr unsigned kMaxRefineDepth = 40;
constexpr double kConfirmResidual = 1e-8;
constexpr double kConfirmRadius = 1e-3;
constexpr char kBoundaryZero[] = "zero near boundary; perturb rectangle";

/// One piece of a closed contour, parametrized over u in [0,1].
struct Segment {
  std::function<Complex(double)> point;
  double length;
};

Complex sample(const Evaluator& f, Complex z) {
  const Complex v = f(z);
  if (!is_finite(v)) throw NumericalError("non-finite value on contour");
  if (std::abs(v) < kBoundaryModulusFloor) throw NumericalError(kBoundaryZero);
  return v;
}

/// Phase change of f along seg between u0 and u1; halves the step until
/// every jump is below pi/2.
double phase_change(const Evaluator& f, const Segment& seg, double u0, Complex f0, double u1, Complex f1,
                    unsigned depth) {
  const double jump = std::arg(f1 / f0);
  if (std::abs(jump) < kPi / 2.0) return jump;
  if (depth >= kMaxRefineDepth) throw NumericalError(kBoundaryZero);
  const double um = 0.5 * (u0 + u1);
  const Complex fm = sample(f, seg.point(um));
  return phase_change(f, seg, u0, f0, um, fm, depth + 1) + phase_change(f, seg, um, fm, u1, f1, depth + 1);
}

int contour_winding(const Evaluator& f, const std::vector<Segment>& segments, double step) {
  if (!(step > 0.0)) throw PreconditionError("winding: boundary_step must be > 0");
  // Fixed sample layout per segment, evaluated in parallel, then refined
  // and summed in contour order.
  struct Layout {
    std::size_t segment;
    std::size_t samples;
  };
  std::vector<Layout> layout;
  std::vector<std::pair<std::size_t, double>> nodes;  // (segment, u)
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto n = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(segments[s].length / step)));
    layout.push_back({s, n});
    for (std::size_t i = 0; i <= n; ++i) nodes.emplace_back(s, static_cast<double>(i) / static_cast<double>(n));
  }
  constexpr std::size_t kChunk = 128;
  std::vector<Complex> values(nodes.size());
  parallel::for_each_index((nodes.size() + kChunk - 1) / kChunk, [&](std::size_t c) {
    for (std::size_t i = c * kChunk; i < std::min(nodes.size(), (c + 1) * kChunk); ++i) {
      values[i] = sample(f, segments[nodes[i].first].point(nodes[i].second));
    }
  });

  double total = 0.0;
  std::size_t offset = 0;
  for (const auto& [s, n] : layout) {
    for (std::size_t i = 0; i < n; ++i) {
      total += phase_change(f, segments[s], nodes[offset + i].second, values[offset + i], nodes[offset + i + 1].second,
                            values[offset + i + 1], 0);
    }
    offset += n + 1;
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.05) throw NumericalError("winding: phase total is not an integer multiple of 2 pi");
  return static_cast<int>(rounded);
}

std::vector<Segment> rectangle_path(const Rectangle& r) {
  auto line = [](Complex a, Complex b) {
    return Segment{[a, b](double u) { return a + (b - a) * u; }, std::abs(b - a)};
  };
  const Complex bl(r.sigma_lo, r.t_lo), br(r.sigma_hi, r.t_lo), tr(r.sigma_hi, r.t_hi), tl(r.sigma_lo, r.t_hi);
  return {line(bl, br), line(br, tr), line(tr, tl), line(tl, bl)};
}

std::vector<Segment> circle_path(Complex center, double radius) {
  return {Segment{[center, radius](double u) { return center + std::polar(radius, kTwoPi * u); }, kTwoPi * radius}};
}

bool is_boundary_error(const NumericalError& e) { return std::string(e.what()) == kBoundaryZero; }

/// Newton from the cell center. Iterates that leave the cell grown by its
/// own size, or that the evaluator rejects, count as non-convergence.
std::optional<Complex> newton(const Evaluator& f, const Rectangle& cell, double tol) {
  const double w = cell.sigma_hi - cell.sigma_lo;
  const double h_cell = cell.t_hi - cell.t_lo;
  const Rectangle reach{cell.sigma_lo - w, cell.sigma_hi + w, cell.t_lo - h_cell, cell.t_hi + h_cell};
  Complex z = cell.center();
  try {
    for (int it = 0; it < 50; ++it) {
      const Complex fz = f(z);
      if (!is_finite(fz)) return std::nullopt;
      if (fz == Complex(0.0, 0.0)) return z;
      const double h = 1e-7 * std::max(1.0, std::abs(z));
      const Complex df = (f(z + h) - f(z - h)) / (2.0 * h);
      if (!is_finite(df) || df == Complex(0.0, 0.0)) return std::nullopt;
      const Complex step = fz / df;
      z -= step;
      if (!reach.contains(z)) return std::nullopt;
      if (std::abs(step) <= tol * std::max(1.0, std::abs(z))) return z;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::nullopt;
}

struct Scanner {
  const Evaluator& f;
  double tol;
  double boundary_step;
  ZeroScan out;

  double cell_step(const Rectangle& r) const {
    return std::min(boundary_step, std::min(r.sigma_hi - r.sigma_lo, r.t_hi - r.t_lo) / 16.0);
  }

  bool try_newton(const Rectangle& cell, int count) {
    auto z = newton(f, cell, tol);
    const double slack = 1e-9 * std::max(1.0, std::abs(cell.center()));
    if (!z || !cell.contains(*z, slack)) return false;
    ZeroRecord rec;
    rec.location = *z;
    rec.refinement_residual = std::abs(f(*z));
    try {
      rec.multiplicity = circle_winding(f, *z, kConfirmRadius, kConfirmRadius / 8.0);
    } catch (const NumericalError&) {
      rec.multiplicity = 0;
    }
    rec.winding_confirmed = rec.refinement_residual <= kConfirmResidual && rec.multiplicity >= 1;
    if (count > 1 && rec.multiplicity != count) return false;
    out.zeros.push_back(rec);
    return true;
  }

  void scan(const Rectangle& cell, int count, unsigned depth) {
    if (count == 0) return;
    const double width = cell.sigma_hi - cell.sigma_lo;
    const double height = cell.t_hi - cell.t_lo;
    const bool tiny = std::max(width, height) < 1e-6 || depth > 60;
    if (count < 0) {
      out.unresolved.push_back({cell, count});
      return;
    }
    if (count == 1 || tiny) {
      if (try_newton(cell, count)) return;
      if (tiny) {
        out.unresolved.push_back({cell, count});
        return;
      }
    }
    // Bisect the longer side; nudge the cut off a zero if one sits on it.
    for (double frac_cut : {0.5, 0.5 + 0.0173, 0.5 - 0.0291, 0.5 + 0.0419}) {
      Rectangle a = cell;
      Rectangle b = cell;
      if (width >= height) {
        const double cut = cell.sigma_lo + frac_cut * width;
        a.sigma_hi = cut;
        b.sigma_lo = cut;
      } else {
        const double cut = cell.t_lo + frac_cut * height;
        a.t_hi = cut;
        b.t_lo = cut;
      }
      int ca = 0;
      int cb = 0;
      try {
        ca = winding_count(f, a, cell_step(a));
        cb = winding_count(f, b, cell_step(b));
      } catch (const NumericalError& e) {
        if (!is_boundary_error(e)) throw;
        continue;
      }
      scan(a, ca, depth + 1);
      scan(b, cb, depth + 1);
      return;
    }
    out.unresolved.push_back({cell, count});
  }
};

}  // namespace

void Rectangle::validate() const {
  if (!(sigma_lo < sigma_hi) || !(t_lo < t_hi)) {
    throw PreconditionError("rectangle: requires sigma_lo < sigma_hi and t_lo < t_hi");
  }
  if (!std::isfinite(sigma_lo) || !std::isfinite(sigma_hi) || !std::isfinite(t_lo) || !std::isfinite(t_hi)) {
    throw PreconditionError("rectangle: bounds must be finite");
  }
}

bool Rectangle::contains(Complex z, double slack) const {
  return z.real() >= sigma_lo - slack && z.real() <= sigma_hi + slack && z.imag() >= t_lo - slack &&
         z.imag() <= t_hi + slack;
}

int winding_count(const Evaluator& f, const Rectangle& rect, double boundary_step) {
  rect.validate();
  return contour_winding(f, rectangle_path(rect), boundary_step);
}

int circle_winding(const Evaluator& f, Complex center, double radius, double boundary_step) {
  if (!(radius > 0.0)) throw PreconditionError("circle_winding: radius must be > 0");
  return contour_winding(f, circle_path(center, radius), boundary_step);
}

ZeroScan zero_scan(const Evaluator& f, const Rectangle& rect, double tol, double boundary_step) {
  rect.validate();
  if (!(tol > 0.0)) throw PreconditionError("zero_scan: tol must be > 0");
  Scanner scanner{f, tol, boundary_step, {}};
  // Grow the rectangle outward by 1e-3 per retry while its edge hits a zero.
  std::optional<int> count;
  Rectangle scanned = rect;
  for (unsigned attempt = 0; !count; ++attempt) {
    const double d = kBoundaryPerturbation * attempt;
    scanned = {rect.sigma_lo - d, rect.sigma_hi + d, rect.t_lo - d, rect.t_hi + d};
    try {
      count = winding_count(f, scanned, boundary_step);
    } catch (const NumericalError& e) {
      if (!is_boundary_error(e) || attempt == kBoundaryRetries) throw;
    }
  }
  scanner.out.scanned = scanned;
  scanner.scan(scanned, *count, 0);
  auto& zeros = scanner.out.zeros;
  std::sort(zeros.begin(), zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    return a.location.imag() != b.location.imag() ? a.location.imag() < b.location.imag()
                                                  : a.location.real() < b.location.real();
  });
  return std::move(scanner.out);
}

std::vector<DensityRow> density_table(const Evaluator& f, const std::vector<double>& sigma_list, double T,
                                      const DensityOptions& opts) {
  if (!(T > opts.t_lo)) throw PreconditionError("density_table: T must exceed the bottom edge");
  std::vector<DensityRow> rows;
  for (double sigma : sigma_list) {
    if (!(sigma < opts.sigma_hi)) throw PreconditionError("density_table: sigma must be below sigma_hi");
    std::optional<NumericalError> last;
    for (unsigned attempt = 0; attempt <= opts.retries; ++attempt) {
      // 0, +d, -d, +2d, -2d, ...
      const double shift = attempt == 0 ? 0.0
                                        : opts.perturbation * ((attempt + 1) / 2) * (attempt % 2 == 1 ? 1.0 : -1.0);
      const Rectangle rect{sigma + shift, opts.sigma_hi, opts.t_lo, T + shift};
      try {
        rows.push_back({sigma, T, winding_count(f, rect, opts.boundary_step), rect.sigma_lo, rect.t_hi});
        last.reset();
        break;
      } catch (const NumericalError& e) {
        if (!is_boundary_error(e)) throw;
        last = e;
      }
    }
    if (last) throw *last;
  }
  return rows;
}

namespace {

std::vector<Complex> circle_points(Complex center, double radius, std::size_t samples) {
  std::vector<Complex> pts(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    pts[i] = center + std::polar(radius, kTwoPi * static_cast<double>(i) / static_cast<double>(samples));
  }
  return pts;
}

double circle_min_modulus(const Evaluator& f, const std::vector<Complex>& pts) {
  double m = std::numeric_limits<double>::infinity();
  for (const Complex& z : pts) m = std::min(m, std::abs(f(z)));
  return m;
}

}  // namespace

RecurrenceReport recurrence_scan(const Evaluator& f, Complex s0, double r, double T, double t_step,
                                 const RecurrenceOptions& opts) {
  if (!(r > 0.0)) throw PreconditionError("recurrence_scan: r must be > 0");
  if (!(T >= 1.0)) throw PreconditionError("recurrence_scan: T must be >= 1");
  if (!(t_step > 0.0) || t_step > 0.5) throw PreconditionError("recurrence_scan: t_step must be in (0, 0.5]");
  const double seed_residual = std::abs(f(s0));
  if (!(seed_residual <= 1e-8)) {
    std::ostringstream msg;
    msg << "recurrence_scan: s0 is not a zero (|f(s0)| = " << seed_residual << ")";
    throw PreconditionError(msg.str());
  }
  const int around = circle_winding(f, s0, 1.5 * r, std::min(opts.boundary_step, r / 4.0));
  if (around != 1) {
    std::ostringstream msg;
    msg << "recurrence_scan: winding on |s - s0| = 3r/2 is " << around << ", expected exactly 1";
    throw PreconditionError(msg.str());
  }

  RecurrenceReport report;
  report.s0 = s0;
  report.r = r;
  report.T = T;
  report.t_step = t_step;
  report.m0 = circle_min_modulus(f, circle_points(s0, r, opts.circle_samples));
  if (!(report.m0 > 0.0)) throw PreconditionError("recurrence_scan: m0 = 0 (zero on the circle |s - s0| = r)");
  report.threshold = 0.2 * kPi * r * r * report.m0;

  const DiscRule disc(s0, r, opts.grid);
  std::vector<Complex> base(disc.nodes().size());
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = f(disc.nodes()[i]);

  const auto steps = static_cast<std::size_t>(std::llround(2.0 * T / t_step));
  constexpr std::size_t kChunk = 64;
  std::vector<double> integral(steps + 1);
  parallel::for_each_index((steps + kChunk) / kChunk, [&](std::size_t c) {
    for (std::size_t j = c * kChunk; j <= std::min(steps, (c + 1) * kChunk - 1); ++j) {
      const double t = -T + static_cast<double>(j) * t_step;
      CompensatedSum acc;
      for (std::size_t i = 0; i < base.size(); ++i) {
        acc.add(std::abs(f(disc.nodes()[i] + Complex(0.0, t)) - base[i]));
      }
      integral[j] = acc.value() * disc.cell_area();
    }
  });

  // One candidate per unit interval [-T + m, -T + m + 1): its minimizer.
  const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * T));
  std::vector<std::optional<RecurrenceHit>> best(intervals);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double t = -T + static_cast<double>(j) * t_step;
    if (std::abs(t) < 1.0 || integral[j] > report.threshold) continue;
    const auto m = std::min(intervals - 1, static_cast<std::size_t>(std::floor(t + T)));
    if (!best[m] || integral[j] < best[m]->disc_integral) best[m] = RecurrenceHit{t, integral[j]};
  }
  std::vector<RecurrenceHit> candidates;
  for (const auto& b : best) {
    if (b) candidates.push_back(*b);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const RecurrenceHit& a, const RecurrenceHit& b) { return a.disc_integral < b.disc_integral; });
  for (const auto& c : candidates) {
    const bool separated = std::all_of(report.hits.begin(), report.hits.end(),
                                       [&](const RecurrenceHit& h) { return std::abs(h.t - c.t) >= 1.0; });
    if (separated) report.hits.push_back(c);
  }
  std::sort(report.hits.begin(), report.hits.end(),
            [](const RecurrenceHit& a, const RecurrenceHit& b) { return a.t < b.t; });
  report.lower_bound_rate = static_cast<double>(report.hits.size()) / (2.0 * T);
  return report;
}

RoucheCheck rouche_verify(const Evaluator& f, Complex s0, double t_j, double r, double boundary_step,
                          std::size_t circle_samples) {
  if (!(r > 0.0)) throw PreconditionError("rouche_verify: r must be > 0");
  const auto pts = circle_points(s0, r, circle_samples);
  RoucheCheck check;
  check.m0 = circle_min_modulus(f, pts);
  const Complex shift(0.0, t_j);
  for (const Complex& z : pts) check.max_difference = std::max(check.max_difference, std::abs(f(z + shift) - f(z)));
  if (check.max_difference <= 0.8 * check.m0) {
    try {
      check.winding = circle_winding(f, s0 + shift, r, std::min(boundary_step, r / 4.0));
    } catch (const NumericalError&) {
      check.winding = std::nullopt;
    }
    check.passed = check.winding.has_value() && *check.winding >= 1;
  }
  return check;
}

std::vector<MollifierTail> mollifier_tail_decay(const CoefficientList& a, const CoefficientList& b, double sigma,
                                                const std::vector<std::size_t>& X_list, std::size_t n) {
  if (n < 8) throw PreconditionError("mollifier_tail_decay: N must be >= 8");
  if (a.size() < n) throw PreconditionError("mollifier_tail_decay: a must have at least N coefficients");
  std::vector<MollifierTail> out;
  for (std::size_t x : X_list) {
    if (x < 1) throw PreconditionError("mollifier_tail_decay: X must be >= 1");
    if (x >= n) {
      out.push_back({x, 0.0, 0.0});
      continue;
    }
    const auto d = mollifier_coefficients(a, b, x, n);
    CompensatedSum tail;
    for (std::size_t m = x + 1; m <= n; ++m) {
      const double d2 = std::norm(d[m]);
      if (d2 != 0.0) tail.add(d2 * std::exp(-2.0 * sigma * std::log(static_cast<double>(m))));
    }
    // Mean of |d_n|^2 over the last two dyadic blocks gives the growth per
    // doubling; the remainder is summed as a geometric series of blocks.
    auto block_mean = [&](std::size_t lo, std::size_t hi) {
      CompensatedSum s;
      for (std::size_t m = lo + 1; m <= hi; ++m) s.add(std::norm(d[m]));
      return s.value() / static_cast<double>(hi - lo);
    };
    const double last = block_mean(n / 2, n);
    const double prev = block_mean(n / 4, n / 2);
    double remainder = 0.0;
    if (last > 0.0) {
      const double growth = prev > 0.0 ? std::max(1.0, last / prev) : 2.0;
      const double q = std::pow(2.0, 1.0 - 2.0 * sigma);
      if (!(2.0 * sigma > 1.0) || growth * q >= 1.0) {
        remainder = std::numeric_limits<double>::infinity();
      } else {
        const double first_block =
            std::pow(static_cast<double>(n), 1.0 - 2.0 * sigma) * (1.0 - q) / (2.0 * sigma - 1.0);
        remainder = last * growth * first_block / (1.0 - growth * q);
      }
    }
    const MollifierTail row{x, tail.value(), remainder};
    if (row.remainder_bound > 0.1 * row.tail) {
      std::ostringstream msg;
      msg << "mollifier_tail_decay: remainder " << row.remainder_bound << " exceeds 10% of tail " << row.tail
          << " at X=" << x << "; increase N";
      throw NumericalError(msg.str());
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace dlab
