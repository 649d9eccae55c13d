#include "dlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dlab/parallel.hpp"

namespace dlab {

std::string to_string(QuadratureRule rule) { return rule == QuadratureRule::kSimpson ? "simpson" : "trapezoid"; }

std::string to_string(TimeWindow window) { return window == TimeWindow::kHalf ? "[0,T]" : "[-T,T]"; }

void QuadratureConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw PreconditionError("quadrature: step must be > 0");
  if (parallel_chunks < 1) throw PreconditionError("quadrature: parallel_chunks must be >= 1");
}

double integrate(const std::function<double(double)>& g, double a, double b, const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(b > a)) throw PreconditionError("integrate: requires b > a");
  auto intervals = static_cast<std::size_t>(std::ceil((b - a) / cfg.step - 1e-9));
  intervals = std::max<std::size_t>(intervals, 2);
  if (cfg.rule == QuadratureRule::kSimpson && intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);

  // Chunk lengths are even so every chunk is a complete Simpson panel set.
  std::size_t chunk_len = (intervals + cfg.parallel_chunks - 1) / cfg.parallel_chunks;
  if (chunk_len % 2 != 0) ++chunk_len;
  const std::size_t chunks = (intervals + chunk_len - 1) / chunk_len;

  auto partial = parallel::map_indices<double>(chunks, [&](std::size_t c) {
    const std::size_t lo = c * chunk_len;
    const std::size_t hi = std::min(intervals, lo + chunk_len);
    CompensatedSum acc;
    for (std::size_t i = lo; i <= hi; ++i) {
      const double t = (i == intervals) ? b : a + static_cast<double>(i) * h;
      double w;
      if (cfg.rule == QuadratureRule::kSimpson) {
        w = (i == lo || i == hi) ? 1.0 : ((i - lo) % 2 == 1 ? 4.0 : 2.0);
        w /= 3.0;
      } else {
        w = (i == lo || i == hi) ? 0.5 : 1.0;
      }
      acc.add(w * g(t));
    }
    return acc.value() * h;
  });

  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

DiscRule::DiscRule(Complex center, double radius, std::size_t grid) {
  if (!(radius > 0.0)) throw PreconditionError("disc rule: radius must be > 0");
  if (grid < 1) throw PreconditionError("disc rule: grid must be >= 1");
  const double h = 2.0 * radius / static_cast<double>(grid);
  cell_area_ = h * h;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = -radius + (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < grid; ++j) {
      const double y = -radius + (static_cast<double>(j) + 0.5) * h;
      if (x * x + y * y <= radius * radius) nodes_.emplace_back(center + Complex(x, y));
    }
  }
}

double DiscRule::integrate(const std::function<double(Complex)>& g) const {
  CompensatedSum acc;
  for (const Complex& z : nodes_) acc.add(g(z));
  return acc.value() * cell_area_;
}

}  // namespace dlab
