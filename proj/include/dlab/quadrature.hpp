#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dlab/complex.hpp"

namespace dlab {

enum class QuadratureRule { kTrapezoid, kSimpson };

/// [0, T] for mean values, [-T, T] for the zero experiments.
enum class TimeWindow { kHalf, kSymmetric };

std::string to_string(QuadratureRule rule);
std::string to_string(TimeWindow window);

struct QuadratureConfig {
  double step = 0.01;
  QuadratureRule rule = QuadratureRule::kSimpson;
  /// Number of disjoint sub-intervals; fixed independently of the worker
  /// count so the reduction order never changes.
  std::size_t parallel_chunks = 64;
  TimeWindow window = TimeWindow::kHalf;

  void validate() const;
};

/// Composite rule for integral_a^b g(t) dt on a uniform grid whose spacing
/// does not exceed cfg.step. Chunks run concurrently; chunk sums are
/// combined in chunk order with compensation.
double integrate(const std::function<double(double)>& g, double a, double b, const QuadratureConfig& cfg);

/// Default disc lattice for every disc integral in the library.
inline constexpr std::size_t kDefaultDiscGrid = 64;

/// Midpoint rule over the disc |z - center| <= radius on a grid x grid
/// lattice of the bounding square; cells whose centers fall outside the
/// disc are dropped.
class DiscRule {
 public:
  DiscRule(Complex center, double radius, std::size_t grid);

  const std::vector<Complex>& nodes() const { return nodes_; }
  double cell_area() const { return cell_area_; }

  /// sum_nodes g(z) * cell_area, compensated, in node order.
  double integrate(const std::function<double(Complex)>& g) const;

 private:
  std::vector<Complex> nodes_;
  double cell_area_;
};

}  // namespace dlab
