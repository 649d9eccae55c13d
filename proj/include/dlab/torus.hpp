#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dlab/series.hpp"

namespace dlab {

/// Kronecker flow t -> ({t lambda_1}, ..., {t lambda_m}) sampled on the grid
/// t_j = j * step, 0 < t_j <= T.
struct FlowConfig {
  std::size_t dims = 1;
  std::vector<double> lambda;  ///< lambda_n = log p_n / 2 pi when built by log_prime()
  double T = 1e5;
  double step = 0.01;
  /// Rational independence of lambda: proved for the log-prime default,
  /// asserted by the caller otherwise.
  bool independent = false;

  static FlowConfig log_prime(std::size_t dims, double T = 1e5, double step = 0.01);
  static FlowConfig custom(std::vector<double> lambda, double T, double step, bool caller_asserts_independence);

  void validate() const;
  std::size_t sample_count() const;
};

/// Product of half-open intervals [lo_i, hi_i) in [0,1).
class Box {
 public:
  explicit Box(std::vector<std::pair<double, double>> sides);
  static Box full(std::size_t dims);

  std::size_t dims() const { return sides_.size(); }
  const std::vector<std::pair<double, double>>& sides() const { return sides_; }
  double volume() const;
  /// Only the first dims() coordinates of x are tested.
  bool contains(std::span<const double> x) const;

 private:
  std::vector<std::pair<double, double>> sides_;
};

/// d(x, y) = sum_{n >= 1} e^{-n} |x_n - y_n| over the common truncation.
double tychonoff_distance(std::span<const double> x, std::span<const double> y);
double tychonoff_distance(const TorusPoint& x, const TorusPoint& y);

/// sum_{n=1}^{dims} e^{-n}: the largest distance between two points of the truncated cube.
double tychonoff_diameter(std::size_t dims);

/// Closed ball of the Tychonoff metric, truncated to center.dims() coordinates.
class TychonoffBall {
 public:
  TychonoffBall(TorusPoint center, double radius);

  const TorusPoint& center() const { return center_; }
  double radius() const { return radius_; }
  std::size_t dims() const { return center_.dims(); }
  bool contains(std::span<const double> x) const;

 private:
  TorusPoint center_;
  double radius_;
};

using TorusFunction = std::function<double(std::span<const double>)>;

TorusPoint flow_point(const FlowConfig& cfg, double t);

struct HittingFraction {
  double fraction;
  double resolution;  ///< step / T, the time-discretization limit
};

/// Fraction of grid times whose flow point lies in the box.
HittingFraction box_hitting_fraction(const FlowConfig& cfg, const Box& box);

/// (1/T) integral_0^T F({t Lambda}) dt by the composite rectangle rule on
/// the flow grid, so an indicator F reproduces box_hitting_fraction.
double time_average(const FlowConfig& cfg, const TorusFunction& f);

/// (1/T) integral over {t <= T : {t Lambda} in ball} of F({t Lambda}) dt.
double ball_time_average(const FlowConfig& cfg, const TychonoffBall& ball, const TorusFunction& f);

/// Same restricted average over a finite union of balls and boxes (a point
/// counts once even when it lies in several pieces).
double union_time_average(const FlowConfig& cfg, const std::vector<TychonoffBall>& balls,
                          const std::vector<Box>& boxes, const TorusFunction& f);

struct MonteCarloEstimate {
  double estimate;
  double std_error;
};

/// Uniform Monte Carlo volume of the ball in its truncated cube.
/// Deterministic in (samples, seed) for any worker count.
MonteCarloEstimate ball_measure_mc(const TychonoffBall& ball, std::size_t samples, std::uint64_t seed);

/// Monte Carlo estimate of integral_ball F d(mu), with standard error.
MonteCarloEstimate ball_integral_mc(const TychonoffBall& ball, const TorusFunction& f, std::size_t samples,
                                    std::uint64_t seed);

}  // namespace dlab
