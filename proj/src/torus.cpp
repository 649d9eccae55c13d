#include "dlab/torus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dlab/parallel.hpp"

namespace dlab {
namespace {

constexpr std::size_t kFlowChunk = 1 << 16;
constexpr std::size_t kMonteCarloBatch = 4096;

/// Sums F over the grid samples j = 1..n, chunk by chunk in a fixed order.
template <typename PerSample>
double flow_sum(const FlowConfig& cfg, PerSample per_sample) {
  const std::size_t n = cfg.sample_count();
  const std::size_t chunks = (n + kFlowChunk - 1) / kFlowChunk;
  auto partial = parallel::map_indices<double>(chunks, [&](std::size_t c) {
    std::vector<double> x(cfg.dims);
    CompensatedSum acc;
    const std::size_t lo = c * kFlowChunk + 1;
    const std::size_t hi = std::min(n, (c + 1) * kFlowChunk);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double t = static_cast<double>(j) * cfg.step;
      for (std::size_t i = 0; i < cfg.dims; ++i) x[i] = frac(t * cfg.lambda[i]);
      acc.add(per_sample(std::span<const double>(x)));
    }
    return acc.value();
  });
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

/// Uniform double in [0,1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 batch_rng(std::uint64_t seed, std::size_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
  return std::mt19937_64(seq);
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

MonteCarloEstimate monte_carlo(std::size_t dims, std::size_t samples, std::uint64_t seed,
                               const std::function<double(std::span<const double>)>& g) {
  if (samples < 10'000) throw PreconditionError("Monte Carlo: samples must be >= 1e4");
  const std::size_t batches = (samples + kMonteCarloBatch - 1) / kMonteCarloBatch;
  auto partial = parallel::map_indices<Moments>(batches, [&](std::size_t b) {
    auto rng = batch_rng(seed, b);
    std::vector<double> x(dims);
    CompensatedSum s;
    CompensatedSum s2;
    const std::size_t count = std::min(kMonteCarloBatch, samples - b * kMonteCarloBatch);
    for (std::size_t i = 0; i < count; ++i) {
      for (auto& xi : x) xi = uniform01(rng);
      const double v = g(std::span<const double>(x));
      s.add(v);
      s2.add(v * v);
    }
    return Moments{s.value(), s2.value()};
  });
  CompensatedSum s;
  CompensatedSum s2;
  for (const auto& m : partial) {
    s.add(m.sum);
    s2.add(m.sum_sq);
  }
  const double n = static_cast<double>(samples);
  const double mean = s.value() / n;
  const double var = std::max(0.0, s2.value() / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

FlowConfig FlowConfig::log_prime(std::size_t dims, double T, double step) {
  FlowConfig cfg;
  cfg.dims = dims;
  cfg.T = T;
  cfg.step = step;
  cfg.independent = true;
  for (std::uint64_t p : first_primes(dims)) cfg.lambda.push_back(std::log(static_cast<double>(p)) / kTwoPi);
  cfg.validate();
  return cfg;
}

FlowConfig FlowConfig::custom(std::vector<double> lambda, double T, double step, bool caller_asserts_independence) {
  FlowConfig cfg;
  cfg.dims = lambda.size();
  cfg.lambda = std::move(lambda);
  cfg.T = T;
  cfg.step = step;
  cfg.independent = caller_asserts_independence;
  cfg.validate();
  return cfg;
}

void FlowConfig::validate() const {
  if (dims < 1) throw PreconditionError("flow: dims must be >= 1");
  if (lambda.size() != dims) throw PreconditionError("flow: lambda must have dims entries");
  for (double l : lambda) {
    if (!std::isfinite(l)) throw PreconditionError("flow: lambda must be finite");
  }
  if (!(T > 0.0) || !std::isfinite(T)) throw PreconditionError("flow: T must be > 0");
  if (!(step > 0.0) || step > T) throw PreconditionError("flow: step must be in (0, T]");
}

std::size_t FlowConfig::sample_count() const {
  return static_cast<std::size_t>(std::floor(T / step + 1e-9));
}

Box::Box(std::vector<std::pair<double, double>> sides) : sides_(std::move(sides)) {
  if (sides_.empty()) throw PreconditionError("box: needs at least one side");
  for (const auto& [lo, hi] : sides_) {
    if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) throw PreconditionError("box: sides must satisfy 0 <= u < v <= 1");
  }
}

Box Box::full(std::size_t dims) { return Box(std::vector<std::pair<double, double>>(dims, {0.0, 1.0})); }

double Box::volume() const {
  double v = 1.0;
  for (const auto& [lo, hi] : sides_) v *= hi - lo;
  return v;
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (x[i] < sides_[i].first || x[i] >= sides_[i].second) return false;
  }
  return true;
}

double tychonoff_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("tychonoff_distance: dimension mismatch");
  double d = 0.0;
  double w = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    w *= std::exp(-1.0);
    d += w * std::abs(x[i] - y[i]);
  }
  return d;
}

double tychonoff_distance(const TorusPoint& x, const TorusPoint& y) {
  return tychonoff_distance(x.coords(), y.coords());
}

double tychonoff_diameter(std::size_t dims) {
  const double q = std::exp(-1.0);
  return q * (1.0 - std::pow(q, static_cast<double>(dims))) / (1.0 - q);
}

TychonoffBall::TychonoffBall(TorusPoint center, double radius) : center_(std::move(center)), radius_(radius) {
  if (center_.dims() < 1) throw PreconditionError("ball: center needs at least one coordinate");
  if (!(radius_ >= 0.0) || !std::isfinite(radius_)) throw PreconditionError("ball: radius must be >= 0");
}

bool TychonoffBall::contains(std::span<const double> x) const {
  return tychonoff_distance(x.first(dims()), center_.coords()) <= radius_;
}

TorusPoint flow_point(const FlowConfig& cfg, double t) {
  cfg.validate();
  std::vector<double> x(cfg.dims);
  for (std::size_t i = 0; i < cfg.dims; ++i) x[i] = frac(t * cfg.lambda[i]);
  return TorusPoint(std::move(x));
}

HittingFraction box_hitting_fraction(const FlowConfig& cfg, const Box& box) {
  cfg.validate();
  if (box.dims() > cfg.dims) throw PreconditionError("box_hitting_fraction: box has more dims than the flow");
  const double hits = flow_sum(cfg, [&](std::span<const double> x) { return box.contains(x) ? 1.0 : 0.0; });
  return {hits / static_cast<double>(cfg.sample_count()), cfg.step / cfg.T};
}

double time_average(const FlowConfig& cfg, const TorusFunction& f) {
  cfg.validate();
  return flow_sum(cfg, f) / static_cast<double>(cfg.sample_count());
}

double ball_time_average(const FlowConfig& cfg, const TychonoffBall& ball, const TorusFunction& f) {
  return union_time_average(cfg, {ball}, {}, f);
}

double union_time_average(const FlowConfig& cfg, const std::vector<TychonoffBall>& balls,
                          const std::vector<Box>& boxes, const TorusFunction& f) {
  cfg.validate();
  for (const auto& b : balls) {
    if (b.dims() > cfg.dims) throw PreconditionError("ball has more dims than the flow");
  }
  for (const auto& b : boxes) {
    if (b.dims() > cfg.dims) throw PreconditionError("box has more dims than the flow");
  }
  const double sum = flow_sum(cfg, [&](std::span<const double> x) {
    const bool inside = std::any_of(balls.begin(), balls.end(), [&](const auto& b) { return b.contains(x); }) ||
                        std::any_of(boxes.begin(), boxes.end(), [&](const auto& b) { return b.contains(x); });
    return inside ? f(x) : 0.0;
  });
  return sum / static_cast<double>(cfg.sample_count());
}

MonteCarloEstimate ball_measure_mc(const TychonoffBall& ball, std::size_t samples, std::uint64_t seed) {
  return monte_carlo(ball.dims(), samples, seed,
                     [&](std::span<const double> x) { return ball.contains(x) ? 1.0 : 0.0; });
}

MonteCarloEstimate ball_integral_mc(const TychonoffBall& ball, const TorusFunction& f, std::size_t samples,
                                    std::uint64_t seed) {
  return monte_carlo(ball.dims(), samples, seed,
                     [&](std::span<const double> x) { return ball.contains(x) ? f(x) : 0.0; });
}

}  // namespace dlab
