#include "maxstable/mt_estimator.hpp"

#include <cmath>

#include "maxstable/error.hpp"
#include "maxstable/schedule_tables.hpp"

namespace maxstable {

KernelConstants KernelConstants::make(int d) {
  if (d < 3) throw Error(ErrorCode::DomainError, "Newtonian kernel needs d >= 3");
  KernelConstants k;
  k.d = d;
  k.omega_d = unit_ball_volume(d);
  k.kappa_d = 1.0 / (d * (2.0 - d) * k.omega_d);
  return k;
}

double kernel_gradient(std::span<const double> x, int i, const KernelConstants& k) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double r = std::sqrt(r2);
  return (2.0 - k.d) * k.kappa_d * x[static_cast<std::size_t>(i)] / std::pow(r, k.d);
}

double LevelSchedule::delta(std::int64_t n) const { return delta_seq(n); }
double LevelSchedule::g(std::int64_t n) const { return g_tail(n); }

std::int64_t LevelSchedule::level_from_uniform(double u) const {
  if (!(u > 0.0)) throw Error(ErrorCode::DomainError, "level sampling needs u > 0");
  if (u > 1.0) throw Error(ErrorCode::DomainError, "level sampling needs u <= 1");
  // g(1) = 1 >= u. Find hi with g(hi) < u, then bisect keeping g(lo) >= u.
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (g(hi) >= u) {
    lo = hi;
    if (hi > (INT64_MAX >> 2)) throw Error(ErrorCode::Overflow, "level exceeds 64-bit range");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (g(mid) >= u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::vector<double> score_sum(const ExactSample& sample, const GaussianDesign& design) {
  std::vector<double> total(static_cast<std::size_t>(design.dim()), 0.0);
  for (std::size_t k = 0; k < sample.x.size(); ++k) {
    const auto row = sample.x[k];
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += row[i];
  }
  return design.precision_apply(total);
}

double w_bar(std::span<const double> x, std::span<const double> m, std::span<const double> score,
             std::int64_t n, const KernelConstants& k, const LevelSchedule& schedule) {
  if (n == 0) return 0.0;
  double r2 = 0.0;
  double inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = m[i] - x[i];
    r2 += diff * diff;
    inner += diff * score[i];
  }
  if (r2 == 0.0) return 0.0;
  const double r = std::sqrt(r2);
  const double denom = k.d * k.omega_d * (std::pow(r, k.d) + schedule.delta(n) * r);
  return inner / denom;
}

double delta_level(std::span<const double> x, std::span<const double> m, std::span<const double> score,
                   std::int64_t n, const KernelConstants& k, const LevelSchedule& schedule) {
  return w_bar(x, m, score, n, k, schedule) - w_bar(x, m, score, n - 1, k, schedule);
}

EstimatorDraw draw_randomized(std::size_t n_points, const LevelSchedule& schedule,
                              const LevelDifferenceFn& level_fn, Stream& rng, DrawLimits limits) {
  EstimatorDraw draw;
  draw.level = schedule.sample_level(rng);
  draw.cost = 1;
  if (draw.level > limits.max_level) return draw;
  draw.values.assign(n_points, 0.0);
  std::vector<double> diff(n_points);
  for (std::int64_t k = 1; k <= draw.level; ++k) {
    level_fn(k, rng, diff, draw.cost);
    if (draw.cost > limits.max_cost) {
      draw.values.clear();
      return draw;
    }
    const double weight = 1.0 / schedule.g(k);
    for (std::size_t p = 0; p < n_points; ++p) draw.values[p] += diff[p] * weight;
  }
  return draw;
}

EstimatorDraw draw_estimator(std::span<const std::vector<double>> points, const GaussianDesign& design,
                             const SamplerParams& params, const KernelConstants& k,
                             const LevelSchedule& schedule, Stream& rng, EstimatorWorkspace& ws,
                             DrawLimits limits) {
  const auto d = static_cast<std::size_t>(design.dim());
  for (const auto& x : points) {
    if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "evaluation point has wrong dimension");
  }
  auto level_fn = [&](std::int64_t level, Stream& s, std::span<double> out, std::int64_t& cost) {
    algorithm_m(design, params, s, ws.sample);
    cost += ws.sample.cost;
    const std::vector<double> score = score_sum(ws.sample, design);
    for (std::size_t p = 0; p < points.size(); ++p) {
      out[p] = delta_level(points[p], ws.sample.m, score, level, k, schedule);
    }
  };
  return draw_randomized(points.size(), schedule, level_fn, rng, limits);
}

}  // namespace maxstable
