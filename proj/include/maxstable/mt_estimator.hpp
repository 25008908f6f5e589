#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "maxstable/exact_max_sampler.hpp"
#include "maxstable/gaussian_model.hpp"
#include "maxstable/random.hpp"

namespace maxstable {

// Constants of the Newtonian potential G(x) = kappa_d / ||x||^(d-2) in R^d.
struct KernelConstants {
  int d = 3;
  double omega_d = 0.0;  // unit-ball volume
  double kappa_d = 0.0;  // 1 / (d (2-d) omega_d)

  /// Throws ErrorCode::DomainError for d < 3.
  static KernelConstants make(int d);
};

/// dG/dx_i = (2-d) kappa_d x_i / ||x||^d = x_i / (d omega_d ||x||^d).
/// Used by the finite-level cross-check; the randomized estimator works with
/// the assembled inner-product form in w_bar.
double kernel_gradient(std::span<const double> x, int i, const KernelConstants& k);

// The deterministic level structure: perturbation delta_n and level tail
// g(n) = P(L >= n).
class LevelSchedule {
 public:
  double delta(std::int64_t n) const;
  double g(std::int64_t n) const;

  /// L = max{n >= 1 : g(n) >= u}.
  std::int64_t level_from_uniform(double u) const;
  std::int64_t sample_level(Stream& rng) const { return level_from_uniform(rng.uniform()); }
};

/// Sum over the retained Gaussians of Sigma^{-1} X_k.
std::vector<double> score_sum(const ExactSample& sample, const GaussianDesign& design);

/// <M - x, S> / (d omega_d (||M-x||^d + delta_n ||M-x||)); 0 when M == x.
/// n == 0 gives the W_0 = 0 convention.
double w_bar(std::span<const double> x, std::span<const double> m, std::span<const double> score,
             std::int64_t n, const KernelConstants& k, const LevelSchedule& schedule);

/// w_bar(n) - w_bar(n-1) on the same sample.
double delta_level(std::span<const double> x, std::span<const double> m, std::span<const double> score,
                   std::int64_t n, const KernelConstants& k, const LevelSchedule& schedule);

// One replication of the randomized-level estimator at several points.
struct EstimatorDraw {
  std::vector<double> values;  // V(x) per point
  std::int64_t level = 0;      // L
  std::int64_t cost = 0;       // sum of exact-sampler costs over the levels, plus 1
};

// Produces the independent level differences Delta_k(x) for every point.
using LevelDifferenceFn =
    std::function<void(std::int64_t level, Stream& rng, std::span<double> out, std::int64_t& cost)>;

// Caps for budgeted campaigns. A draw whose level or cost would pass a cap is
// abandoned and returned with values cleared.
struct DrawLimits {
  std::int64_t max_level = INT64_MAX;
  std::int64_t max_cost = INT64_MAX;
};

/// V = sum_{k<=L} Delta_k / g(k) with L drawn from the schedule, for any
/// source of independent level differences.
EstimatorDraw draw_randomized(std::size_t n_points, const LevelSchedule& schedule,
                              const LevelDifferenceFn& level_fn, Stream& rng, DrawLimits limits = {});

// Reusable buffers for repeated estimator draws in one thread.
struct EstimatorWorkspace {
  ExactSample sample;
};

/// V(x) at every point, each level using its own fresh exact sample of M;
/// all points share L and the level samples.
EstimatorDraw draw_estimator(std::span<const std::vector<double>> points, const GaussianDesign& design,
                             const SamplerParams& params, const KernelConstants& k,
                             const LevelSchedule& schedule, Stream& rng, EstimatorWorkspace& ws,
                             DrawLimits limits = {});

}  // namespace maxstable
