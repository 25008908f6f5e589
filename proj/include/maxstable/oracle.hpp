#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maxstable/gaussian_model.hpp"
#include "maxstable/random.hpp"

namespace maxstable {

// Reference computations that do not go through the exact sampler.

struct OracleEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::int64_t n = 0;
};

/// Marginal CDF of M(t) when X(t) ~ N(0, variance) and mu(t) = 0:
/// exp(-exp(variance/2 - x)).
double gumbel_marginal_cdf(double x, double variance);

/// F(x) = exp(-E max_i exp(X_i + mu_i - x_i)) with the expectation replaced by
/// an n-sample mean; the standard error is by the delta method.
OracleEstimate cdf_mc(std::span<const double> x, const GaussianDesign& design, std::int64_t n, Stream& rng);

// Corners of the mixed central-difference stencil: x + s h/2 for
// s in {-1, +1}^d, with weight prod(s) / h^d.
struct Stencil {
  std::vector<std::vector<double>> corners;
  std::vector<double> weights;
};

/// Throws ErrorCode::StencilTooLarge for d > 4.
Stencil mixed_difference_stencil(std::span<const double> x, double h);

/// sum_c weight_c * value_c.
double apply_stencil(const Stencil& stencil, std::span<const double> corner_values);

/// Density by the mixed difference of the Monte Carlo CDF, all 2^d corners
/// sharing the same Gaussian draws. The standard error linearizes the
/// corner CDFs around their sample means (second pass replays the stream).
OracleEstimate density_fd(std::span<const double> x, const GaussianDesign& design, double h, std::int64_t n,
                          Stream& rng);

struct FiniteLevelEstimate {
  double value = 0.0;
  double std_err = 0.0;
  double trimmed_mean = 0.0;  // mean after dropping the top and bottom 0.5%
  std::int64_t n = 0;
};

/// Density of the n_trunc-term maximum M_n(x) from the gradient form
/// -E sum_i dG/dx_i(x - M_n) (Sigma^{-1} sum_k X_k)_i. The summands have
/// infinite variance, so std_err is indicative only.
FiniteLevelEstimate finite_level_density(std::span<const double> x, const GaussianDesign& design,
                                         std::int64_t n_trunc, std::int64_t n_samples, Stream& rng);

}  // namespace maxstable
