#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "maxstable/exact_max_sampler.hpp"
#include "maxstable/field_sequence.hpp"
#include "maxstable/gaussian_model.hpp"
#include "maxstable/mt_estimator.hpp"

namespace maxstable {

// What one unit of budget buys. `draws` counts exact samples of M (so a
// replication at level L costs L + 1); `elementary` counts elementary random
// variables.
enum class BudgetUnit { draws, elementary };

struct CampaignConfig {
  double budget = 1e6;
  BudgetUnit unit = BudgetUnit::draws;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int threads = 1;
  // Replications simulated per scheduling block. Part of the reproducibility
  // contract: results depend on it only through wasted work, never values.
  std::size_t block = 64;
};

struct EstimateReport {
  std::vector<double> point;
  double f_hat = 0.0;
  double s_hat = 0.0;
  double b = 0.0;
  std::int64_t b_count = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double alpha = 0.05;
  double rate = 0.0;

  /// Half-width of the interval relative to the estimate.
  double rel_err() const noexcept { return (ci_hi - ci_lo) / (2.0 * f_hat); }
};

struct CampaignResult {
  std::vector<EstimateReport> reports;
  std::int64_t b_count = 0;
  double total_cost = 0.0;          // T_{B(b)} in budget units
  std::int64_t exact_samples = 0;   // sum of levels over accepted replications
  std::int64_t elementary = 0;      // elementary variables over accepted replications
  std::int64_t max_level = 0;
};

/// One replication: index-addressed so any schedule reproduces it.
using ReplicationFn = std::function<EstimatorDraw(std::uint64_t index, DrawLimits limits, std::size_t worker)>;

/// Budget-stopped campaign over arbitrary replications: accumulates T_n in
/// replication order and keeps the B(b) = max{n : T_n <= b} first draws.
CampaignResult run_campaign(std::span<const std::vector<double>> points, const CampaignConfig& config,
                            const ReplicationFn& replicate);

/// The randomized-level density estimator under a budget, with confidence
/// intervals f_hat -/+ z_{alpha/2} s_hat a(b). Throws ErrorCode::EmptyBudget
/// when not even one replication fits.
CampaignResult run_budget(std::span<const std::vector<double>> points, const GaussianDesign& design,
                          const SamplerParams& params, const CampaignConfig& config);

/// z_{alpha/2}: the 1 - alpha/2 standard normal quantile.
double z_quantile(double alpha);

// Plug-in kernel density baseline with bandwidth b^{-1/(2d+1)} and kernel
// shaped by A = Sigma_hat / |det Sigma_hat|.
class KdeModel {
 public:
  /// Throws ErrorCode::SingularCovariance for a singular sample covariance.
  explicit KdeModel(const FieldSequence& samples);

  double bandwidth() const noexcept { return h_; }
  double covariance_det() const noexcept { return det_; }
  /// Kernel contribution of sample row k at x: phi(A^{-1/2}(x - M_k)/h) / h^d.
  double contribution(std::span<const double> x, std::size_t k) const;
  double estimate(std::span<const double> x) const;

 private:
  const FieldSequence* samples_;
  int d_ = 0;
  double h_ = 0.0;
  double det_ = 0.0;
  Eigen::MatrixXd chol_;  // factor of Sigma_hat
};

double kde_estimate(const FieldSequence& samples, std::span<const double> x);

struct KdeReport {
  std::vector<double> point;
  double f_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t b = 0;
  double rel_err() const noexcept { return (ci_hi - ci_lo) / (2.0 * f_hat); }
};

/// KDE at each point with a batch-means interval over `batches` contiguous
/// groups of kernel contributions (all at the full-sample bandwidth).
std::vector<KdeReport> kde_reports(const FieldSequence& samples, std::span<const std::vector<double>> points,
                                   double alpha, std::size_t batches = 50);

/// n exact samples of M, sample i drawn from stream (seed, i).
FieldSequence draw_exact_samples(const GaussianDesign& design, const SamplerParams& params, std::int64_t n,
                                 std::uint64_t seed, int threads);

}  // namespace maxstable
