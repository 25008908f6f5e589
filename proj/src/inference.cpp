#include "maxstable/inference.hpp"

#include <cmath>
#include <limits>

#include "maxstable/error.hpp"
#include "maxstable/parallel.hpp"
#include "maxstable/schedule_tables.hpp"

namespace maxstable {

double z_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  return normal::quantile_upper(0.5 * alpha);
}

namespace {
std::int64_t budget_cap(double remaining) {
  if (remaining >= 9.0e18) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::floor(remaining));
}
}  // namespace

CampaignResult run_campaign(std::span<const std::vector<double>> points, const CampaignConfig& config,
                            const ReplicationFn& replicate) {
  if (!(config.budget >= 1.0)) throw Error(ErrorCode::EmptyBudget, "budget must be >= 1");
  const double z = z_quantile(config.alpha);
  const std::size_t n_points = points.size();
  const std::size_t block = std::max<std::size_t>(config.block, 1);

  // Welford accumulators per point, fed in replication order.
  std::vector<double> mean(n_points, 0.0);
  std::vector<double> m2(n_points, 0.0);
  CampaignResult result;
  double spent = 0.0;
  std::vector<EstimatorDraw> draws(block);
  bool exhausted = false;

  for (std::uint64_t base = 0; !exhausted; base += block) {
    const double remaining = config.budget - spent;
    DrawLimits limits;
    if (config.unit == BudgetUnit::draws) {
      limits.max_level = budget_cap(remaining) - 1;
    } else {
      limits.max_cost = budget_cap(remaining);
    }
    parallel_for(block, config.threads, [&](std::size_t worker, std::size_t j) {
      draws[j] = replicate(base + j, limits, worker);
    });
    for (std::size_t j = 0; j < block; ++j) {
      const EstimatorDraw& draw = draws[j];
      if (draw.values.empty()) {
        exhausted = true;
        break;
      }
      const double cost = config.unit == BudgetUnit::draws ? static_cast<double>(draw.level + 1)
                                                           : static_cast<double>(draw.cost);
      if (spent + cost > config.budget) {
        exhausted = true;
        break;
      }
      spent += cost;
      ++result.b_count;
      result.exact_samples += draw.level;
      result.elementary += draw.cost;
      result.max_level = std::max(result.max_level, draw.level);
      const double n = static_cast<double>(result.b_count);
      for (std::size_t p = 0; p < n_points; ++p) {
        const double delta = draw.values[p] - mean[p];
        mean[p] += delta / n;
        m2[p] += delta * (draw.values[p] - mean[p]);
      }
    }
  }
  if (result.b_count == 0) throw Error(ErrorCode::EmptyBudget, "budget does not cover a single replication");

  result.total_cost = spent;
  const double rate = triple_log_rate(config.budget);
  result.reports.reserve(n_points);
  for (std::size_t p = 0; p < n_points; ++p) {
    EstimateReport r;
    r.point = points[p];
    r.f_hat = mean[p];
    r.s_hat = std::sqrt(m2[p] / static_cast<double>(result.b_count));
    r.b = config.budget;
    r.b_count = result.b_count;
    r.alpha = config.alpha;
    r.rate = rate;
    r.ci_lo = r.f_hat - z * r.s_hat * rate;
    r.ci_hi = r.f_hat + z * r.s_hat * rate;
    result.reports.push_back(std::move(r));
  }
  return result;
}

CampaignResult run_budget(std::span<const std::vector<double>> points, const GaussianDesign& design,
                          const SamplerParams& params, const CampaignConfig& config) {
  const KernelConstants k = KernelConstants::make(design.dim());
  const LevelSchedule schedule;
  std::vector<EstimatorWorkspace> workspaces(static_cast<std::size_t>(std::max(config.threads, 1)));
  ReplicationFn replicate = [&](std::uint64_t index, DrawLimits limits, std::size_t worker) {
    Stream rng(config.seed, index);
    return draw_estimator(points, design, params, k, schedule, rng, workspaces[worker], limits);
  };
  return run_campaign(points, config, replicate);
}

KdeModel::KdeModel(const FieldSequence& samples) : samples_(&samples), d_(samples.dim()) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorCode::SingularCovariance, "KDE needs at least two samples");
  const auto d = static_cast<Eigen::Index>(d_);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t k = 0; k < n; ++k) mean += Eigen::Map<const Eigen::VectorXd>(samples[k].data(), d);
  mean /= static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(samples[k].data(), d) - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(n - 1);

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularCovariance, "sample covariance is singular");
  chol_ = llt.matrixL();
  det_ = chol_.diagonal().prod();
  det_ *= det_;
  if (!(det_ > 0.0) || !std::isfinite(det_)) {
    throw Error(ErrorCode::SingularCovariance, "sample covariance is singular");
  }
  h_ = std::pow(static_cast<double>(n), -1.0 / (2.0 * d_ + 1.0));
}

double KdeModel::contribution(std::span<const double> x, std::size_t k) const {
  const auto row = (*samples_)[k];
  const auto d = static_cast<Eigen::Index>(d_);
  Eigen::VectorXd u(d);
  for (Eigen::Index i = 0; i < d; ++i) u(i) = (x[static_cast<std::size_t>(i)] - row[static_cast<std::size_t>(i)]) / h_;
  // |A^{-1/2} u|^2 = u' A^{-1} u = |det| * u' Sigma_hat^{-1} u
  chol_.triangularView<Eigen::Lower>().solveInPlace(u);
  const double q = det_ * u.squaredNorm();
  return std::exp(-0.5 * q) / std::pow(normal::kSqrt2Pi * h_, d_);
}

double KdeModel::estimate(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t k = 0; k < samples_->size(); ++k) total += contribution(x, k);
  return total / static_cast<double>(samples_->size());
}

double kde_estimate(const FieldSequence& samples, std::span<const double> x) {
  return KdeModel(samples).estimate(x);
}

std::vector<KdeReport> kde_reports(const FieldSequence& samples, std::span<const std::vector<double>> points,
                                   double alpha, std::size_t batches) {
  const KdeModel model(samples);
  const double z = z_quantile(alpha);
  const std::size_t n = samples.size();
  batches = std::clamp<std::size_t>(batches, 2, n);
  std::vector<KdeReport> out;
  for (const auto& x : points) {
    std::vector<double> batch_sum(batches, 0.0);
    std::vector<std::size_t> batch_n(batches, 0);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double c = model.contribution(x, k);
      const std::size_t b = k * batches / n;
      batch_sum[b] += c;
      ++batch_n[b];
      total += c;
    }
    const double f = total / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const double m = batch_sum[b] / static_cast<double>(batch_n[b]);
      ss += (m - f) * (m - f);
    }
    const double se = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
    out.push_back({x, f, f - z * se, f + z * se, static_cast<std::int64_t>(n)});
  }
  return out;
}

FieldSequence draw_exact_samples(const GaussianDesign& design, const SamplerParams& params, std::int64_t n,
                                 std::uint64_t seed, int threads) {
  FieldSequence out(design.dim());
  for (std::int64_t i = 0; i < n; ++i) out.append();
  std::vector<ExactSample> ws(static_cast<std::size_t>(std::max(threads, 1)));
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t worker, std::size_t i) {
    Stream rng(seed, i);
    algorithm_m(design, params, rng, ws[worker]);
    std::copy(ws[worker].m.begin(), ws[worker].m.end(), out[i].begin());
  });
  return out;
}

}  // namespace maxstable
