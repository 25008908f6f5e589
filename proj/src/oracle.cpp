#include "maxstable/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxstable/error.hpp"
#include "maxstable/mt_estimator.hpp"

namespace maxstable {

namespace {
void check_point(std::span<const double> x, const GaussianDesign& design) {
  if (x.size() != static_cast<std::size_t>(design.dim())) {
    throw Error(ErrorCode::DimensionMismatch, "point dimension differs from the design");
  }
}

void check_samples(std::int64_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "oracle needs at least two samples");
}
}  // namespace

double gumbel_marginal_cdf(double x, double variance) { return std::exp(-std::exp(0.5 * variance - x)); }

OracleEstimate cdf_mc(std::span<const double> x, const GaussianDesign& design, std::int64_t n, Stream& rng) {
  check_point(x, design);
  check_samples(n);
  const int d = design.dim();
  std::vector<double> shift(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) shift[static_cast<std::size_t>(i)] = design.mu()[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
  std::vector<double> xs(static_cast<std::size_t>(d));
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    design.sample_into(rng, xs);
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) top = std::max(top, xs[static_cast<std::size_t>(i)] + shift[static_cast<std::size_t>(i)]);
    const double y = std::exp(top);
    const double delta = y - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (y - mean);
  }
  const double f = std::exp(-mean);
  const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
  return {f, f * sd / std::sqrt(static_cast<double>(n)), n};
}

Stencil mixed_difference_stencil(std::span<const double> x, double h) {
  const std::size_t d = x.size();
  if (d > 4) throw Error(ErrorCode::StencilTooLarge, "mixed-difference stencil limited to d <= 4");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "stencil step must be positive");
  Stencil s;
  const std::size_t corners = std::size_t{1} << d;
  const double scale = std::pow(h, -static_cast<double>(d));
  for (std::size_t c = 0; c < corners; ++c) {
    std::vector<double> point(x.begin(), x.end());
    double sign = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const bool up = (c >> i) & 1U;
      point[i] += up ? 0.5 * h : -0.5 * h;
      if (!up) sign = -sign;
    }
    s.corners.push_back(std::move(point));
    s.weights.push_back(sign * scale);
  }
  return s;
}

double apply_stencil(const Stencil& stencil, std::span<const double> corner_values) {
  double total = 0.0;
  for (std::size_t c = 0; c < stencil.weights.size(); ++c) total += stencil.weights[c] * corner_values[c];
  return total;
}

OracleEstimate density_fd(std::span<const double> x, const GaussianDesign& design, double h, std::int64_t n,
                          Stream& rng) {
  check_point(x, design);
  check_samples(n);
  const Stencil stencil = mixed_difference_stencil(x, h);
  const std::size_t d = x.size();
  const std::size_t corners = stencil.corners.size();

  // Y_c = max_i exp(X_i + mu_i - corner_ci), every corner from the same draw.
  std::vector<double> xs(d);
  std::vector<double> y(corners);
  auto corner_values = [&](Stream& s) {
    design.sample_into(s, xs);
    for (std::size_t c = 0; c < corners; ++c) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < d; ++i) {
        top = std::max(top, xs[i] + design.mu()[i] - stencil.corners[c][i]);
      }
      y[c] = std::exp(top);
    }
  };

  const Stream replay = rng;
  std::vector<double> mean(corners, 0.0);
  for (std::int64_t j = 0; j < n; ++j) {
    corner_values(rng);
    for (std::size_t c = 0; c < corners; ++c) mean[c] += y[c];
  }
  std::vector<double> cdf(corners);
  for (std::size_t c = 0; c < corners; ++c) {
    mean[c] /= static_cast<double>(n);
    cdf[c] = std::exp(-mean[c]);
  }
  const double value = apply_stencil(stencil, cdf);

  // Linearization: value - truth ~ mean_j Z_j, Z_j = -sum_c w_c F_c (Y_jc - m_c).
  Stream second = replay;
  double z_m2 = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    corner_values(second);
    double z = 0.0;
    for (std::size_t c = 0; c < corners; ++c) z -= stencil.weights[c] * cdf[c] * (y[c] - mean[c]);
    z_m2 += z * z;
  }
  const double se = std::sqrt(z_m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return {value, se, n};
}

FiniteLevelEstimate finite_level_density(std::span<const double> x, const GaussianDesign& design,
                                         std::int64_t n_trunc, std::int64_t n_samples, Stream& rng) {
  check_point(x, design);
  check_samples(n_samples);
  if (n_trunc < 1) throw Error(ErrorCode::InvalidArgument, "truncation level must be >= 1");
  const int d = design.dim();
  const KernelConstants k = KernelConstants::make(d);
  const auto du = static_cast<std::size_t>(d);

  std::vector<double> xs(du);
  std::vector<double> m(du);
  std::vector<double> score(du);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_samples));
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t j = 0; j < n_samples; ++j) {
    std::fill(m.begin(), m.end(), -std::numeric_limits<double>::infinity());
    std::fill(score.begin(), score.end(), 0.0);
    double arrival = 0.0;
    for (std::int64_t t = 0; t < n_trunc; ++t) {
      arrival += rng.exponential();
      design.sample_into(rng, xs);
      const double shift = -std::log(arrival);
      for (std::size_t i = 0; i < du; ++i) {
        score[i] += xs[i];
        m[i] = std::max(m[i], shift + xs[i] + design.mu()[i]);
      }
    }
    score = design.precision_apply(score);
    std::vector<double> diff(du);
    for (std::size_t i = 0; i < du; ++i) diff[i] = x[i] - m[i];
    double v = 0.0;
    for (int i = 0; i < d; ++i) v -= kernel_gradient(diff, i, k) * score[static_cast<std::size_t>(i)];
    values.push_back(v);
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }

  FiniteLevelEstimate out;
  out.value = mean;
  out.std_err = std::sqrt(m2 / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples));
  out.n = n_samples;
  std::sort(values.begin(), values.end());
  const std::size_t trim = values.size() / 200;
  double trimmed = 0.0;
  for (std::size_t i = trim; i < values.size() - trim; ++i) trimmed += values[i];
  out.trimmed_mean = trimmed / static_cast<double>(values.size() - 2 * trim);
  return out;
}

}  // namespace maxstable
