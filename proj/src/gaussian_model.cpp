#include "maxstable/gaussian_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxstable/error.hpp"
#include "maxstable/schedule_tables.hpp"

namespace maxstable {

CovarianceSpec CovarianceSpec::brownian(std::vector<double> grid, std::vector<double> mu) {
  CovarianceSpec spec;
  spec.kind = Kind::brownian;
  spec.grid = std::move(grid);
  spec.mu = std::move(mu);
  return spec;
}

CovarianceSpec CovarianceSpec::explicit_matrix(Eigen::MatrixXd matrix, std::vector<double> mu) {
  CovarianceSpec spec;
  spec.kind = Kind::explicit_matrix;
  spec.matrix = std::move(matrix);
  spec.mu = std::move(mu);
  return spec;
}

double sup_norm(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

GaussianVector::GaussianVector(std::vector<double> v) : values(std::move(v)) {
  sup_norm = maxstable::sup_norm(values);
}

GaussianDesign GaussianDesign::build(const CovarianceSpec& spec) {
  GaussianDesign design;
  if (spec.kind == CovarianceSpec::Kind::brownian) {
    const auto& t = spec.grid;
    if (t.empty()) throw Error(ErrorCode::BadGrid, "empty Brownian grid");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] > 0.0) || !std::isfinite(t[i])) {
        throw Error(ErrorCode::BadGrid, "Brownian grid points must be finite and > 0");
      }
      if (i > 0 && !(t[i] > t[i - 1])) {
        throw Error(ErrorCode::BadGrid, "Brownian grid must be strictly increasing");
      }
    }
    const auto d = static_cast<Eigen::Index>(t.size());
    design.sigma_.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        design.sigma_(i, j) = std::min(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]);
      }
    }
  } else {
    const auto& m = spec.matrix;
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "covariance matrix must be square and non-empty");
    }
    if (!m.allFinite()) throw Error(ErrorCode::NonPositiveDefinite, "covariance has non-finite entries");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw Error(ErrorCode::NonPositiveDefinite, "covariance matrix is not symmetric");
    }
    design.sigma_ = 0.5 * (m + m.transpose());
  }

  design.d_ = static_cast<int>(design.sigma_.rows());
  design.llt_.compute(design.sigma_);
  if (design.llt_.info() != Eigen::Success) {
    throw Error(ErrorCode::NonPositiveDefinite, "Cholesky factorization failed");
  }
  design.chol_ = design.llt_.matrixL();
  if (!design.chol_.allFinite() || (design.chol_.diagonal().array() <= 0.0).any()) {
    throw Error(ErrorCode::NonPositiveDefinite, "Cholesky factor is singular");
  }

  const auto d = static_cast<std::size_t>(design.d_);
  design.sigma_diag_.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    design.sigma_diag_[i] = std::sqrt(design.sigma_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
  }
  design.sigma_bar_ = *std::max_element(design.sigma_diag_.begin(), design.sigma_diag_.end());

  design.regression_.resize(design.d_, design.d_);
  for (int i = 0; i < design.d_; ++i) {
    for (int j = 0; j < design.d_; ++j) design.regression_(i, j) = design.sigma_(i, j) / design.sigma_(j, j);
  }

  if (spec.mu.empty()) {
    design.mu_.assign(d, 0.0);
  } else if (spec.mu.size() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "drift has " + std::to_string(spec.mu.size()) + " entries, expected " + std::to_string(d));
  } else {
    design.mu_ = spec.mu;
  }
  return design;
}

void GaussianDesign::sample_into(Stream& rng, std::span<double> out) const {
  // out = L z with L lower triangular; z is drawn into out first and the
  // product is formed from the bottom row up so it can be done in place.
  const int d = d_;
  for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] = rng.normal();
  const double* l = chol_.data();  // column-major
  for (int i = d - 1; i >= 0; --i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) acc += l[i + j * d] * out[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
}

GaussianVector GaussianDesign::sample(Stream& rng) const {
  std::vector<double> v(static_cast<std::size_t>(d_));
  sample_into(rng, v);
  return GaussianVector(std::move(v));
}

std::vector<double> GaussianDesign::precision_apply(std::span<const double> v) const {
  if (v.size() != static_cast<std::size_t>(d_)) {
    throw Error(ErrorCode::DimensionMismatch, "precision_apply: vector length differs from design dimension");
  }
  Eigen::Map<const Eigen::VectorXd> in(v.data(), d_);
  Eigen::VectorXd out = llt_.solve(in);
  return {out.data(), out.data() + d_};
}

std::vector<double> exceedance_probabilities(const GaussianDesign& design, double c) {
  std::vector<double> p(static_cast<std::size_t>(design.dim()));
  for (int i = 0; i < design.dim(); ++i) {
    p[static_cast<std::size_t>(i)] = 2.0 * normal::sf(c / design.sigma(i));
  }
  return p;
}

ExceedanceDraw sample_exceedance(const GaussianDesign& design, double c, Stream& rng) {
  if (!(c > 0.0)) throw Error(ErrorCode::ThresholdNonPositive, "exceedance threshold must be > 0");
  const int d = design.dim();

  // Pick nu in proportion to P(|X(t_j)| > c). Work relative to the largest
  // tail so deep thresholds do not underflow to an all-zero mass vector.
  std::vector<double> z(static_cast<std::size_t>(d));
  double zmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    z[static_cast<std::size_t>(j)] = c / design.sigma(j);
    zmin = std::min(zmin, z[static_cast<std::size_t>(j)]);
  }
  const double top = normal::sf(zmin);
  std::vector<double> mass(static_cast<std::size_t>(d));
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    const double zj = z[static_cast<std::size_t>(j)];
    // sf(zj)/sf(zmin), computed through logs when sf underflows.
    double w = top > 0.0 ? normal::sf(zj) / top : std::exp(-0.5 * (zj * zj - zmin * zmin)) * zmin / zj;
    mass[static_cast<std::size_t>(j)] = w;
    total += w;
  }
  int nu = d - 1;
  {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      acc += mass[static_cast<std::size_t>(j)];
      if (u < acc) {
        nu = j;
        break;
      }
    }
  }

  const int sign = rng.sign();
  const double u = rng.uniform();
  // sigma * Phi^{-1}(U + (1-U) Phi(z)) written through the upper tail:
  // 1 - (U + (1-U) Phi(z)) = (1-U) * sf(z).
  const double znu = z[static_cast<std::size_t>(nu)];
  double tail = normal::quantile_upper((1.0 - u) * normal::sf(znu));
  if (!(tail > znu)) tail = std::nextafter(znu, std::numeric_limits<double>::infinity());
  const double x_nu = design.sigma(nu) * sign * tail;

  std::vector<double> y(static_cast<std::size_t>(d));
  design.sample_into(rng, y);
  const double y_nu = y[static_cast<std::size_t>(nu)];
  for (int i = 0; i < d; ++i) {
    y[static_cast<std::size_t>(i)] += design.regression_weight(i, nu) * (x_nu - y_nu);
  }
  y[static_cast<std::size_t>(nu)] = x_nu;  // exact, regression weight is 1 here
  return {GaussianVector(std::move(y)), nu};
}

double density_ratio_p_over_pn(const GaussianDesign& design, std::span<const double> x, double c) {
  if (!(c > 0.0)) throw Error(ErrorCode::ThresholdNonPositive, "exceedance threshold must be > 0");
  if (x.size() != static_cast<std::size_t>(design.dim())) {
    throw Error(ErrorCode::DimensionMismatch, "density ratio: vector length differs from design dimension");
  }
  int count = 0;
  double mass = 0.0;
  for (int i = 0; i < design.dim(); ++i) {
    if (std::abs(x[static_cast<std::size_t>(i)]) > c) ++count;
    mass += 2.0 * normal::sf(c / design.sigma(i));
  }
  if (count == 0) throw Error(ErrorCode::NoExceedance, "no coordinate exceeds the threshold");
  return mass / count;
}

}  // namespace maxstable
