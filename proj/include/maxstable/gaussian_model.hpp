#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "maxstable/random.hpp"

namespace maxstable {

// Where the covariance of the underlying Gaussian field comes from: either a
// Brownian motion observed on a grid (Sigma_ij = min(t_i, t_j)) or an explicit
// symmetric positive definite matrix.
struct CovarianceSpec {
  enum class Kind { brownian, explicit_matrix };

  Kind kind = Kind::brownian;
  std::vector<double> grid;       // brownian: strictly increasing, > 0
  Eigen::MatrixXd matrix;         // explicit_matrix
  std::vector<double> mu;         // per-location drift; empty means zero

  static CovarianceSpec brownian(std::vector<double> grid, std::vector<double> mu = {});
  static CovarianceSpec explicit_matrix(Eigen::MatrixXd matrix, std::vector<double> mu = {});
};

// A realization X(t_1..t_d) with its sup-norm cached.
struct GaussianVector {
  std::vector<double> values;
  double sup_norm = 0.0;

  GaussianVector() = default;
  explicit GaussianVector(std::vector<double> v);
  std::size_t size() const noexcept { return values.size(); }
};

double sup_norm(std::span<const double> v) noexcept;

// Immutable finite-dimensional Gaussian design: covariance, its Cholesky
// factor, marginal scales and drift. Safe to share across threads.
class GaussianDesign {
 public:
  static GaussianDesign build(const CovarianceSpec& spec);

  int dim() const noexcept { return d_; }
  const Eigen::MatrixXd& covariance() const noexcept { return sigma_; }
  const Eigen::MatrixXd& chol() const noexcept { return chol_; }
  double sigma(int i) const noexcept { return sigma_diag_[static_cast<std::size_t>(i)]; }
  std::span<const double> sigma_diag() const noexcept { return sigma_diag_; }
  double sigma_bar() const noexcept { return sigma_bar_; }
  std::span<const double> mu() const noexcept { return mu_; }

  /// Writes chol * z (z i.i.d. standard normal) into out; mean zero.
  void sample_into(Stream& rng, std::span<double> out) const;
  GaussianVector sample(Stream& rng) const;

  /// Sigma^{-1} v through two triangular solves against the factor.
  std::vector<double> precision_apply(std::span<const double> v) const;

  /// w^j(t_i) = Sigma_ij / Sigma_jj, the regression of X(t_i) on X(t_j).
  double regression_weight(int i, int j) const noexcept {
    return regression_(i, j);
  }

 private:
  GaussianDesign() = default;

  int d_ = 0;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd regression_;
  std::vector<double> sigma_diag_;
  double sigma_bar_ = 0.0;
  std::vector<double> mu_;
};

// Two-sided exceedance probability P(|X(t_i)| > c) at every location.
std::vector<double> exceedance_probabilities(const GaussianDesign& design, double c);

struct ExceedanceDraw {
  GaussianVector x;
  int index = 0;  // the location nu that was forced past the threshold
};

/// Draws from the measure P^(n) whose density with respect to the Gaussian
/// law is proportional to the number of coordinates with |x(t_i)| > c: pick a
/// location with probability proportional to its exceedance probability, draw
/// that coordinate from its two-sided tail, then fill the rest from the
/// conditional Gaussian given that coordinate. Consumes four elementary
/// variables (location, sign, tail uniform, fresh field).
ExceedanceDraw sample_exceedance(const GaussianDesign& design, double c, Stream& rng);

/// dP/dP^(n)(x) = sum_i P(|X(t_i)| > c) / #{i : |x(t_i)| > c}.
/// Throws ErrorCode::NoExceedance when no coordinate exceeds c.
double density_ratio_p_over_pn(const GaussianDesign& design, std::span<const double> x, double c);

}  // namespace maxstable
