#include "maxstable/schedule_tables.hpp"

#include <cmath>
#include <limits>

#include "maxstable/error.hpp"

namespace maxstable {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ThresholdNonPositive: return "ThresholdNonPositive";
    case ErrorCode::NoExceedance: return "NoExceedance";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::EmptyBudget: return "EmptyBudget";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::StencilTooLarge: return "StencilTooLarge";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace normal {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Acklam's rational approximation to the lower-tail quantile
// (relative error about 1.15e-9 before refinement).
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// One Halley step on F(x) = target where F is cdf (lower) or sf (upper).
double halley_lower(double x, double p) {
  const double e = cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}
}  // namespace

double pdf(double x) noexcept { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::DomainError, "normal quantile needs p in (0,1)");
  }
  // Refine against whichever tail carries the precision.
  if (p > 0.5) return quantile_upper(1.0 - p);
  return halley_lower(acklam(p), p);
}

double quantile_upper(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    if (q == 1.0) return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::DomainError, "normal upper quantile needs q in (0,1)");
  }
  // sf(x) = cdf(-x), so the upper quantile is the mirrored lower one.
  return -halley_lower(acklam(q), q);
}

}  // namespace normal

double unit_ball_volume(int d) {
  if (d < 1) throw Error(ErrorCode::DomainError, "unit ball needs d >= 1");
  const double half = 0.5 * d;
  return std::pow(M_PI, half) / std::tgamma(half + 1.0);
}

double delta_seq(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "delta_seq needs n >= 1");
  // log(n + e^e) = e + log1p(n / e^e)
  const double l1 = kE + std::log1p(static_cast<double>(n) / kEE);
  return 1.0 / std::log(std::log(l1));
}

double g_tail(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "g_tail needs n >= 1");
  const double m = static_cast<double>(n - 1);
  // log(n + e - 1) = 1 + log1p((n-1)/e); log(n + e^e - 1) = e + log1p((n-1)/e^e)
  const double l1 = 1.0 + std::log1p(m / kE);
  const double l2 = std::log1p(std::log1p(m / kEE) / kE);  // log(l/e) where l = log(n+e^e-1)
  return 1.0 / (static_cast<double>(n) * l1 * (1.0 + l2));
}

double triple_log_rate(double b) {
  if (!(b > kEE)) {
    throw Error(ErrorCode::BudgetTooSmall, "rate factor needs budget > e^e");
  }
  return std::sqrt(std::log(std::log(std::log(b))) / b);
}

}  // namespace maxstable
