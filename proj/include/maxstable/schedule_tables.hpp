#pragma once

#include <cstdint>

namespace maxstable {

// Standard normal primitives. Tail functions keep full relative precision
// far into the tails, so the Gaussian exceedance machinery can work with
// thresholds of 8-10 standard deviations.
namespace normal {

inline constexpr double kSqrt2Pi = 2.50662827463100050242;

double pdf(double x) noexcept;
double cdf(double x) noexcept;
// Upper tail 1 - cdf(x), accurate when cdf(x) rounds to 1.
double sf(double x) noexcept;
// Inverse of cdf on (0, 1). Rational approximation refined by one Halley
// step against erfc; relative error well below 1e-12.
double quantile(double p);
// Inverse of sf on (0, 1): sf(quantile_upper(q)) == q.
double quantile_upper(double q);

}  // namespace normal

inline constexpr double kE = 2.71828182845904523536;
inline constexpr double kEE = 15.1542622414792641898;  // e^e

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// Perturbation sequence 1 / log log log(n + e^e), strictly decreasing to 0.
double delta_seq(std::int64_t n);

/// Tail of the randomized level: P(L >= n) =
/// 1 / (n * log(n + e - 1) * log log(n + e^e - 1)), with g_tail(1) == 1.
double g_tail(std::int64_t n);

/// Confidence-interval rate sqrt(log log log(b) / b); throws
/// ErrorCode::BudgetTooSmall when b <= e^e.
double triple_log_rate(double b);

}  // namespace maxstable
