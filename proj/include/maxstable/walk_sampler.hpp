#pragma once

#include <cstdint>
#include <vector>

#include "maxstable/random.hpp"

namespace maxstable {

// Exponential tilt of the walk S_n = gamma*n - A_n with Exp(1) arrival gaps.
// theta > 0 solves E exp(theta S_1) = exp(theta gamma)/(1 + theta) = 1; under
// the tilted law the gaps are Exp(1 + theta) and the walk drifts upward.
struct TiltParams {
  double gamma = 0.5;
  double theta = 0.0;
  double tilted_rate = 1.0;  // 1 + theta

  double tilted_drift() const noexcept { return gamma - 1.0 / tilted_rate; }
};

/// Throws ErrorCode::NoRoot unless 0 < gamma < 1.
TiltParams cramer_root(double gamma);

// Position of the walk: index n and arrival time A_n, with S_n = gamma*n - A_n.
// Keeping A as the primary coordinate makes "S_n < 0" and "A_n > gamma*n" the
// same floating-point predicate.
struct WalkState {
  std::int64_t index = 0;
  double arrival = 0.0;

  double position(double gamma) const noexcept {
    return gamma * static_cast<double>(index) - arrival;
  }
  /// A state at index 0 whose position is exactly x.
  static WalkState at_position(double x) noexcept { return {0, -x}; }
};

enum class SegmentStatus { downcrossing, upcrossing, degenerate, plain };

// Steps S_{m+1}, S_{m+2}, ... following a start state at index m. a_values are
// the matching arrival times on the same clock as the start state, and
// s_values[j] == gamma*(m+j+1) - a_values[j] exactly.
struct WalkSegment {
  WalkState start;
  std::vector<double> s_values;
  std::vector<double> a_values;
  SegmentStatus status = SegmentStatus::plain;
  std::int64_t cost = 0;  // elementary variables consumed, rejected work included

  bool degenerate() const noexcept { return status == SegmentStatus::degenerate; }
  WalkState end() const noexcept;
};

/// Steps under the plain law from a state at position >= 0 until the first
/// negative position.
WalkSegment sample_downcrossing(WalkState start, double gamma, Stream& rng);

/// For a start at position x < 0: returns the path up to the first
/// nonnegative position with probability P_x(tau+ < infinity), otherwise a
/// degenerate segment. Proposals run under the tilted law and are accepted
/// with probability exp(-theta (S_tau - x)).
WalkSegment sample_upcrossing(WalkState start, const TiltParams& tilt, Stream& rng);

/// k steps with gaps Exp(rate); rate 1 is the plain law, rate 1+theta the
/// tilted one.
WalkSegment sample_steps(WalkState start, std::int64_t k, double gamma, double rate, Stream& rng);

/// ell steps from position x < 0 conditioned on never returning to [0, inf).
WalkSegment sample_without_record_s(WalkState start, std::int64_t ell, const TiltParams& tilt,
                                    Stream& rng);

// Full walk S_0..S_{N_S+ell} with S_0 = 0, A_0 = 0 stored at index 0.
struct WalkPath {
  std::vector<double> s;
  std::vector<double> a;
  std::int64_t n_s = 0;  // position is negative at n_s and every later index
  std::int64_t cost = 0;

  WalkState end() const noexcept {
    return {static_cast<std::int64_t>(a.size()) - 1, a.back()};
  }
};

/// Alternates downcrossings and upcrossings from S_0 = 0 until an upcrossing is
/// degenerate. n_s is the index ending the final downcrossing, so every later
/// position is negative (equivalently A_n > gamma*n). With ell > 0 the path is
/// extended by ell steps drawn conditionally on that event.
WalkPath algorithm_s(std::int64_t ell, const TiltParams& tilt, Stream& rng);

/// Appends ell conditioned steps to an existing path.
void extend_without_record_s(WalkPath& path, std::int64_t ell, const TiltParams& tilt, Stream& rng);

}  // namespace maxstable
