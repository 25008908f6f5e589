#include "maxstable/walk_sampler.hpp"

#include <cmath>

#include "maxstable/error.hpp"

namespace maxstable {

namespace {
constexpr std::int64_t kMaxSteps = 1'000'000'000;
constexpr std::int64_t kMaxAttempts = 10'000'000;

// exp(theta*gamma) - 1 - theta, accurate for small theta.
double cramer_residual(double theta, double gamma) { return std::expm1(theta * gamma) - theta; }

void push_step(WalkSegment& seg, WalkState& state, double gap, double gamma) {
  state.index += 1;
  state.arrival += gap;
  seg.a_values.push_back(state.arrival);
  seg.s_values.push_back(state.position(gamma));
}
}  // namespace

TiltParams cramer_root(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::NoRoot, "Cramer root exists only for 0 < gamma < 1");
  }
  // The residual is convex, zero at 0, negative just after 0 and eventually
  // positive: bracket the positive root and bisect.
  double lo = 0.0;
  double hi = 1.0;
  while (cramer_residual(hi, gamma) <= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cramer_residual(mid, gamma) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double f = cramer_residual(theta, gamma);
    const double df = gamma * std::exp(theta * gamma) - 1.0;
    if (df <= 0.0) break;
    const double next = theta - f / df;
    if (!(next > lo && next < hi)) break;
    theta = next;
  }
  return {gamma, theta, 1.0 + theta};
}

WalkState WalkSegment::end() const noexcept {
  if (a_values.empty()) return start;
  return {start.index + static_cast<std::int64_t>(a_values.size()), a_values.back()};
}

WalkSegment sample_downcrossing(WalkState start, double gamma, Stream& rng) {
  WalkSegment seg;
  seg.start = start;
  seg.status = SegmentStatus::downcrossing;
  WalkState state = start;
  for (std::int64_t step = 0;; ++step) {
    if (step >= kMaxSteps) throw Error(ErrorCode::NonTermination, "downcrossing exceeded step cap");
    push_step(seg, state, rng.exponential(), gamma);
    ++seg.cost;
    if (seg.s_values.back() < 0.0) return seg;
  }
}

WalkSegment sample_upcrossing(WalkState start, const TiltParams& tilt, Stream& rng) {
  WalkSegment seg;
  seg.start = start;
  const double x = start.position(tilt.gamma);
  // Drawing U before the path leaves the law unchanged. Since S_tau >= 0 > x,
  // acceptance needs U <= exp(theta x); if that already fails the tilted path
  // would be discarded whatever it is, so it is not simulated.
  const double u = rng.uniform();
  ++seg.cost;
  if (!(u <= std::exp(tilt.theta * x))) {
    seg.status = SegmentStatus::degenerate;
    return seg;
  }
  WalkState state = start;
  for (std::int64_t step = 0;; ++step) {
    if (step >= kMaxSteps) throw Error(ErrorCode::NonTermination, "tilted upcrossing exceeded step cap");
    push_step(seg, state, rng.exponential() / tilt.tilted_rate, tilt.gamma);
    ++seg.cost;
    if (seg.s_values.back() >= 0.0) break;
  }
  const double weight = std::exp(-tilt.theta * (seg.s_values.back() - x));
  if (u <= weight) {
    seg.status = SegmentStatus::upcrossing;
  } else {
    seg.status = SegmentStatus::degenerate;
    seg.s_values.clear();
    seg.a_values.clear();
  }
  return seg;
}

WalkSegment sample_steps(WalkState start, std::int64_t k, double gamma, double rate, Stream& rng) {
  WalkSegment seg;
  seg.start = start;
  seg.status = SegmentStatus::plain;
  seg.s_values.reserve(static_cast<std::size_t>(k));
  seg.a_values.reserve(static_cast<std::size_t>(k));
  WalkState state = start;
  for (std::int64_t i = 0; i < k; ++i) push_step(seg, state, rng.exponential() / rate, gamma);
  seg.cost = k;
  return seg;
}

WalkSegment sample_without_record_s(WalkState start, std::int64_t ell, const TiltParams& tilt,
                                    Stream& rng) {
  if (ell < 1) throw Error(ErrorCode::InvalidArgument, "sample_without_record_s needs ell >= 1");
  if (!(start.position(tilt.gamma) < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sample_without_record_s needs a negative start");
  }
  WalkSegment seg;
  seg.start = start;
  seg.status = SegmentStatus::plain;
  seg.s_values.reserve(static_cast<std::size_t>(ell));
  seg.a_values.reserve(static_cast<std::size_t>(ell));
  for (std::int64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    seg.s_values.clear();
    seg.a_values.clear();
    WalkState state = start;
    bool stayed_negative = true;
    // A step reaching [0, inf) already dooms the attempt; stop drawing there.
    for (std::int64_t i = 0; i < ell; ++i) {
      push_step(seg, state, rng.exponential(), tilt.gamma);
      ++seg.cost;
      if (seg.s_values.back() >= 0.0) {
        stayed_negative = false;
        break;
      }
    }
    if (!stayed_negative) continue;
    const WalkSegment probe = sample_upcrossing(state, tilt, rng);
    seg.cost += probe.cost;
    if (probe.degenerate()) return seg;
  }
  throw Error(ErrorCode::NonTermination, "sample_without_record_s exceeded attempt cap");
}

namespace {
void append_segment(WalkPath& path, const WalkSegment& seg) {
  path.s.insert(path.s.end(), seg.s_values.begin(), seg.s_values.end());
  path.a.insert(path.a.end(), seg.a_values.begin(), seg.a_values.end());
  path.cost += seg.cost;
}
}  // namespace

void extend_without_record_s(WalkPath& path, std::int64_t ell, const TiltParams& tilt, Stream& rng) {
  if (ell <= 0) return;
  append_segment(path, sample_without_record_s(path.end(), ell, tilt, rng));
}

WalkPath algorithm_s(std::int64_t ell, const TiltParams& tilt, Stream& rng) {
  WalkPath path;
  path.s.push_back(0.0);
  path.a.push_back(0.0);
  for (;;) {
    append_segment(path, sample_downcrossing(path.end(), tilt.gamma, rng));
    const WalkSegment up = sample_upcrossing(path.end(), tilt, rng);
    path.cost += up.cost;
    if (up.degenerate()) break;
    append_segment(path, up);
  }
  path.n_s = static_cast<std::int64_t>(path.s.size()) - 1;
  extend_without_record_s(path, ell, tilt, rng);
  return path;
}

}  // namespace maxstable
