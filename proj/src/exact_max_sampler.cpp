#include "maxstable/exact_max_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxstable/error.hpp"

namespace maxstable {

SamplerParams SamplerParams::make(const GaussianDesign& design, double a, double gamma) {
  return {make_record_params(a, design), cramer_root(gamma)};
}

std::int64_t compute_n_a(double a1, double x1_supnorm, double a, double gamma) {
  if (!(a > 0.0 && a < 1.0) || !(gamma > 0.0) || !(a1 >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "compute_n_a: need 0<a<1, gamma>0, A_1>=0");
  }
  if (a1 == 0.0) return 1;
  const double log_bound = (std::log(a1 / gamma) + x1_supnorm) / (1.0 - a);
  if (log_bound > 43.0) throw Error(ErrorCode::Overflow, "N_a does not fit in 64 bits");
  double bound = std::ceil(std::exp(log_bound));
  auto holds = [&](double n) { return n * gamma >= a1 * std::pow(n, a) * std::exp(x1_supnorm); };
  auto n_a = std::max<std::int64_t>(1, static_cast<std::int64_t>(bound));
  // Guard the rounding of exp/pow at the boundary; n^(1-a) is increasing so
  // checking the first index past N_a suffices.
  while (!holds(static_cast<double>(n_a + 1))) ++n_a;
  return n_a;
}

void algorithm_m(const GaussianDesign& design, const SamplerParams& params, Stream& rng, ExactSample& out) {
  const int d = design.dim();
  const double a = params.record.a;
  const double gamma = params.tilt.gamma;

  WalkPath walk = algorithm_s(0, params.tilt, rng);
  RecordOutput rec = algorithm_x(params.record, design, 0, rng);

  out.n_walk = walk.n_s;
  out.n_x = rec.n_x;
  out.n_a = compute_n_a(walk.a[1], sup_norm(rec.x[0]), a, gamma);
  out.n = std::max({out.n_walk, out.n_x, out.n_a});

  if (out.n > out.n_walk) extend_without_record_s(walk, out.n - out.n_walk, params.tilt, rng);
  if (out.n > out.n_x) extend_without_record_x(rec, out.n - out.n_x, params.record, design, rng);
  out.cost = walk.cost + rec.cost;

  out.a.assign(walk.a.begin() + 1, walk.a.end());
  out.x = std::move(rec.x);

  out.m.assign(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
  const auto mu = design.mu();
  for (std::size_t k = 0; k < static_cast<std::size_t>(out.n); ++k) {
    const double shift = -std::log(out.a[k]);
    const auto row = out.x[k];
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
      out.m[i] = std::max(out.m[i], shift + row[i] + mu[i]);
    }
  }
}

ExactSample algorithm_m(const GaussianDesign& design, const SamplerParams& params, Stream& rng) {
  ExactSample out;
  algorithm_m(design, params, rng, out);
  return out;
}

std::vector<double> continuation_max(const ExactSample& sample, std::int64_t extra,
                                     const GaussianDesign& design, const SamplerParams& params,
                                     Stream& rng) {
  const int d = design.dim();
  std::vector<double> m(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
  if (extra <= 0) return m;
  const WalkState end{sample.n, sample.a.back()};
  const WalkSegment walk = sample_without_record_s(end, extra, params.tilt, rng);
  const ConditionedBlock block = sample_without_record_x(sample.n, extra, params.record, design, rng);
  const auto mu = design.mu();
  for (std::size_t k = 0; k < static_cast<std::size_t>(extra); ++k) {
    const double shift = -std::log(walk.a_values[k]);
    const auto row = block.x[k];
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
      m[i] = std::max(m[i], shift + row[i] + mu[i]);
    }
  }
  return m;
}

}  // namespace maxstable
