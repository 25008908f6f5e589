#pragma once

#include <cstdint>
#include <vector>

#include "maxstable/field_sequence.hpp"
#include "maxstable/gaussian_model.hpp"
#include "maxstable/random.hpp"
#include "maxstable/record_sampler.hpp"
#include "maxstable/walk_sampler.hpp"

namespace maxstable {

// Everything the exact sampler needs besides the design.
struct SamplerParams {
  RecordParams record;
  TiltParams tilt;

  static SamplerParams make(const GaussianDesign& design, double a = 0.5, double gamma = 0.5);
};

// One exact draw of M(t_1..t_d) = sup_n {-log A_n + X_n(t_i) + mu(t_i)}
// together with the first N generating variables, beyond which no term can
// attain the supremum.
struct ExactSample {
  std::vector<double> m;
  FieldSequence x;        // X_1..X_N
  std::vector<double> a;  // A_1..A_N
  std::int64_t n = 0;
  std::int64_t n_a = 0;
  std::int64_t n_x = 0;
  std::int64_t n_walk = 0;
  std::int64_t cost = 0;  // elementary variables, rejected proposals included
};

/// Smallest N_a >= 1 such that n*gamma >= A_1 n^a exp(||X_1||) for every
/// n > N_a, i.e. ceil(((A_1/gamma) exp(||X_1||))^(1/(1-a))).
std::int64_t compute_n_a(double a1, double x1_supnorm, double a, double gamma);

/// Exact sampler: last passage of the arrival walk, last record of the
/// Gaussian sequence, N = max(N_A, N_X, N_a), conditioned extension of the
/// shorter sequence, then the componentwise max. `out` is overwritten; its
/// buffers are reused across calls.
void algorithm_m(const GaussianDesign& design, const SamplerParams& params, Stream& rng, ExactSample& out);
ExactSample algorithm_m(const GaussianDesign& design, const SamplerParams& params, Stream& rng);

inline std::int64_t cost_of(const ExactSample& sample) noexcept { return sample.cost; }

/// Componentwise max over indices N+1..N+extra drawn from the conditioned
/// continuation of both sequences (arrival walk stays below gamma*n, no
/// further records). Each entry must not exceed sample.m.
std::vector<double> continuation_max(const ExactSample& sample, std::int64_t extra,
                                     const GaussianDesign& design, const SamplerParams& params,
                                     Stream& rng);

}  // namespace maxstable
