#pragma once

#include <cmath>
#include <cstdint>

#include "maxstable/field_sequence.hpp"
#include "maxstable/gaussian_model.hpp"
#include "maxstable/random.hpp"

namespace maxstable {

// Parameters of the record-breaking scheme: index n is a record when
// ||X_n||_inf > a log n. n0 is the burn-in index after which the proposal
// law g_{n0} dominates the record-time law.
struct RecordParams {
  double a = 0.5;
  std::int64_t n0 = 2;
  double sigma_bar = 1.0;
  int d = 1;
};

/// Smallest n0 >= 2 with
///   d * sf(a log n0 / sigma_bar - sigma_bar / a)
///     <= (1/2) sqrt(pi/2) * pdf(sigma_bar / a) / (sigma_bar / a).
std::int64_t choose_n0(double a, double sigma_bar, int d);

/// Both sides of the n0 inequality hold at this n0.
bool n0_condition_holds(std::int64_t n0, double a, double sigma_bar, int d);

/// Record parameters for a design, with n0 from choose_n0 unless given.
/// Throws ErrorCode::InvalidArgument unless 0 < a < 1 and n0 is admissible.
RecordParams make_record_params(double a, const GaussianDesign& design, std::int64_t n0 = 0);

/// Probability mass g_{n0}(k), k >= 1: the integral of
/// pdf(a log(n0 + s) / sigma_bar) over [k-1, k] (adaptive quadrature)
/// normalized by its integral over [0, inf) (closed form).
double g_n0_pmf(std::int64_t k, const RecordParams& params);

/// Inverse-transform sample of K ~ g_{n0} from a uniform u in (0, 1).
std::int64_t K_from_uniform(double u, const RecordParams& params);
std::int64_t sample_K(const RecordParams& params, Stream& rng);

struct RecordSegment {
  FieldSequence x;  // X_1..X_K relative to the starting index n1
  bool degenerate = true;
  std::int64_t cost = 0;
};

/// Samples (X_1, ..., X_T) where T = inf{k >= 1 : ||X_k|| > a log(n1 + k)},
/// or reports degenerate with probability P(T = infinity). Requires n1 >= n0.
RecordSegment sample_single_record(const RecordParams& params, std::int64_t n1,
                                   const GaussianDesign& design, Stream& rng);

struct ConditionedBlock {
  FieldSequence x;
  std::int64_t cost = 0;
};

/// ell vectors distributed as (X_1..X_ell) given that no index after n1 is a
/// record. Requires n1 >= 1.
ConditionedBlock sample_without_record_x(std::int64_t n1, std::int64_t ell, const RecordParams& params,
                                         const GaussianDesign& design, Stream& rng);

struct RecordOutput {
  FieldSequence x;  // X_1..X_{n_x + ell}
  std::int64_t n_x = 0;
  std::int64_t cost = 0;
};

/// n0 unconditional vectors, then single-record segments until one is
/// degenerate; n_x is the last record index (or n0). ell > 0 appends
/// conditioned vectors.
RecordOutput algorithm_x(const RecordParams& params, const GaussianDesign& design, std::int64_t ell,
                         Stream& rng);

/// Appends ell conditioned vectors after the current end of out.x.
void extend_without_record_x(RecordOutput& out, std::int64_t ell, const RecordParams& params,
                             const GaussianDesign& design, Stream& rng);

inline double record_threshold(double a, std::int64_t n) noexcept {
  return a * std::log(static_cast<double>(n));
}

}  // namespace maxstable
