#include "maxstable/record_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "maxstable/error.hpp"
#include "maxstable/schedule_tables.hpp"

namespace maxstable {

namespace {
constexpr std::int64_t kMaxAttempts = 10'000'000;

double n0_lhs(double log_n0, double a, double sigma_bar, int d) {
  return d * normal::sf(a * log_n0 / sigma_bar - sigma_bar / a);
}

double n0_rhs(double a, double sigma_bar) {
  const double r = sigma_bar / a;
  return 0.5 * std::sqrt(M_PI / 2.0) * normal::pdf(r) / r;
}

// z(s) = a log(n0 + s) / sigma_bar - sigma_bar / a; the record-time tail
// P(S > s) under the continuous proposal is sf(z(s)) / sf(z(0)).
double shifted_z(double log_arg, const RecordParams& p) {
  return p.a * log_arg / p.sigma_bar - p.sigma_bar / p.a;
}
}  // namespace

bool n0_condition_holds(std::int64_t n0, double a, double sigma_bar, int d) {
  return n0 >= 2 && n0_lhs(std::log(static_cast<double>(n0)), a, sigma_bar, d) <= n0_rhs(a, sigma_bar);
}

std::int64_t choose_n0(double a, double sigma_bar, int d) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "record exponent a must lie in (0,1)");
  if (!(sigma_bar > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_bar must be > 0");
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  std::int64_t lo = 1;  // condition assumed false here
  std::int64_t hi = 2;
  while (!n0_condition_holds(hi, a, sigma_bar, d)) {
    lo = hi;
    if (hi > std::numeric_limits<std::int64_t>::max() / 2) {
      throw Error(ErrorCode::Overflow, "burn-in index n0 does not fit in 64 bits");
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (n0_condition_holds(mid, a, sigma_bar, d)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

RecordParams make_record_params(double a, const GaussianDesign& design, std::int64_t n0) {
  RecordParams p;
  p.a = a;
  p.sigma_bar = design.sigma_bar();
  p.d = design.dim();
  p.n0 = n0 > 0 ? n0 : choose_n0(a, p.sigma_bar, p.d);
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "record exponent a must lie in (0,1)");
  if (!n0_condition_holds(p.n0, a, p.sigma_bar, p.d)) {
    throw Error(ErrorCode::InvalidArgument, "n0 violates the burn-in inequality");
  }
  return p;
}

double g_n0_pmf(std::int64_t k, const RecordParams& p) {
  if (k < 1) return 0.0;
  const double n0 = static_cast<double>(p.n0);
  const double scale = p.a / p.sigma_bar;
  auto integrand = [&](double s) { return normal::pdf(scale * std::log(n0 + s)); };
  const double lo = static_cast<double>(k - 1);
  const double numerator =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, lo + 1.0, 15, 1e-12);
  // Substituting u = a log(n0+s)/sigma_bar turns the full integral into a
  // shifted Gaussian tail.
  const double r = p.sigma_bar / p.a;
  const double denominator = r * std::exp(0.5 * r * r) * normal::sf(shifted_z(std::log(n0), p));
  return numerator / denominator;
}

std::int64_t K_from_uniform(double u, const RecordParams& p) {
  const double r = p.sigma_bar / p.a;
  const double tail0 = normal::sf(shifted_z(std::log(static_cast<double>(p.n0)), p));
  const double log_t = r * r + r * normal::quantile_upper(u * tail0);
  const double t = std::exp(log_t);
  if (!(t < 9.0e18)) throw Error(ErrorCode::Overflow, "proposal record time overflows 64 bits");
  const double k = std::ceil(t - static_cast<double>(p.n0));
  return k < 1.0 ? 1 : static_cast<std::int64_t>(k);
}

std::int64_t sample_K(const RecordParams& params, Stream& rng) { return K_from_uniform(rng.uniform(), params); }

RecordSegment sample_single_record(const RecordParams& p, std::int64_t n1, const GaussianDesign& design,
                                   Stream& rng) {
  if (n1 < p.n0) throw Error(ErrorCode::InvalidArgument, "sample_single_record needs n1 >= n0");
  RecordSegment seg;
  seg.x.reset(design.dim());

  const std::int64_t k = sample_K(p, rng);
  ++seg.cost;
  const double c = record_threshold(p.a, n1 + k);
  ExceedanceDraw last = sample_exceedance(design, c, rng);
  seg.cost += 4;
  const double u = rng.uniform();
  ++seg.cost;

  // The checks commute with the draws they test, so the cheap likelihood test
  // on X_K runs first and X_1..X_{K-1} are drawn only while they stay below
  // their thresholds.
  if (!(u * g_n0_pmf(k, p) <= density_ratio_p_over_pn(design, last.x.values, c))) return seg;

  seg.x.reserve(static_cast<std::size_t>(k));
  for (std::int64_t j = 1; j < k; ++j) {
    std::span<double> row = seg.x.append();
    design.sample_into(rng, row);
    ++seg.cost;
    if (sup_norm(row) > record_threshold(p.a, n1 + j)) {
      seg.x.clear();
      return seg;
    }
  }
  seg.x.push_back(last.x.values);
  seg.degenerate = false;
  return seg;
}

ConditionedBlock sample_without_record_x(std::int64_t n1, std::int64_t ell, const RecordParams& p,
                                         const GaussianDesign& design, Stream& rng) {
  if (n1 < 1) throw Error(ErrorCode::InvalidArgument, "sample_without_record_x needs n1 >= 1");
  ConditionedBlock block;
  block.x.reset(design.dim());
  block.x.reserve(static_cast<std::size_t>(std::max<std::int64_t>(ell, 0)));
  // The X_k are independent, so conditioning the block on "no record after
  // n1" conditions each vector on its own threshold and leaves the rest of the
  // event independent of the block.
  for (std::int64_t k = 1; k <= ell; ++k) {
    const double c = record_threshold(p.a, n1 + k);
    std::span<double> row = block.x.append();
    for (std::int64_t attempt = 0;; ++attempt) {
      if (attempt >= kMaxAttempts) {
        throw Error(ErrorCode::NonTermination, "sample_without_record_x exceeded attempt cap");
      }
      design.sample_into(rng, row);
      ++block.cost;
      if (sup_norm(row) < c) break;
    }
  }
  return block;
}

RecordOutput algorithm_x(const RecordParams& p, const GaussianDesign& design, std::int64_t ell,
                         Stream& rng) {
  RecordOutput out;
  out.x.reset(design.dim());
  out.x.reserve(static_cast<std::size_t>(p.n0 + ell));
  for (std::int64_t k = 0; k < p.n0; ++k) design.sample_into(rng, out.x.append());
  out.cost = p.n0;
  std::int64_t eta = p.n0;
  for (;;) {
    RecordSegment seg = sample_single_record(p, eta, design, rng);
    out.cost += seg.cost;
    if (seg.degenerate) break;
    out.x.append(seg.x);
    eta = static_cast<std::int64_t>(out.x.size());
  }
  out.n_x = eta;
  extend_without_record_x(out, ell, p, design, rng);
  return out;
}

void extend_without_record_x(RecordOutput& out, std::int64_t ell, const RecordParams& p,
                             const GaussianDesign& design, Stream& rng) {
  if (ell <= 0) return;
  ConditionedBlock block =
      sample_without_record_x(static_cast<std::int64_t>(out.x.size()), ell, p, design, rng);
  out.x.append(block.x);
  out.cost += block.cost;
}

}  // namespace maxstable
