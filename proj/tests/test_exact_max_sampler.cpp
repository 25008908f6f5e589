#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "maxstable/error.hpp"
#include "maxstable/exact_max_sampler.hpp"
#include "maxstable/oracle.hpp"
#include "stats.hpp"

using namespace maxstable;

namespace {

GaussianDesign grid3() { return GaussianDesign::build(CovarianceSpec::brownian({1.0 / 3, 2.0 / 3, 1.0})); }

void check_invariants(const ExactSample& s, const GaussianDesign& design, const SamplerParams& p) {
  ASSERT_EQ(s.n, std::max({s.n_walk, s.n_x, s.n_a}));
  ASSERT_EQ(s.x.size(), static_cast<std::size_t>(s.n));
  ASSERT_EQ(s.a.size(), static_cast<std::size_t>(s.n));
  ASSERT_GE(s.cost, s.n);
  std::vector<double> m(static_cast<std::size_t>(design.dim()), -std::numeric_limits<double>::infinity());
  for (std::int64_t k = 1; k <= s.n; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    if (k > 1) ASSERT_GT(s.a[i], s.a[i - 1]);
    if (k > s.n_walk) ASSERT_GT(s.a[i], p.tilt.gamma * static_cast<double>(k));
    if (k > s.n_x) ASSERT_LE(sup_norm(s.x[i]), record_threshold(p.record.a, k));
    for (std::size_t c = 0; c < m.size(); ++c) m[c] = std::max(m[c], -std::log(s.a[i]) + s.x[i][c] + design.mu()[c]);
  }
  for (std::size_t c = 0; c < m.size(); ++c) ASSERT_EQ(m[c], s.m[c]);
}

}  // namespace

TEST(ComputeNa, ThresholdExample) {
  EXPECT_EQ(compute_n_a(1.0, 0.0, 0.5, 0.5), 4);
  // n gamma >= A_1 n^a e^{|X_1|} for every n > N_a
  for (std::int64_t n = 5; n <= 104; ++n) EXPECT_GE(0.5 * n, std::pow(static_cast<double>(n), 0.5));
  EXPECT_EQ(compute_n_a(0.0, 1.0, 0.5, 0.5), 1);
  EXPECT_EQ(compute_n_a(1e-300, 0.0, 0.5, 0.5), 1);
}

TEST(ComputeNa, InequalitySweep) {
  Stream rng(1, 0);
  for (int t = 0; t < 2000; ++t) {
    const double a1 = rng.exponential();
    const double x = std::abs(rng.normal());
    const double a = 0.3 + 0.6 * rng.uniform();
    const double gamma = 0.2 + 0.7 * rng.uniform();
    const auto na = compute_n_a(a1, x, a, gamma);
    ASSERT_GE(na, 1);
    for (std::int64_t n = na + 1; n <= na + 100; ++n) {
      ASSERT_GE(gamma * static_cast<double>(n), a1 * std::pow(static_cast<double>(n), a) * std::exp(x))
          << a1 << " " << x << " " << a << " " << gamma << " n=" << n;
    }
    // Closed form evaluated in extended precision; away from integer
    // boundaries it must match exactly.
    const long double bound =
        std::pow(static_cast<long double>(a1) / gamma * std::exp(static_cast<long double>(x)), 1.0L / (1.0L - a));
    const long double ceiling = std::max(1.0L, std::ceil(bound));
    if (std::abs(bound - std::round(bound)) > 1e-9L * bound) {
      EXPECT_EQ(na, static_cast<std::int64_t>(ceiling)) << a1 << " " << x << " " << a << " " << gamma;
    }
  }
  EXPECT_THROW(compute_n_a(1e30, 30.0, 0.9, 0.5), Error);
}

TEST(AlgorithmM, InvariantsAndTruncation) {
  const auto design = GaussianDesign::build(CovarianceSpec::brownian({1.0 / 3, 2.0 / 3, 1.0}, {0.1, -0.2, 0.3}));
  for (double a : {0.5, 0.7}) {
    const auto p = SamplerParams::make(design, a);
    Stream rng(2, static_cast<std::uint64_t>(10 * a));
    ExactSample s;
    for (int i = 0; i < 1000; ++i) {
      algorithm_m(design, p, rng, s);
      check_invariants(s, design, p);
      const auto tail = continuation_max(s, 100, design, p, rng);
      for (std::size_t c = 0; c < 3; ++c) ASSERT_LT(tail[c], s.m[c]);
    }
  }
}

TEST(AlgorithmM, OrderOfMaximizationIrrelevant) {
  const auto design = grid3();
  const auto p = SamplerParams::make(design);
  Stream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    const auto s = algorithm_m(design, p, rng);
    std::vector<double> m(3, -std::numeric_limits<double>::infinity());
    for (std::int64_t k = s.n - 1; k >= 0; --k) {
      for (std::size_t c = 0; c < 3; ++c) {
        m[c] = std::max(m[c], -std::log(s.a[static_cast<std::size_t>(k)]) + s.x[static_cast<std::size_t>(k)][c]);
      }
    }
    EXPECT_EQ(m, s.m);
  }
}

TEST(AlgorithmM, GumbelMarginalInOneDimension) {
  const auto design = GaussianDesign::build(CovarianceSpec::brownian({1.0}));
  const auto p = SamplerParams::make(design);
  std::vector<double> m;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    Stream rng(4, i);
    m.push_back(algorithm_m(design, p, rng).m[0]);
  }
  EXPECT_GT(check::ks_one_sample(m, [](double x) { return gumbel_marginal_cdf(x, 1.0); }), 0.01);
}

class GridSamples : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto design = grid3();
    const auto p = SamplerParams::make(design);
    samples_ = new std::vector<Summary>();
    ExactSample s;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      Stream rng(5, i);
      algorithm_m(design, p, rng, s);
      samples_->push_back({s.m, s.cost});
    }
  }
  static void TearDownTestSuite() { delete samples_; }
  struct Summary {
    std::vector<double> m;
    std::int64_t cost;
  };
  static std::vector<Summary>* samples_;
};
std::vector<GridSamples::Summary>* GridSamples::samples_ = nullptr;

TEST_F(GridSamples, MarginalsAreGumbel) {
  for (int c = 0; c < 3; ++c) {
    const double var = (c + 1) / 3.0;
    std::vector<double> m;
    for (std::size_t i = 0; i < 20000; ++i) m.push_back((*samples_)[i].m[static_cast<std::size_t>(c)]);
    EXPECT_GT(check::ks_one_sample(m, [var](double x) { return gumbel_marginal_cdf(x, var); }), 0.01);
  }
}

TEST_F(GridSamples, JointCdfMatchesOracle) {
  std::vector<double> ind;
  for (const auto& s : *samples_) ind.push_back(s.m[0] <= 0 && s.m[1] <= 0 && s.m[2] <= 0 ? 1.0 : 0.0);
  const auto emp = check::mean_se(ind);
  Stream rng(6, 0);
  const auto oracle = cdf_mc(std::vector<double>{0, 0, 0}, grid3(), 1000000, rng);
  EXPECT_LT(std::abs(emp.mean - oracle.value), 3.0 * std::hypot(emp.se, oracle.std_err))
      << emp.mean << " vs " << oracle.value;
}

TEST_F(GridSamples, CostIsBatchStable) {
  std::vector<double> batch;
  for (std::size_t b = 0; b < 10; ++b) {
    double total = 0;
    for (std::size_t i = 0; i < 1000; ++i) total += static_cast<double>((*samples_)[b * 1000 + i].cost);
    batch.push_back(total / 1000.0);
  }
  const auto m = check::mean_se(batch);
  EXPECT_LT(m.se * std::sqrt(10.0) / m.mean, 0.2);
}

TEST(AlgorithmM, CostGrowsSublinearlyInDimension) {
  auto mean_cost = [](const GaussianDesign& design) {
    const auto p = SamplerParams::make(design);
    double total = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      Stream rng(7, i);
      total += static_cast<double>(algorithm_m(design, p, rng).cost);
    }
    return total / 1000.0;
  };
  const double c3 = mean_cost(grid3());
  const double c6 = mean_cost(GaussianDesign::build(CovarianceSpec::brownian({1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6, 1.0})));
  EXPECT_LT(c6 / c3, 2.0) << c3 << " " << c6;
  EXPECT_GT(c6, c3);
}
