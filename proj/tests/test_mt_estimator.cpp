#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "maxstable/error.hpp"
#include "maxstable/mt_estimator.hpp"
#include "maxstable/schedule_tables.hpp"
#include "stats.hpp"

using namespace maxstable;

namespace {

GaussianDesign grid3() { return GaussianDesign::build(CovarianceSpec::brownian({1.0 / 3, 2.0 / 3, 1.0})); }
const KernelConstants k3 = KernelConstants::make(3);
const LevelSchedule schedule;

double newton_potential(const std::vector<double>& x, const KernelConstants& k) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  return k.kappa_d / std::pow(std::sqrt(r2), k.d - 2);
}

}  // namespace

TEST(Kernel, Constants) {
  EXPECT_NEAR(k3.omega_d, 4.0 * M_PI / 3.0, 1e-15);
  EXPECT_NEAR(k3.kappa_d, -1.0 / (4.0 * M_PI), 1e-15);
  EXPECT_THROW(KernelConstants::make(2), Error);
  EXPECT_NO_THROW(KernelConstants::make(5));
}

TEST(Kernel, GradientValuesAndSymmetry) {
  EXPECT_NEAR(kernel_gradient(std::vector<double>{1, 0, 0}, 0, k3), 0.0795774715459476679, 1e-15);
  Stream rng(1, 0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
    std::vector<double> neg = {-x[0], -x[1], -x[2]};
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    for (int i = 0; i < 3; ++i) {
      const double g = kernel_gradient(x, i, k3);
      EXPECT_NEAR(kernel_gradient(neg, i, k3), -g, 1e-15 * (1 + std::abs(g)));
      EXPECT_NEAR(std::abs(g), std::abs(x[i]) / (4 * M_PI * r * r * r), 1e-12 * (1 + std::abs(g)));
      // central difference of G
      const double h = 1e-6;
      auto up = x, dn = x;
      up[i] += h;
      dn[i] -= h;
      EXPECT_NEAR(g, (newton_potential(up, k3) - newton_potential(dn, k3)) / (2 * h), 1e-6 * (1 + std::abs(g)));
    }
  }
}

TEST(Kernel, PotentialIsHarmonicAwayFromOrigin) {
  for (int d : {3, 4, 5}) {
    const auto k = KernelConstants::make(d);
    Stream rng(2, static_cast<std::uint64_t>(d));
    for (int t = 0; t < 50; ++t) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& v : x) v = 0.5 + rng.uniform();
      // Fourth-order central second difference.
      const double h = 1e-2;
      double lap = 0.0, scale = 0.0;
      const double g0 = newton_potential(x, k);
      for (int i = 0; i < d; ++i) {
        auto shifted = [&](double s) {
          auto y = x;
          y[static_cast<std::size_t>(i)] += s;
          return newton_potential(y, k);
        };
        const double second = (-shifted(2 * h) + 16 * shifted(h) - 30 * g0 + 16 * shifted(-h) - shifted(-2 * h)) /
                              (12 * h * h);
        lap += second;
        scale += std::abs(second);
      }
      EXPECT_LT(std::abs(lap), 1e-7 * scale);
    }
  }
}

TEST(ScoreSum, Values) {
  const auto id = GaussianDesign::build(CovarianceSpec::explicit_matrix(Eigen::MatrixXd::Identity(3, 3)));
  ExactSample s;
  s.x.reset(3);
  s.x.push_back(std::vector<double>{1, 0, 0});
  s.x.push_back(std::vector<double>{0, 1, 0});
  EXPECT_EQ(score_sum(s, id), (std::vector<double>{1, 1, 0}));

  const auto g = grid3();
  ExactSample one;
  one.x.reset(3);
  one.x.push_back(std::vector<double>{1, 1, 1});
  const Eigen::Vector3d dense = g.covariance().inverse() * Eigen::Vector3d(1, 1, 1);
  const auto sc = score_sum(one, g);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(sc[static_cast<std::size_t>(i)], dense(i), 1e-8);

  // additivity over concatenation
  Stream rng(3, 0);
  ExactSample a, b, ab;
  a.x.reset(3);
  b.x.reset(3);
  ab.x.reset(3);
  for (int k = 0; k < 5; ++k) a.x.push_back(g.sample(rng).values);
  for (int k = 0; k < 7; ++k) b.x.push_back(g.sample(rng).values);
  ab.x.append(a.x);
  ab.x.append(b.x);
  const auto sa = score_sum(a, g), sb = score_sum(b, g), sab = score_sum(ab, g);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(sab[static_cast<std::size_t>(i)], sa[i] + sb[i], 1e-10);
}

TEST(WBar, ValuesAndRemovableSingularity) {
  const std::vector<double> x = {0, 0, 0};
  EXPECT_NEAR(w_bar(x, std::vector<double>{1, 0, 0}, std::vector<double>{1, 0, 0}, 1, k3, schedule),
              1.0 / (4.0 * M_PI * (1.0 + 43.5343717345273784)), 1e-15);
  EXPECT_EQ(w_bar(x, x, std::vector<double>{1, 2, 3}, 5, k3, schedule), 0.0);
  EXPECT_EQ(w_bar(x, std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, 0, k3, schedule), 0.0);
}

TEST(WBar, UniformLevelBound) {
  Stream rng(4, 0);
  for (int t = 0; t < 100000; ++t) {
    std::vector<double> x(3), m(3), s(3);
    const double scale = std::exp(3.0 * rng.normal());
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.normal();
      m[i] = x[i] + scale * rng.normal();
      s[i] = 10 * rng.normal();
    }
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng.below(100000));
    const double bound = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) / (3 * k3.omega_d * schedule.delta(n));
    ASSERT_LE(std::abs(w_bar(x, m, s, n, k3, schedule)), bound * (1 + 1e-12));
  }
}

TEST(DeltaLevel, TelescopesAndHasSign) {
  Stream rng(5, 0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(3), m(3), s(3);
    for (int i = 0; i < 3; ++i) {
      x[i] = rng.normal();
      m[i] = rng.normal();
      s[i] = rng.normal();
    }
    EXPECT_EQ(delta_level(x, m, s, 1, k3, schedule), w_bar(x, m, s, 1, k3, schedule));
    double sum = 0;
    double inner = 0;
    for (int i = 0; i < 3; ++i) inner += (m[i] - x[i]) * s[i];
    for (std::int64_t n = 1; n <= 300; ++n) {
      const double dl = delta_level(x, m, s, n, k3, schedule);
      if (n >= 2 && inner > 0) EXPECT_GE(dl, 0.0);
      sum += dl;
      EXPECT_NEAR(sum, w_bar(x, m, s, n, k3, schedule), 1e-12 * (1 + std::abs(sum)));
    }
  }
}

TEST(LevelSchedule, InverseTransformDefinition) {
  EXPECT_EQ(schedule.level_from_uniform(1.0), 1);
  Stream rng(6, 0);
  for (int t = 0; t < 2000; ++t) {
    const double u = std::max(1e-15, std::pow(rng.uniform(), 1 + 20 * rng.uniform()));
    const auto level = schedule.level_from_uniform(u);
    ASSERT_GE(level, 1);
    ASSERT_GE(schedule.g(level), u);
    ASSERT_LT(schedule.g(level + 1), u);
  }
  EXPECT_THROW(schedule.level_from_uniform(0.0), Error);
  try {
    schedule.level_from_uniform(1e-25);
    ADD_FAILURE() << "level beyond 64-bit range did not throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Overflow);
  }
}

TEST(LevelSchedule, LevelLaw) {
  Stream rng(7, 0);
  const int n = 100000;
  std::vector<double> ge2, ge5, ge10;
  int ones = 0;
  for (int t = 0; t < n; ++t) {
    const auto level = schedule.sample_level(rng);
    ones += level == 1;
    ge2.push_back(level >= 2);
    ge5.push_back(level >= 5);
    ge10.push_back(level >= 10);
  }
  EXPECT_NEAR(static_cast<double>(ones) / n, 1.0 - 0.372085572830406097, 0.005);
  for (auto [v, k] : {std::pair{&ge2, 2}, std::pair{&ge5, 5}, std::pair{&ge10, 10}}) {
    const auto m = check::mean_se(*v);
    EXPECT_LT(std::abs(m.mean - schedule.g(k)), 3 * m.se) << k;
  }
}

TEST(DrawRandomized, SyntheticLimitIsUnbiased) {
  // W_n = 1 - 1/n, so Delta_1 = 0, Delta_n = 1/(n-1) - 1/n and E V = 1.
  auto fn = [](std::int64_t level, Stream&, std::span<double> out, std::int64_t& cost) {
    out[0] = level == 1 ? 0.0 : 1.0 / static_cast<double>(level - 1) - 1.0 / static_cast<double>(level);
    cost += 1;
  };
  Stream rng(8, 0);
  std::vector<double> v;
  for (int t = 0; t < 100000; ++t) {
    const auto draw = draw_randomized(1, schedule, fn, rng);
    ASSERT_EQ(draw.cost, draw.level + 1);
    v.push_back(draw.values[0]);
  }
  const auto m = check::mean_se(v);
  EXPECT_LT(std::abs(m.mean - 1.0), 3 * m.se) << m.mean << " +- " << m.se;
}

TEST(DrawRandomized, TruncatedDifferencesGiveExactMean) {
  // Random differences with means 0.5, -0.2, 0.3 at levels 1..3 and zero after.
  auto fn = [](std::int64_t level, Stream& s, std::span<double> out, std::int64_t&) {
    const double means[] = {0.5, -0.2, 0.3};
    out[0] = level <= 3 ? means[level - 1] + s.normal() : 0.0;
  };
  Stream rng(9, 0);
  std::vector<double> v;
  for (int t = 0; t < 100000; ++t) v.push_back(draw_randomized(1, schedule, fn, rng).values[0]);
  const auto m = check::mean_se(v);
  EXPECT_LT(std::abs(m.mean - 0.6), 3 * m.se);
}

TEST(DrawRandomized, LimitsAbandonDraws) {
  auto fn = [](std::int64_t, Stream&, std::span<double> out, std::int64_t& cost) {
    out[0] = 1.0;
    cost += 10;
  };
  Stream rng(10, 0);
  for (int t = 0; t < 1000; ++t) {
    Stream copy = rng;
    const auto free_draw = draw_randomized(1, schedule, fn, copy);
    const auto capped = draw_randomized(1, schedule, fn, rng, DrawLimits{1, INT64_MAX});
    EXPECT_EQ(capped.values.empty(), free_draw.level > 1);
    Stream copy2(11, static_cast<std::uint64_t>(t));
    Stream copy3 = copy2;
    const auto free2 = draw_randomized(1, schedule, fn, copy2);
    const auto cost_capped = draw_randomized(1, schedule, fn, copy3, DrawLimits{INT64_MAX, 25});
    EXPECT_EQ(cost_capped.values.empty(), free2.cost > 25);
    if (free_draw.level == 1) EXPECT_EQ(free_draw.values[0], 1.0);
  }
}

TEST(DrawEstimator, LevelOneEqualsFirstTerm) {
  const auto g = grid3();
  const auto p = SamplerParams::make(g);
  const std::vector<std::vector<double>> pts = {{0, 0, 0}, {0, 0.5, 0}};
  EstimatorWorkspace ws;
  int checked = 0;
  for (std::uint64_t i = 0; checked < 5; ++i) {
    Stream rng(12, i);
    Stream replay = rng;
    const auto draw = draw_estimator(pts, g, p, k3, schedule, rng, ws);
    if (draw.level != 1) continue;
    ++checked;
    ASSERT_EQ(schedule.sample_level(replay), 1);
    const auto s = algorithm_m(g, p, replay);
    const auto score = score_sum(s, g);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      EXPECT_EQ(draw.values[q], w_bar(pts[q], s.m, score, 1, k3, schedule));
    }
    EXPECT_EQ(draw.cost, s.cost + 1);
  }
  Stream other(1, 1);
  EXPECT_THROW(draw_estimator(std::vector<std::vector<double>>{{0, 0}}, g, p, k3, schedule, other, ws), Error);
}

TEST(DrawEstimator, LevelTermsHaveFiniteDecreasingSecondMoments) {
  // E[(Delta_n / g(n))^2 ; L >= n] = E[Delta_n^2] / g(n).
  const auto g = grid3();
  const auto p = SamplerParams::make(g);
  const std::vector<double> x = {0, 0, 0};
  const std::int64_t levels[] = {1, 2, 4, 8};
  std::vector<double> second(4, 0.0);
  const int n = 10000;
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(n); ++i) {
    Stream rng(13, i);
    const auto s = algorithm_m(g, p, rng);
    const auto score = score_sum(s, g);
    for (int j = 0; j < 4; ++j) {
      const double dl = delta_level(x, s.m, score, levels[j], k3, schedule);
      second[static_cast<std::size_t>(j)] += dl * dl / schedule.g(levels[j]) / n;
    }
  }
  for (int j = 0; j < 4; ++j) {
    RecordProperty("second_moment_level_" + std::to_string(levels[j]), std::to_string(second[static_cast<std::size_t>(j)]));
    EXPECT_TRUE(std::isfinite(second[static_cast<std::size_t>(j)]));
  }
  for (int j = 1; j < 4; ++j) EXPECT_LT(second[static_cast<std::size_t>(j)], second[static_cast<std::size_t>(j - 1)]) << j;
}

TEST(DrawEstimator, LevelTermSecondMomentsDecayPastTheirPeak) {
  const auto g = grid3();
  const auto p = SamplerParams::make(g);
  const std::vector<double> x = {0, 0, 0};
  const std::int64_t levels[] = {8, 64, 512, 4096, 65536, 1 << 20};
  std::vector<double> second(std::size(levels), 0.0);
  const int n = 10000;
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(n); ++i) {
    Stream rng(14, i);
    const auto s = algorithm_m(g, p, rng);
    const auto score = score_sum(s, g);
    for (std::size_t j = 0; j < std::size(levels); ++j) {
      const double dl = delta_level(x, s.m, score, levels[j], k3, schedule);
      second[j] += dl * dl / schedule.g(levels[j]) / n;
    }
  }
  for (std::size_t j = 1; j < std::size(levels); ++j) EXPECT_LT(second[j], 0.5 * second[j - 1]) << levels[j];
}
