#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "vmprox/errors.hpp"
#include "vmprox/metric.hpp"
#include "vmprox/oracle.hpp"
#include "vmprox/sampling.hpp"

using namespace vmprox;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector random_vector(RngStream& rng, Eigen::Index d, double scale = 1.0) {
  Vector v(d);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

double log_uniform(RngStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform01() * (std::log(hi) - std::log(lo)));
}

SecantPair random_pair(RngStream& rng, Eigen::Index d) {
  const Vector s = random_vector(rng, d);
  Vector h(d);
  for (auto& x : h) x = log_uniform(rng, 1e-2, 1e2);
  Vector y = s.cwiseProduct(h) + 0.1 * random_vector(rng, d);
  if (s.dot(y) <= 0.0) y = s.cwiseProduct(h);
  return {s, y};
}

}  // namespace

TEST(BbBounds, Examples) {
  const Vector y = vec({1.0, -2.0, 0.5});
  auto b = bb_bounds({y, y}, 10);
  EXPECT_NEAR(b.upper, 0.2, 1e-15);
  EXPECT_NEAR(b.lower, 0.1, 1e-15);
  b = bb_bounds({2.0 * y, y}, 4);
  EXPECT_NEAR(b.upper, 1.0, 1e-15);
  EXPECT_NEAR(b.lower, 0.5, 1e-15);
  EXPECT_THROW(bb_bounds({vec({1, 0}), vec({0, 1})}, 3), NonpositiveCurvatureError);
  EXPECT_THROW(bb_bounds({vec({1, 0}), vec({-1, 0})}, 3), NonpositiveCurvatureError);
  EXPECT_THROW(bb_bounds({vec({1, 0}), vec({0, 0})}, 3), DegeneratePairError);
}

TEST(BbBounds, OrderingWheneverCurvaturePositive) {
  RngStream rng(1);
  for (int k = 0; k < 1000; ++k) {
    const auto p = random_pair(rng, 1 + static_cast<Eigen::Index>(rng.uniform_index(10)));
    const auto b = bb_bounds(p, 1 + static_cast<int>(rng.uniform_index(100)));
    EXPECT_LE(b.lower, b.upper);
    EXPECT_GT(b.lower, 0.0);
  }
}

TEST(DiagonalBbUpdate, Examples) {
  MetricConfig cfg;
  cfg.omega = 1.0;
  auto u = diagonal_bb_update({vec({1.0}), vec({1.0})}, vec({1.0}), cfg, 2.0, 0.05);
  EXPECT_DOUBLE_EQ(u.u()[0], 1.0);
  EXPECT_EQ(u.lower(), 0.05);
  EXPECT_EQ(u.upper(), 2.0);
  u = diagonal_bb_update({vec({5.0}), vec({1.0})}, vec({5.0}), cfg, 2.0, 0.1);
  EXPECT_DOUBLE_EQ(u.u()[0], 2.0);
}

TEST(DiagonalBbUpdate, ZeroCurvatureCoordinateKeepsPrevious) {
  MetricConfig cfg;
  cfg.omega = 0.3;
  const auto u = diagonal_bb_update({vec({1.0, 2.0}), vec({0.0, 1.0})}, vec({0.7, 0.7}), cfg, 10.0, 0.01);
  EXPECT_DOUBLE_EQ(u.u()[0], 0.7);
}

TEST(DiagonalBbUpdate, MatchesGridOracleAndRespectsBox) {
  RngStream rng(2);
  MetricConfig cfg;
  for (int k = 0; k < 300; ++k) {
    const Eigen::Index d = 8;
    const auto p = random_pair(rng, d);
    cfg.omega = log_uniform(rng, 1e-3, 1e3);
    cfg.m = 1 + static_cast<int>(rng.uniform_index(20));
    Vector u_prev(d);
    for (auto& x : u_prev) x = log_uniform(rng, 1e-3, 10.0);
    const auto b = bb_bounds(p, cfg.m);
    const auto u = diagonal_bb_update(p, u_prev, cfg, b.upper, b.lower);
    for (Eigen::Index i = 0; i < d; ++i) {
      EXPECT_GE(u.u()[i], b.lower);
      EXPECT_LE(u.u()[i], b.upper);
      EXPECT_NEAR(u.u()[i], oracle::metric_coordinate_oracle(p.s[i], p.y[i], u_prev[i], cfg.omega, b.lower, b.upper), 1e-6);
    }
    // optimality against random feasible competitors
    const double best = secant_objective(p, u.u(), u_prev, cfg.omega);
    for (int j = 0; j < 5; ++j) {
      Vector v(d);
      for (auto& x : v) x = b.lower + rng.uniform01() * (b.upper - b.lower);
      EXPECT_LE(best, secant_objective(p, v, u_prev, cfg.omega) * (1 + 1e-12));
    }
  }
}

TEST(DiagonalBbUpdate, SmallOmegaRecoversSecantRatio) {
  const SecantPair p{vec({1.0, 2.0, -1.0}), vec({2.0, 3.0, -1.5})};
  MetricConfig cfg;
  cfg.omega = 1e-12;
  const auto u = diagonal_bb_update(p, vec({1, 1, 1}), cfg, 100.0, 1e-6);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(u.u()[i], p.s[i] / p.y[i], 1e-9);
}

TEST(UpdateMetric, FallbackHoldsPrevious) {
  const DiagonalMetric prev(vec({0.3, 0.4}), 0.1, 1.0);
  MetricConfig cfg;
  auto out = update_metric({vec({1, 1}), vec({0, 0})}, prev, cfg);
  EXPECT_EQ(out.u(), prev.u());
  EXPECT_EQ(out.lower(), prev.lower());
  out = update_metric({vec({1, 0}), vec({-1, 0})}, prev, cfg);
  EXPECT_EQ(out.u(), prev.u());
}

TEST(UpdateMetric, LargeOmegaClipsPrevious) {
  const Vector s = vec({1.0, -0.5, 2.0});
  MetricConfig cfg;
  cfg.omega = 1e9;
  cfg.m = 1;
  const DiagonalMetric prev(vec({0.6, 1.5, 1.2}));
  const auto out = update_metric({s, s}, prev, cfg);
  // bounds [1, 2]
  EXPECT_NEAR(out.u()[0], 1.0, 1e-6);
  EXPECT_NEAR(out.u()[1], 1.5, 1e-6);
  EXPECT_NEAR(out.u()[2], 1.2, 1e-6);
}

TEST(UpdateMetric, FloorAndCap) {
  MetricConfig cfg;
  cfg.m = 1000000;
  cfg.floor = 1e-3;
  const Vector s = vec({1e-6, 0.0});
  const Vector y = vec({1.0, 0.0});
  const auto out = update_metric({s, y}, DiagonalMetric(vec({1.0, 1.0})), cfg);
  EXPECT_GE(out.min(), 1e-3);
  cfg.m = 1;
  cfg.floor = 1e-12;
  cfg.cap = 0.25;
  const auto capped = update_metric({vec({10.0, 1.0}), vec({1.0, 0.1})}, DiagonalMetric(vec({5.0, 5.0})), cfg);
  EXPECT_LE(capped.max(), 0.25);
  EXPECT_LE(capped.upper(), 0.25);
}

TEST(UpdateMetric, DiagonalQuadraticTracksInverseCurvature) {
  // F(w) = 1/2 sum h_i w_i^2: y = h .* s exactly.
  const Vector h = vec({0.5, 2.0, 4.0});
  MetricConfig cfg;
  cfg.omega = 1e-10;
  cfg.m = 1;
  RngStream rng(3);
  DiagonalMetric metric = DiagonalMetric::scalar(3, 0.1);
  for (int k = 0; k < 5; ++k) {
    const Vector s = random_vector(rng, 3);
    const Vector y = h.cwiseProduct(s);
    const auto b = bb_bounds({s, y}, 1);
    metric = update_metric({s, y}, metric, cfg);
    for (Eigen::Index i = 0; i < 3; ++i) {
      EXPECT_NEAR(metric.u()[i], std::clamp(1.0 / h[i], b.lower, b.upper), 1e-8);
    }
  }
}

TEST(ScalarBb, UsesLowerBound) {
  MetricConfig cfg;
  cfg.m = 10;
  const Vector s = vec({1.0, 2.0});
  EXPECT_NEAR(scalar_bb_stepsize({s, s}, 5.0, cfg), 0.1, 1e-15);
  EXPECT_EQ(scalar_bb_stepsize({s, -s}, 5.0, cfg), 5.0);
}
