#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dynreg/flh.hpp"
#include "dynreg/sions.hpp"

namespace dynreg {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(SionsConfig, Validation) {
  SionsConfig ok;
  EXPECT_NO_THROW(ok.validate());
  SionsConfig bad = ok;
  bad.eta = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = ok;
  bad.epsilon = -1.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = ok;
  bad.clip_c = 0.5;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(SionsPredict, FreshExpertPlaysZero) {
  SionsExpert e(SionsConfig{2, 1.0, 2.0, 20.0});
  EXPECT_EQ(e.predict(Vector2(1.0, 7.0)), Vector::Zero(2));
}

TEST(LiftedPrediction, InnerProducts) {
  EXPECT_NEAR(lifted_prediction(vec({0.5, 0.1}), Vector2(1.0, 3.0))[0], 0.8, 1e-15);
  const Vector w = lifted_prediction(vec({1.0, 0.0, 0.0, 1.0}), Vector2(1.0, 2.0));
  EXPECT_EQ(w, vec({1.0, 2.0}));
}

TEST(LiftGradient, BlockwiseScaling) {
  EXPECT_EQ(lift_gradient(vec({2.0, -1.0}), Vector2(1.0, 3.0)), vec({2.0, 6.0, -1.0, -3.0}));
}

TEST(SionsUpdate, ZeroGradientRound) {
  SionsExpert e(SionsConfig{1, 1.0, 2.0, 20.0});
  e.predict(Vector2(1.0, 1.0));
  e.update(make_scaled_squared_loss(vec({0.0})), Vector2(1.0, 2.0));
  EXPECT_EQ(e.coefficients(), Vector::Zero(2));
  EXPECT_EQ(e.correction().matrix(), 2.0 * Matrix::Identity(2, 2));
}

TEST(SionsUpdate, RequiresPredictFirst) {
  SionsExpert e(SionsConfig{});
  EXPECT_THROW(e.update(make_scaled_squared_loss(vec({0.0})), Vector2(1.0, 2.0)), DomainError);
}

// Two rounds worked out with dense algebra: A_1 = 2I + l_1 l_1^T,
// v_1 = -A_1^{-1} l_1, then the same with the round-2 gradient.
TEST(SionsUpdate, TwoRoundHandTrace) {
  SionsExpert e(SionsConfig{1, 1.0, 2.0, 20.0});
  const double c = 21.0;

  EXPECT_EQ(e.predict(Vector2(1.0, 1.0))[0], 0.0);
  e.update(make_scaled_squared_loss(vec({1.0})), Vector2(1.0, 2.0));
  const double g1 = -1.0 / c;
  const Vector l1 = vec({g1, g1});
  Matrix A = 2.0 * Matrix::Identity(2, 2) + l1 * l1.transpose();
  EXPECT_NEAR(A(0, 1), 1.0 / 441.0, 1e-15);
  const Vector v1 = -A.inverse() * l1;
  const double expect_v1 = (1.0 / c) / (2.0 + 2.0 / 441.0);
  EXPECT_NEAR(v1[0], expect_v1, 1e-15);
  EXPECT_NEAR(e.coefficients()[0], expect_v1, 1e-14);
  EXPECT_NEAR(e.coefficients()[1], expect_v1, 1e-14);
  EXPECT_LE((e.correction().matrix() - A).norm(), 1e-15);

  const double p2 = e.predict(Vector2(1.0, 2.0))[0];
  EXPECT_NEAR(p2, 3.0 * expect_v1, 1e-14);
  e.update(make_scaled_squared_loss(vec({-1.0})), Vector2(1.0, 3.0));
  const double g2 = (p2 + 1.0) / c;
  const Vector l2 = vec({g2, 2.0 * g2});
  A += l2 * l2.transpose();
  const Vector v2 = v1 - A.inverse() * l2;
  EXPECT_LE((e.coefficients() - v2).norm(), 1e-13);
  EXPECT_LE((e.lifted_gradient() - l2).norm(), 1e-15);
}

TEST(SionsUpdate, ProjectsOntoNextSlab) {
  // Small clip so the Newton step leaves the slab.
  SionsExpert e(SionsConfig{1, 1.0, 0.01, 1.0});
  for (int t = 1; t <= 30; ++t) {
    e.predict(Vector2(1.0, t));
    e.update(make_scaled_squared_loss(vec({1.0})), Vector2(1.0, t + 1));
    const double next = Vector2(1.0, t + 1).dot(e.coefficients());
    EXPECT_LE(std::abs(next), 1.0 + 1e-8);
  }
}

TEST(SionsRun, PredictionsStayInsideClip) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int d : {1, 3}) {
    std::vector<LossOracle> losses;
    for (int t = 0; t < 500; ++t) {
      Vector y(d);
      for (int k = 0; k < d; ++k) y[k] = unit(rng);
      losses.push_back(make_scaled_squared_loss(y));
    }
    SionsConfig cfg{d, losses.front().constants().sigma, 2.0, 20.0};
    SionsExpert e(cfg);
    for (int t = 1; t <= 500; ++t) {
      const Vector& p = e.predict(Vector2(1.0, t));
      ASSERT_LE(p.cwiseAbs().maxCoeff(), 20.0);
      // Feasibility of the coefficients for this round's slab.
      for (int k = 0; k < d; ++k) {
        ASSERT_LE(std::abs(Vector2(1.0, t).dot(e.coefficients().segment<2>(2 * k))), 20.0 + 1e-8);
      }
      e.update(losses[t - 1], Vector2(1.0, t + 1));
    }
  }
}

TEST(SionsRun, Deterministic) {
  std::vector<LossOracle> losses;
  for (int t = 0; t < 200; ++t) losses.push_back(make_scaled_squared_loss(vec({std::sin(0.1 * t)})));
  SionsConfig cfg{1, losses.front().constants().sigma, 2.0, 20.0};
  const Trajectory a = sions_run(cfg, losses);
  const Trajectory b = sions_run(cfg, losses);
  EXPECT_EQ(a.predictions, b.predictions);
  EXPECT_EQ(a.losses, b.losses);
}

TEST(StaticRegretBound, Examples) {
  SionsConfig cfg{1, 1.0, 2.0, 20.0};
  EXPECT_DOUBLE_EQ(sions_static_regret_bound(cfg, 1, 0.0, 1.0), 2.0 * std::log(1.5));
  EXPECT_DOUBLE_EQ(sions_static_regret_bound(cfg, 12345, 3.0, 0.0), 3.0);
  SionsConfig two{2, 0.5, 2.0, 20.0};
  const double expect = 1.0 + (4.0 / 0.5) * std::log(1.0 + 0.5 * 100 * 4.0 / 4.0);
  EXPECT_NEAR(sions_static_regret_bound(two, 100, 1.0, 2.0), expect, 1e-12);
}

TEST(StaticRegretBound, HoldsAgainstFeasibleLine) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const long n = 400;
  for (int trial = 0; trial < 5; ++trial) {
    const double a = unit(rng), b = unit(rng);
    const Vector w = vec({a - (b - a) / (n - 1), (b - a) / (n - 1)});
    std::vector<LossOracle> losses;
    for (long t = 1; t <= n; ++t) {
      const double line = w[0] + w[1] * t;
      losses.push_back(make_scaled_squared_loss(vec({std::clamp(line + 0.5 * unit(rng), -1.0, 1.0)})));
    }
    SionsConfig cfg{1, losses.front().constants().sigma, 2.0, 20.0};
    const Trajectory run = sions_run(cfg, losses);
    double regret = 0.0, g = 0.0;
    for (long t = 1; t <= n; ++t) {
      regret += run.losses[t - 1] - losses[t - 1].value(vec({w[0] + w[1] * t}));
      g = std::max(g, run.tracked_lifted_gradients[t - 1].norm());
    }
    EXPECT_LE(regret, sions_static_regret_bound(cfg, n, w.squaredNorm(), g));
  }
}

// Exp-concavity survives the lift v -> f(x^T v).
TEST(LiftedLoss, ExpConcavityPreserved) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> time(1, 50);
  const LossOracle f = make_scaled_squared_loss(vec({0.3}));
  const double sigma = f.constants().sigma;
  for (int i = 0; i < 100; ++i) {
    const Vector2 x(1.0, time(rng));
    // Coefficients whose plays stay inside the working box.
    const Vector v = vec({10.0 * unit(rng), 10.0 * unit(rng) / x[1]});
    const Vector u = vec({10.0 * unit(rng), 10.0 * unit(rng) / x[1]});
    const Vector pv = lifted_prediction(v, x), pu = lifted_prediction(u, x);
    const Vector grad = lift_gradient(f.gradient(pv), x);
    const double lin = grad.dot(u - v);
    EXPECT_GE(f.value(pu), f.value(pv) + lin + 0.5 * sigma * lin * lin - 1e-12);
  }
}

}  // namespace
}  // namespace dynreg
