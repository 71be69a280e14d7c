#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cmpc/dynamics.hpp"
#include "finite_difference.hpp"

using cmpc::Mat;
using cmpc::UnicycleModel;
using cmpc::Vec;

namespace {
Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}
}  // namespace

TEST(Unicycle, StepAtRest) {
  const UnicycleModel m(0.1);
  EXPECT_EQ(cmpc::step(m, Vec::Zero(4), Vec::Zero(2)), Vec::Zero(4));
}

TEST(Unicycle, StepStraightLine) {
  const UnicycleModel m(0.1);
  const Vec next = cmpc::step(m, v({0, 0, 0, 1}), Vec::Zero(2));
  EXPECT_NEAR(next(0), 0.1, 1e-15);
  EXPECT_EQ(next(1), 0.0);
  EXPECT_EQ(next(2), 0.0);
  EXPECT_EQ(next(3), 1.0);
}

TEST(Unicycle, StepHandEvaluated) {
  const UnicycleModel m(0.1);
  const double half_pi = std::numbers::pi / 2;
  const Vec next = cmpc::step(m, v({1, 2, half_pi, 2}), v({0.3, 2}));
  EXPECT_NEAR(next(0), 1.0, 1e-15);
  EXPECT_NEAR(next(1), 2.2, 1e-15);
  EXPECT_NEAR(next(2), half_pi + 0.03, 1e-15);
  EXPECT_NEAR(next(3), 2.2, 1e-15);
}

TEST(Unicycle, JacobianEntries) {
  const UnicycleModel m(0.1);
  const auto [A, B] = cmpc::jacobians(m, v({0, 0, 0, 1}), Vec::Zero(2));
  EXPECT_EQ(A(0, 2), 0.0);
  EXPECT_NEAR(A(0, 3), 0.1, 1e-15);
  Mat b_expected = Mat::Zero(4, 2);
  b_expected(2, 0) = 0.1;
  b_expected(3, 1) = 0.1;
  EXPECT_EQ(B, b_expected);
  const auto other = cmpc::jacobians(m, v({3, -1, 0.7, -2}), v({0.2, -1}));
  EXPECT_EQ(other.B, b_expected);
}

TEST(Unicycle, OutputSelectsPxThetaV) {
  const UnicycleModel m(0.1);
  EXPECT_EQ(cmpc::output(m, v({-6.2, -0.5, 0, 0})), v({-6.2, 0, 0}));
  EXPECT_EQ(cmpc::output(m, Vec::Zero(4)), Vec::Zero(3));
  EXPECT_EQ(cmpc::output(m, v({5, 0.3, 0, 0})), v({5, 0, 0}));
}

TEST(Unicycle, DimensionMismatchThrows) {
  const UnicycleModel m(0.1);
  EXPECT_THROW((void)cmpc::step(m, Vec::Zero(3), Vec::Zero(2)), cmpc::DimensionError);
  EXPECT_THROW((void)cmpc::step(m, Vec::Zero(4), Vec::Zero(3)), cmpc::DimensionError);
  EXPECT_THROW((void)cmpc::jacobians(m, Vec::Zero(5), Vec::Zero(2)), cmpc::DimensionError);
  EXPECT_THROW((void)cmpc::output(m, Vec::Zero(2)), cmpc::DimensionError);
  EXPECT_THROW(UnicycleModel(0.0), cmpc::ValidationError);
}

TEST(UnicycleProperty, JacobiansMatchCentralDifferences) {
  const UnicycleModel m(0.1);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> pos(-10, 10), ang(-3, 3), vel(-10, 10), u1(-0.3, 0.3), u2(-2, 2);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec x = v({pos(rng), pos(rng), ang(rng), vel(rng)});
    const Vec u = v({u1(rng), u2(rng)});
    const auto [A, B] = cmpc::jacobians(m, x, u);
    const auto fd = cmpc::testing::central_difference(m, x, u, 1e-6);
    if ((A - fd.A).cwiseAbs().maxCoeff() > 1e-6 || (B - fd.B).cwiseAbs().maxCoeff() > 1e-6) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(UnicycleProperty, StepIsBitReproducible) {
  const UnicycleModel m(0.1);
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec x = v({n(rng), n(rng), n(rng), n(rng)});
    const Vec u = v({n(rng), n(rng)});
    EXPECT_EQ(cmpc::step(m, x, u), cmpc::step(m, x, u));
  }
}

TEST(UnicycleProperty, LinearizationResidualIsSecondOrder) {
  const UnicycleModel m(0.1);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pos(-5, 5), ang(-3, 3), vel(0.5, 5), dir(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = v({pos(rng), pos(rng), ang(rng), vel(rng)});
    const Vec u = v({0.1, 0.5});
    const Vec dx = v({dir(rng), dir(rng), dir(rng), dir(rng)}).normalized();
    const Vec du = v({dir(rng), dir(rng)}).normalized();
    const auto [A, B] = cmpc::jacobians(m, x, u);
    auto residual = [&](double eps) {
      return (m.step(x + eps * dx, u + eps * du) - m.step(x, u) - A * (eps * dx) - B * (eps * du)).norm();
    };
    const double r1 = residual(1e-3);
    const double r2 = residual(5e-4);
    if (r1 < 1e-12) continue;  // direction with no curvature
    const double ratio = r1 / r2;
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
  }
}
