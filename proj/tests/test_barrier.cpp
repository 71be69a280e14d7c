#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "cmpc/barrier.hpp"
#include "oracles.hpp"

using cmpc::AffineBarrier;
using cmpc::Index;
using cmpc::Mat;
using cmpc::StepLinearization;
using cmpc::Vec;
using cmpc::Vec2;
using cmpc::testing::recursion_along;

namespace {

Vec scalar(double x) { return Vec::Constant(1, x); }

// Numeric recursion on an affine model with the input held.
double recursion_held_input(const AffineBarrier& h0, const StepLinearization& lin, const std::vector<double>& g,
                            int level, const Vec& x, const Vec& u) {
  if (level == 0) return h0(x);
  const Vec next = lin.predict(x, u);
  const double here = recursion_held_input(h0, lin, g, level - 1, x, u);
  return recursion_held_input(h0, lin, g, level - 1, next, u) - here + g[level - 1] * here;
}

}  // namespace

TEST(NearestBoundaryPoint, Examples) {
  const cmpc::CircularObstacle obs{Vec2(-2, 0), 1.0};
  EXPECT_TRUE(cmpc::nearest_boundary_point(Vec2(0, 0), obs).isApprox(Vec2(-1, 0), 1e-15));
  EXPECT_TRUE(cmpc::nearest_boundary_point(Vec2(-1, 0), obs).isApprox(Vec2(-1, 0), 1e-15));
  EXPECT_TRUE(cmpc::nearest_boundary_point(Vec2(-2, 2), obs).isApprox(Vec2(-2, 1), 1e-15));
  EXPECT_THROW((void)cmpc::nearest_boundary_point(Vec2(-2, 0), obs), cmpc::DegenerateGeometry);
}

TEST(TangentHalfplane, HandEvaluated) {
  const AffineBarrier h = cmpc::tangent_halfplane(Vec2(0, 0), Vec2(-2, 0), 1.0);
  EXPECT_NEAR(h.a(0), 1.0, 1e-15);
  EXPECT_NEAR(h.a(1), 0.0, 1e-15);
  EXPECT_NEAR(h.b, 1.0, 1e-15);
  EXPECT_GT(h(Vec2(0, 0)), 0.0);
}

TEST(TangentHalfplane, InsideOrOnDiscIsInfeasible) {
  EXPECT_THROW((void)cmpc::tangent_halfplane(Vec2(-1.5, 0), Vec2(-2, 0), 1.0), cmpc::InfeasibleNominal);
  EXPECT_THROW((void)cmpc::tangent_halfplane(Vec2(-1, 0), Vec2(-2, 0), 1.0), cmpc::InfeasibleNominal);
  EXPECT_THROW((void)cmpc::tangent_halfplane(Vec2(-2, 0), Vec2(-2, 0), 1.0), cmpc::DegenerateGeometry);
}

TEST(SeparatingHalfplane, InsideNominalStillSeparates) {
  const auto s = cmpc::separating_halfplane(Vec2(-1.5, 0.2), Vec2(-2, 0), 1.0);
  EXPECT_TRUE(s.nominal_inside);
  EXPECT_LT(s.barrier(Vec2(-1.5, 0.2)), 0.0);
  const Vec2 touch = cmpc::nearest_boundary_point(Vec2(-1.5, 0.2), Vec2(-2, 0), 1.0);
  EXPECT_NEAR(s.barrier(touch), 0.0, 1e-12);
  EXPECT_GT(s.barrier(Vec2(0, 0)), 0.0);
}

TEST(TangentHalfplaneProperty, ZeroAtTangentPointAndContainedInExterior) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> coord(-6, 6), rad(0.05, 2.0);
  std::uniform_real_distribution<double> sample(-15, 15);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 center(coord(rng), coord(rng));
    const double r = rad(rng);
    Vec2 p;
    do {
      p = Vec2(coord(rng), coord(rng));
    } while ((p - center).norm() <= r);
    const AffineBarrier h = cmpc::tangent_halfplane(p, center, r);
    const Vec2 touch = cmpc::nearest_boundary_point(p, center, r);
    EXPECT_NEAR(h(touch), 0.0, 1e-12);
    EXPECT_NEAR((touch - center).squaredNorm() - r * r, 0.0, 1e-12);
    EXPECT_GT(h(p), 0.0);
    int violations = 0;
    for (int s = 0; s < 100000; ++s) {
      const Vec2 q(center.x() + sample(rng) * r, center.y() + sample(rng) * r);
      if (h(q) >= 0.0 && (q - center).norm() < r) ++violations;
    }
    EXPECT_EQ(violations, 0);
  }
}

TEST(ZCoefficients, OrderOneAndTwo) {
  const std::vector<double> g{0.3, 0.6, 0.9};
  const auto z1 = cmpc::z_coefficients(1, g);
  ASSERT_EQ(z1.size(), 2u);
  EXPECT_EQ(z1[0], 1.0);
  EXPECT_EQ(z1[1], 0.0);
  const auto z2 = cmpc::z_coefficients(2, g);
  ASSERT_EQ(z2.size(), 3u);
  EXPECT_EQ(z2[0], 0.3 - 1.0);
  EXPECT_EQ(z2[1], -1.0);
  EXPECT_EQ(z2[2], 0.0);
}

TEST(ZCoefficients, OrderThreeBySubsetEnumeration) {
  const std::vector<double> g{0.2, 0.7};
  const auto z3 = cmpc::z_coefficients(3, g);
  ASSERT_EQ(z3.size(), 4u);
  EXPECT_DOUBLE_EQ(z3[0], (0.2 - 1) * (0.7 - 1));
  EXPECT_DOUBLE_EQ(z3[1], (0.2 - 1) + (0.7 - 1));
  EXPECT_EQ(z3[2], -1.0);
  EXPECT_EQ(z3[3], 0.0);
}

TEST(ZCoefficients, Errors) {
  const std::vector<double> g{0.5};
  EXPECT_THROW((void)cmpc::z_coefficients(0, g), cmpc::ValidationError);
  EXPECT_THROW((void)cmpc::z_coefficients(3, g), cmpc::DimensionError);
}

TEST(ZCoefficientsProperty, ExpansionMatchesRecursion) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> gam(1e-3, 1.0), coef(-2, 2);
  for (int level = 1; level <= 4; ++level) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> g(static_cast<std::size_t>(level));
      for (double& x : g) x = gam(rng);
      // Scalar linear system x+ = a x + b u_t, barrier h0 = c x + e.
      const double a = coef(rng), b = coef(rng), c = coef(rng), e = coef(rng);
      std::vector<double> x{coef(rng)};
      for (int t = 0; t < level; ++t) x.push_back(a * x.back() + b * coef(rng));
      std::vector<double> h0(x.size());
      for (std::size_t t = 0; t < x.size(); ++t) h0[t] = c * x[t] + e;

      const double direct = recursion_along(h0, g, level - 1);
      const auto z = cmpc::z_coefficients(level, g);
      double expansion = 0.0;
      for (int v = 0; v <= level - 2; ++v) expansion += z[static_cast<std::size_t>(v)] * h0[static_cast<std::size_t>(v)];
      expansion += std::abs(z[static_cast<std::size_t>(level - 1)]) * h0[static_cast<std::size_t>(level - 1)];
      EXPECT_NEAR(expansion, direct, 1e-10) << "level " << level;
    }
  }
}

TEST(DhcbfAffine, UnitGammaCollapsesToNextState) {
  StepLinearization lin{Mat::Identity(2, 2), Mat::Identity(2, 1), Vec::Zero(2), Vec::Zero(1), Vec::Zero(2)};
  lin.A(0, 1) = 0.5;
  lin.x_next = Vec::Constant(2, 0.25);
  AffineBarrier h0{Vec::Constant(2, 1.0), -0.3};
  const std::vector<double> g{1.0};
  const auto form = cmpc::dhcbf_affine(h0, lin, g, 1);
  const Vec x = Vec::Constant(2, 0.7);
  const Vec u = Vec::Constant(1, -0.2);
  EXPECT_NEAR(form(x, u), h0(lin.predict(x, u)), 1e-14);
}

TEST(DhcbfAffine, ScalarToy) {
  const StepLinearization lin{Mat::Ones(1, 1), Mat::Ones(1, 1), scalar(0.4), scalar(-0.1), scalar(0.3)};
  const AffineBarrier h0{scalar(1.0), 0.0};
  const std::vector<double> g{0.5};
  const auto form = cmpc::dhcbf_affine(h0, lin, g, 1);
  EXPECT_DOUBLE_EQ(form.x_coef(0), 0.5);
  EXPECT_DOUBLE_EQ(form.u_coef(0), 1.0);
  EXPECT_NEAR(form.constant, 0.0, 1e-15);
  EXPECT_THROW((void)cmpc::dhcbf_affine(h0, lin, g, 2), cmpc::ValidationError);
}

TEST(DhcbfAffineProperty, MatchesNumericRecursion) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> c(-1, 1), gam(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 4, m = 1 + trial % 2;
    StepLinearization lin{Mat::Random(n, n), Mat::Random(n, m), Vec::Random(n), Vec::Random(m), Vec::Random(n)};
    const AffineBarrier h0{Vec::Random(n), c(rng)};
    std::vector<double> g(4);
    for (double& x : g) x = gam(rng);
    for (int level = 0; level <= 4; ++level) {
      const auto form = cmpc::dhcbf_affine(h0, lin, g, level);
      const Vec x = Vec::Random(n), u = Vec::Random(m);
      EXPECT_NEAR(form(x, u), recursion_held_input(h0, lin, g, level, x, u), 1e-12);
    }
  }
}

namespace {

// One agent, one barrier instance, scalar state/input, exact plant x+ = x + u.
struct ScalarToy {
  Index horizon = 4;
  cmpc::DecisionLayout layout{1, 4, 1, 1, {1}, 2};
  std::vector<double> gammas{0.5, 0.3};
  std::vector<AffineBarrier> barriers;
  std::vector<StepLinearization> lins;
  Vec x0 = scalar(2.0);
  std::vector<double> u_nom{-0.3, 0.1, -0.2, 0.25};
  std::vector<double> x_nom;

  ScalarToy() {
    x_nom.push_back(x0(0));
    for (double u : u_nom) x_nom.push_back(x_nom.back() + u);
    for (Index k = 0; k < horizon; ++k) {
      barriers.push_back({scalar(1.0), 0.0});
      const double xk = x_nom[static_cast<std::size_t>(k)], uk = u_nom[static_cast<std::size_t>(k)];
      lins.push_back({Mat::Ones(1, 1), Mat::Ones(1, 1), scalar(xk), scalar(uk), scalar(xk + uk)});
    }
  }

  Vec nominal_z(double w) const {
    Vec z = Vec::Zero(layout.dim());
    for (Index k = 0; k < horizon; ++k) z(layout.input_index(0, k)) = u_nom[static_cast<std::size_t>(k)];
    for (Index k = 1; k <= horizon; ++k) z(layout.state_index(0, k)) = x_nom[static_cast<std::size_t>(k)];
    for (Index k = 0; k < horizon; ++k)
      for (Index l = 1; l <= 2; ++l) z(layout.slack_index(0, 0, l, k)) = w;
    return z;
  }

  cmpc::SafetyRow row(Index level, Index k) const {
    return cmpc::build_safety_row({0, 0, level, k}, barriers, lins[static_cast<std::size_t>(k)], gammas, x0, layout);
  }
};

}  // namespace

TEST(SafetyRow, OrderOneAtStepZeroPinsSlack) {
  const ScalarToy toy;
  const auto row = toy.row(1, 0);
  const double h0x0 = toy.x0(0);
  EXPECT_DOUBLE_EQ(row.slack_coefficient, h0x0);
  Vec expected = Vec::Zero(toy.layout.dim());
  expected(toy.layout.slack_index(0, 0, 1, 0)) = -h0x0;
  EXPECT_EQ(row.coeffs, expected);
  EXPECT_DOUBLE_EQ(row.rhs, -h0x0);
}

TEST(SafetyRow, OrderTwoStepOneHandExpanded) {
  const ScalarToy toy;  // gamma_2 = 0.3
  const auto row = toy.row(2, 1);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Vec z = Vec::Zero(toy.layout.dim());
    for (Index i = 0; i < z.size(); ++i) z(i) = d(rng);
    const double x1 = z(toy.layout.state_index(0, 1));
    const double u1 = z(toy.layout.input_index(0, 1));
    const double w = z(toy.layout.slack_index(0, 0, 2, 1));
    const double g1 = toy.gammas[0];
    const double h1 = (x1 + u1) - x1 + g1 * x1;
    const double lhs = h1 - 0.7 * x1;
    const double rhs = w * (g1 - 1.0) * 0.7 * toy.x0(0);
    EXPECT_NEAR(row.residual(z), lhs - rhs, 1e-12);
  }
  EXPECT_DOUBLE_EQ(row.slack_coefficient, (toy.gammas[0] - 1.0) * 0.7 * toy.x0(0));
}

TEST(SafetyRow, NominalResidualEqualsDirectMargin) {
  const ScalarToy toy;
  const Vec z = toy.nominal_z(1.0);
  for (int level = 1; level <= 2; ++level) {
    for (Index k = 0; k < toy.horizon; ++k) {
      const auto row = toy.row(level, k);
      std::vector<double> from_k(toy.x_nom.begin() + k, toy.x_nom.end());
      const double here = recursion_along(from_k, toy.gammas, level - 1);
      const double at_zero = recursion_along(toy.x_nom, toy.gammas, level - 1);
      const double margin = here - std::pow(1.0 - toy.gammas[static_cast<std::size_t>(level - 1)], k) * at_zero;
      EXPECT_NEAR(row.residual(z), margin, 1e-12) << "level " << level << " k " << k;
    }
  }
}

TEST(SafetyRowProperty, ExactlyLinearInDecisionVector) {
  const ScalarToy toy;
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> d(-5, 5);
  for (Index k = 0; k < toy.horizon; ++k) {
    const auto row = toy.row(2, k);
    Vec z1(toy.layout.dim()), z2(toy.layout.dim());
    for (Index i = 0; i < z1.size(); ++i) {
      z1(i) = d(rng);
      z2(i) = d(rng);
    }
    const double t = 0.37;
    EXPECT_NEAR(row.residual(t * z1 + (1 - t) * z2), t * row.residual(z1) + (1 - t) * row.residual(z2), 1e-12);
  }
}

TEST(SafetyRow, MissingHalfplaneIsReported) {
  ScalarToy toy;
  toy.barriers.resize(1);
  EXPECT_THROW((void)toy.row(2, 0), cmpc::DimensionError);
}
