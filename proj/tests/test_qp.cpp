#include <gtest/gtest.h>

#include <random>

#include "cmpc/qp.hpp"
#include "random_qp.hpp"

using cmpc::Index;
using cmpc::Mat;
using cmpc::QpProblem;
using cmpc::QpStatus;
using cmpc::Vec;
using cmpc::testing::dual_projected_gradient;
using cmpc::testing::feasible;
using cmpc::testing::random_qp;

TEST(QpSolve, UnconstrainedMinimum) {
  const auto p = QpProblem::make(2.0 * Mat::Identity(2, 2), Vec::Map(std::vector<double>{-2.0, -4.0}.data(), 2));
  const auto s = cmpc::solve_qp(p);
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_NEAR(s.z(0), 1.0, 1e-8);
  EXPECT_NEAR(s.z(1), 2.0, 1e-8);
}

TEST(QpSolve, EqualityBySymmetry) {
  auto p = QpProblem::make(2.0 * Mat::Identity(2, 2), Vec::Zero(2));
  p.A_eq = Mat::Ones(1, 2);
  p.b_eq = Vec::Constant(1, 2.0);
  const auto s = cmpc::solve_qp(p);
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_NEAR(s.z(0), 1.0, 1e-8);
  EXPECT_NEAR(s.z(1), 1.0, 1e-8);
}

TEST(QpSolve, BoxActiveAnalytic) {
  // min (z - 3)^2 with z <= 1  ->  z = 1, bound multiplier 4.
  auto p = QpProblem::make(2.0 * Mat::Identity(1, 1), Vec::Constant(1, -6.0));
  p.ub(0) = 1.0;
  const auto s = cmpc::solve_qp(p);
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_NEAR(s.z(0), 1.0, 1e-8);
  EXPECT_NEAR(s.duals.bound(0), 4.0, 1e-8);
}

TEST(QpSolve, MatchesProjectedGradientOracle) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rq = random_qp(rng, 20, 0, 5, true);
    const auto s = cmpc::solve_qp(rq.problem);
    ASSERT_EQ(s.status, QpStatus::Optimal);
    const Vec oracle = dual_projected_gradient(rq.problem, 1e-10);
    EXPECT_LE((s.z - oracle).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
  }
}

TEST(QpSolve, InfeasibleIsReported) {
  auto p = QpProblem::make(Mat::Identity(2, 2), Vec::Zero(2));
  p.A_in = Mat::Zero(1, 2);
  p.A_in(0, 0) = 1.0;
  p.b_in = Vec::Zero(1);
  p.lb(0) = 1.0;
  const auto s = cmpc::solve_qp(p);
  EXPECT_EQ(s.status, QpStatus::PrimalInfeasible);
}

TEST(QpSolve, DimensionMismatchThrows) {
  auto p = QpProblem::make(Mat::Identity(2, 2), Vec::Zero(2));
  p.A_eq = Mat::Ones(1, 3);
  p.b_eq = Vec::Zero(1);
  EXPECT_THROW((void)cmpc::solve_qp(p), cmpc::DimensionError);
  auto q = QpProblem::make(Mat::Identity(2, 2), Vec::Zero(2));
  q.lb(0) = 1.0;
  q.ub(0) = 0.0;
  EXPECT_THROW((void)cmpc::solve_qp(q), cmpc::ValidationError);
}

TEST(QpSolve, AsymmetricHessianIsSymmetrized) {
  Mat H(2, 2);
  H << 2, 1, -1, 2;  // symmetric part is 2I
  const auto s = cmpc::solve_qp(QpProblem::make(H, Vec::Map(std::vector<double>{-2.0, -4.0}.data(), 2)));
  ASSERT_EQ(s.status, QpStatus::Optimal);
  EXPECT_NEAR(s.z(0), 1.0, 1e-8);
  EXPECT_NEAR(s.z(1), 2.0, 1e-8);
}

TEST(QpSolve, Deterministic) {
  std::mt19937 rng(1);
  const auto rq = random_qp(rng, 30, 3, 10, true);
  const auto a = cmpc::solve_qp(rq.problem);
  const auto b = cmpc::solve_qp(rq.problem);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(KktResiduals, HandBuiltPoint) {
  // min z^2 s.t. z >= 2, written as -z <= -2.
  auto p = QpProblem::make(2.0 * Mat::Identity(1, 1), Vec::Zero(1));
  p.A_in = -Mat::Identity(1, 1);
  p.b_in = Vec::Constant(1, -2.0);
  const cmpc::QpDuals duals{Vec(0), Vec::Constant(1, 4.0), Vec::Zero(1)};
  const auto r = cmpc::kkt_residuals(p, Vec::Constant(1, 2.0), duals);
  EXPECT_LE(r.r_pri, 1e-12);
  EXPECT_LE(r.r_dual, 1e-12);
  EXPECT_LE(r.complementarity, 1e-12);
}

TEST(KktResiduals, PerturbationRaisesDualResidual) {
  std::mt19937 rng(5);
  const auto rq = random_qp(rng, 15, 2, 4, true);
  const auto s = cmpc::solve_qp(rq.problem);
  ASSERT_EQ(s.status, QpStatus::Optimal);
  const Vec perturbed = s.z + Vec::Constant(s.z.size(), 1e-3);
  EXPECT_GE(cmpc::kkt_residuals(rq.problem, perturbed, s.duals).r_dual, 1e-4);
}

TEST(QpProperty, RandomInstancesReachOptimal) {
  std::mt19937 rng(2025);
  std::uniform_int_distribution<Index> dim(2, 60);
  int failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Index d = dim(rng);
    const Index n_eq = std::uniform_int_distribution<Index>(0, d / 3)(rng);
    const Index n_in = std::uniform_int_distribution<Index>(0, d)(rng);
    const auto rq = random_qp(rng, d, n_eq, n_in, trial % 3 != 0);
    const auto s = cmpc::solve_qp(rq.problem);
    const auto r = cmpc::kkt_residuals(rq.problem, s);
    const bool ok = s.status == QpStatus::Optimal && r.r_pri <= 1e-6 && r.r_dual <= 1e-6 &&
                    r.complementarity <= 1e-6 && s.r_pri <= 1e-8 && s.r_dual <= 1e-8;
    if (!ok) {
      ++failures;
      ADD_FAILURE() << "trial " << trial << " d=" << d << " status=" << cmpc::to_string(s.status)
                    << " r_pri=" << r.r_pri << " r_dual=" << r.r_dual;
    }
  }
  EXPECT_EQ(failures, 0);
}

TEST(QpProperty, WarmStartDoesNotSlowDown) {
  std::mt19937 rng(77);
  std::normal_distribution<double> n01(0.0, 1.0);
  int not_worse = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rq = random_qp(rng, 30, 4, 12, true);
    cmpc::QpSolver solver;
    const auto base = solver.solve(rq.problem);
    ASSERT_EQ(base.status, QpStatus::Optimal);
    QpProblem perturbed = rq.problem;
    Vec df(perturbed.dim());
    for (Index i = 0; i < df.size(); ++i) df(i) = n01(rng);
    perturbed.f += 1e-3 * df / df.norm();
    const auto cold = solver.solve(perturbed);
    const auto warm = solver.solve(perturbed, cmpc::QpWarmStart{base.z, base.duals});
    EXPECT_EQ(warm.status, QpStatus::Optimal);
    if (warm.iterations <= cold.iterations) ++not_worse;
  }
  EXPECT_GE(not_worse, 90);
}

TEST(QpProperty, OptimumBeatsRandomFeasiblePoints) {
  std::mt19937 rng(123);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rq = random_qp(rng, 12, 2, 6, true);
    const auto s = cmpc::solve_qp(rq.problem);
    ASSERT_EQ(s.status, QpStatus::Optimal);
    const Mat kernel = Eigen::FullPivLU<Mat>(rq.problem.A_eq).kernel();
    const double best = rq.problem.objective(s.z);
    int sampled = 0;
    while (sampled < 1000) {
      Vec coeff(kernel.cols());
      for (Index i = 0; i < coeff.size(); ++i) coeff(i) = n01(rng);
      const Vec z = rq.feasible + 0.3 * kernel * coeff;
      if (!feasible(rq.problem, z, 1e-12)) continue;
      ++sampled;
      EXPECT_LE(best, rq.problem.objective(z) + 1e-9);
    }
  }
}
