// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "uqoc/dense.hpp"
#include "uqoc/hessian.hpp"

namespace uqoc {
namespace {

class HessianTest : public ::testing::Test {
 protected:
  void SetUp() override {
    spec_.nx = 8;
    spec_.ny = 4;
    problem_ = build_problem(spec_);
    ref_ = std::make_unique<oracle::DenseFlow>(problem_.mesh, spec_);
    Rng rng(31);
    m_ = problem_.prior->sample(rng);
    z_ = problem_.z0;
    lp_ = std::make_shared<LinearizationPoint>(linearize(*problem_.model, m_, z_));
    hess_ = std::make_unique<HessOp>(lp_);
  }

  double oracle_Q(const Vec &m) const { return ref_->Q(ref_->solve(m, z_)); }

  ProblemSpec spec_;
  Problem problem_;
  std::unique_ptr<oracle::DenseFlow> ref_;
  Vec m_, z_;
  std::shared_ptr<LinearizationPoint> lp_;
  std::unique_ptr<HessOp> hess_;
};

TEST_F(HessianTest, LinearizationCountsOneStateAndOneAdjointSolve) {
  problem_.model->counter().reset();
  const LinearizationPoint lp = linearize(*problem_.model, m_, z_);
  const SolveCounts c = problem_.model->counter().snapshot();
  EXPECT_EQ(c.state, 1);
  EXPECT_EQ(c.linear, 1);
  EXPECT_NEAR(lp.Q, oracle_Q(m_), 1e-10 * oracle_Q(m_));
}

TEST_F(HessianTest, GradientMatchesDenseFiniteDifferences) {
  Rng rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec dir = rng.normal_vector(m_.size());
    const double h = 1e-5;
    const double fd = (oracle_Q(m_ + h * dir) - oracle_Q(m_ - h * dir)) / (2 * h);
    EXPECT_NEAR(lp_->grad.dot(dir), fd, 1e-6 * std::abs(fd)) << trial;
  }
}

TEST_F(HessianTest, ActionMatchesFiniteDifferenceOfGradient) {
  Rng rng(5);
  const Vec dir = rng.normal_vector(m_.size());
  const double h = 1e-5;
  const Vec gp = linearize(*problem_.model, m_ + h * dir, z_).grad;
  const Vec gm = linearize(*problem_.model, m_ - h * dir, z_).grad;
  const Vec fd = (gp - gm) / (2 * h);
  const Vec hd = hess_->apply(dir);
  EXPECT_LT((hd - fd).norm() / fd.norm(), 1e-6);
}

TEST_F(HessianTest, ActionIsSymmetricAndCounted) {
  Rng rng(6);
  const Vec a = rng.normal_vector(m_.size());
  const Vec b = rng.normal_vector(m_.size());
  problem_.model->counter().reset();
  const Vec ha = hess_->apply(a);
  const Vec hb = hess_->apply(b);
  EXPECT_EQ(problem_.model->counter().snapshot().linear, 4);
  EXPECT_EQ(problem_.model->counter().snapshot().state, 0);
  EXPECT_EQ(hess_->applies(), 2);
  EXPECT_NEAR(b.dot(ha), a.dot(hb), 1e-10 * std::abs(a.dot(hb)));
}

TEST_F(HessianTest, IncrementalsReassembleTheAction) {
  Rng rng(7);
  const Vec a = rng.normal_vector(m_.size());
  const Incrementals inc = hess_->incrementals(a);
  problem_.model->counter().reset();
  const Vec h1 = hess_->assemble(a, inc);
  EXPECT_EQ(problem_.model->counter().snapshot().linear, 0);
  EXPECT_LT((h1 - hess_->apply(a)).norm(), 1e-12 * h1.norm());
}

TEST_F(HessianTest, PreconditionedModesShareSpectrum) {
  const PrecondHessOp sym(*hess_, *problem_.prior, PrecondHessOp::Mode::Symmetric);
  const PrecondHessOp gen(*hess_, *problem_.prior, PrecondHessOp::Mode::Generalized);
  const Mat s = dense_precond_hessian(sym);
  EXPECT_LT((s - s.transpose()).norm(), 1e-14 * s.norm());
  const Eigen::Index n = s.rows();
  Mat g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = gen.apply(Vec::Unit(n, j));
  Eigen::EigenSolver<Mat> es(g);
  Vec gv = es.eigenvalues().real();
  std::sort(gv.data(), gv.data() + n, [](double a, double b) { return std::abs(a) > std::abs(b); });
  const Vec sv = dense_sym_eig(s).values;
  for (Eigen::Index j = 0; j < 10; ++j) EXPECT_NEAR(gv[j], sv[j], 1e-8 * std::abs(sv[0])) << j;
  EXPECT_THROW(dense_precond_hessian(gen), InvalidArgument);
}

TEST_F(HessianTest, FiniteDifferenceChecksConverge) {
  Rng rng(9);
  const Vec a = rng.normal_vector(m_.size());
  const Vec b = rng.normal_vector(m_.size());
  const auto steps = decade_steps(8);
  ASSERT_EQ(steps.size(), 8u);
  EXPECT_DOUBLE_EQ(steps.front(), 0.1);
  EXPECT_DOUBLE_EQ(steps.back(), 1e-8);
  double best_g = 1.0, best_h = 1.0;
  for (const FdRow &r : fd_check_gradient(*problem_.model, m_, z_, a, steps)) {
    best_g = std::min(best_g, r.rel_error);
  }
  for (const FdRow &r : fd_check_hessian(*problem_.model, m_, z_, a, b, steps)) {
    best_h = std::min(best_h, r.rel_error);
  }
  EXPECT_LT(best_g, 1e-5);
  EXPECT_LT(best_h, 1e-4);
}

TEST(FdHelpers, RelativeError) {
  EXPECT_EQ(fd_relative_error(0.0, 0.0), 0.0);
  EXPECT_NEAR(fd_relative_error(1.1, 1.0), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(fd_relative_error(-2.0, -1.0), 1.0);
}

}  // namespace
}  // namespace uqoc
