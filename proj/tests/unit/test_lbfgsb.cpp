// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "uqoc/lbfgsb.hpp"
#include "uqoc/rng.hpp"

namespace uqoc {
namespace {

const double kInf = std::numeric_limits<double>::infinity();

// f(z) = 1/2 (z - c)^T A (z - c) with SPD A.
struct Quadratic {
  Mat a;
  Vec c;
  std::pair<double, Vec> operator()(const Vec &z) const {
    const Vec d = z - c;
    return {0.5 * d.dot(a * d), a * d};
  }
};

Quadratic make_quadratic(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Mat r = rng.normal_matrix(n, n);
  return {r * r.transpose() / static_cast<double>(n) + 0.1 * Mat::Identity(n, n),
          rng.normal_vector(n)};
}

TEST(ProjectBox, ClipsComponentwise) {
  Vec z(3), lo(3), hi(3);
  z << -2, 0.5, 7;
  lo << -1, 0, 0;
  hi << 1, 1, 5;
  Vec expect(3);
  expect << -1, 0.5, 5;
  EXPECT_EQ(project_box(z, lo, hi), expect);
}

TEST(ProjectedGradient, VanishesAtActiveBounds) {
  Vec z(2), g(2), lo(2), hi(2);
  z << 0, 1;
  g << 3, -2;
  lo << 0, 0;
  hi << 1, 1;
  EXPECT_EQ(projected_gradient_norm(z, g, lo, hi), 0.0);
  g << -0.25, 0.5;
  EXPECT_DOUBLE_EQ(projected_gradient_norm(z, g, lo, hi), 0.5);
}

TEST(Lbfgsb, UnconstrainedQuadratic) {
  const Quadratic q = make_quadratic(8, 1);
  LbfgsOptions o;
  o.tol = 1e-9;
  const OptTrace t =
      lbfgs_b(q, Vec::Zero(8), Vec::Constant(8, -kInf), Vec::Constant(8, kInf), o);
  EXPECT_TRUE(t.converged());
  EXPECT_LT((t.z - q.c).norm(), 1e-7);
  EXPECT_LT(t.iterations(), 60);
}

TEST(Lbfgsb, BoundConstrainedMatchesActiveSetSolution) {
  // Separable problem with the minimizer outside the box in two coordinates.
  Quadratic q;
  q.a = Vec::LinSpaced(4, 1, 4).asDiagonal();
  q.c.resize(4);
  q.c << -3, 0.5, 2, 0.25;
  const Vec lo = Vec::Zero(4), hi = Vec::Ones(4);
  LbfgsOptions o;
  o.tol = 1e-10;
  const OptTrace t = lbfgs_b(q, Vec::Constant(4, 0.5), lo, hi, o);
  ASSERT_TRUE(t.converged());
  Vec expect(4);
  expect << 0, 0.5, 1, 0.25;
  EXPECT_LT((t.z - expect).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Lbfgsb, CoupledBoxProblemSatisfiesKkt) {
  const Quadratic q = make_quadratic(10, 3);
  const Vec lo = Vec::Constant(10, -0.2), hi = Vec::Constant(10, 0.2);
  LbfgsOptions o;
  o.tol = 1e-10;
  o.max_iter = 500;
  const OptTrace t = lbfgs_b(q, Vec::Zero(10), lo, hi, o);
  ASSERT_TRUE(t.converged()) << to_string(t.reason);
  const Vec g = q(t.z).second;
  for (Eigen::Index i = 0; i < 10; ++i) {
    if (t.z[i] > lo[i] + 1e-8 && t.z[i] < hi[i] - 1e-8) EXPECT_NEAR(g[i], 0.0, 1e-8);
    if (t.z[i] <= lo[i] + 1e-12) EXPECT_GE(g[i], -1e-8);
    if (t.z[i] >= hi[i] - 1e-12) EXPECT_LE(g[i], 1e-8);
  }
}

TEST(Lbfgsb, HistoryIsMonotoneAndStartsAtProjectedGuess) {
  const Quadratic q = make_quadratic(6, 4);
  const Vec lo = Vec::Constant(6, -1), hi = Vec::Constant(6, 1);
  const OptTrace t = lbfgs_b(q, Vec::Constant(6, 5.0), lo, hi);
  ASSERT_GE(t.history.size(), 2u);
  EXPECT_EQ(t.history.front().z, Vec::Ones(6));
  EXPECT_EQ(t.history.front().iter, 0);
  for (std::size_t k = 1; k < t.history.size(); ++k) {
    EXPECT_LE(t.history[k].J, t.history[k - 1].J);
    EXPECT_EQ(t.history[k].iter, static_cast<int>(k));
    EXPECT_GE(t.history[k].seconds, t.history[k - 1].seconds);
  }
  EXPECT_EQ(t.J, t.history.back().J);
  EXPECT_EQ(t.evaluations, t.history.back().evaluations);
}

TEST(Lbfgsb, StopsAtIterationLimit) {
  // Rosenbrock from the usual start needs more than three iterations.
  auto rosen = [](const Vec &z) {
    const double a = 1 - z[0], b = z[1] - z[0] * z[0];
    Vec g(2);
    g << -2 * a - 400 * z[0] * b, 200 * b;
    return std::pair<double, Vec>{a * a + 100 * b * b, g};
  };
  LbfgsOptions o;
  o.max_iter = 3;
  Vec z0(2);
  z0 << -1.2, 1;
  const OptTrace t = lbfgs_b(rosen, z0, Vec::Constant(2, -kInf), Vec::Constant(2, kInf), o);
  EXPECT_EQ(t.reason, Termination::MaxIterations);
  EXPECT_EQ(t.iterations(), 3);
  o.max_iter = 500;
  o.tol = 1e-8;
  const OptTrace full = lbfgs_b(rosen, z0, Vec::Constant(2, -kInf), Vec::Constant(2, kInf), o);
  EXPECT_TRUE(full.converged());
  EXPECT_LT((full.z - Vec::Ones(2)).norm(), 1e-6);
}

TEST(Lbfgsb, WrongGradientEndsInLineSearchFailure) {
  auto bad = [](const Vec &z) { return std::pair<double, Vec>{z.squaredNorm(), -z}; };
  const OptTrace t =
      lbfgs_b(bad, Vec::Ones(2), Vec::Constant(2, -kInf), Vec::Constant(2, kInf));
  EXPECT_EQ(t.reason, Termination::LineSearchFailure);
  EXPECT_EQ(to_string(t.reason), "line-search-failure");
}

TEST(Lbfgsb, RecordsSolveCounts) {
  SolveCounter counter;
  auto f = [&](const Vec &z) {
    counter.add_state();
    counter.add_linear(2);
    return std::pair<double, Vec>{z.squaredNorm(), 2 * z};
  };
  const OptTrace t =
      lbfgs_b(f, Vec::Ones(3), Vec::Constant(3, -kInf), Vec::Constant(3, kInf), {}, &counter);
  EXPECT_EQ(t.history.back().solves.state, t.evaluations);
  EXPECT_EQ(t.history.back().solves.linear, 2 * t.evaluations);
}

TEST(Lbfgsb, RejectsInconsistentInput) {
  auto f = [](const Vec &z) { return std::pair<double, Vec>{0.0, z}; };
  EXPECT_THROW(lbfgs_b(f, Vec::Zero(2), Vec::Zero(3), Vec::Ones(2)), InvalidArgument);
  EXPECT_THROW(lbfgs_b(f, Vec::Zero(2), Vec::Ones(2), Vec::Zero(2)), InvalidArgument);
  LbfgsOptions o;
  o.memory = 0;
  EXPECT_THROW(lbfgs_b(f, Vec::Zero(2), Vec::Zero(2), Vec::Ones(2), o), InvalidArgument);
}

}  // namespace
}  // namespace uqoc
