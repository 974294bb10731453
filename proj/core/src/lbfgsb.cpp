// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/lbfgsb.hpp"

#include <chrono>
#include <cmath>
#include <deque>

#include <fmt/format.h>

namespace uqoc {

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIterations:
      return "max-iterations";
    case Termination::LineSearchFailure:
      return "line-search-failure";
  }
  return "?";
}

ControlVector project_box(const ControlVector &z, const Vec &lower, const Vec &upper) {
  return z.cwiseMax(lower).cwiseMin(upper);
}

double projected_gradient_norm(const ControlVector &z, const ControlVector &g,
                               const Vec &lower, const Vec &upper) {
  if (z.size() == 0) return 0.0;
  return (project_box(z - g, lower, upper) - z).cwiseAbs().maxCoeff();
}

namespace {

struct Pair {
  Vec s;
  Vec y;
};

// Two-loop recursion restricted to the free variables (mask = 1).
Vec two_loop(const std::deque<Pair> &mem, const Vec &g, const Vec &mask) {
  Vec q = g.cwiseProduct(mask);
  std::vector<double> alpha(mem.size(), 0.0);
  std::vector<double> rho(mem.size(), 0.0);
  double gamma = 0.0;
  for (std::size_t k = mem.size(); k-- > 0;) {
    const Vec s = mem[k].s.cwiseProduct(mask);
    const Vec y = mem[k].y.cwiseProduct(mask);
    const double sy = s.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm())) continue;
    rho[k] = 1.0 / sy;
    if (gamma == 0.0) gamma = sy / y.squaredNorm();
    alpha[k] = rho[k] * s.dot(q);
    q -= alpha[k] * y;
  }
  if (gamma == 0.0) return Vec();
  Vec r = gamma * q;
  for (std::size_t k = 0; k < mem.size(); ++k) {
    if (rho[k] == 0.0) continue;
    const Vec s = mem[k].s.cwiseProduct(mask);
    const Vec y = mem[k].y.cwiseProduct(mask);
    const double beta = rho[k] * y.dot(r);
    r += (alpha[k] - beta) * s;
  }
  return -r;
}

}  // namespace

OptTrace lbfgs_b(const CostGradFn &f, const ControlVector &z0, const Vec &lower,
                 const Vec &upper, const LbfgsOptions &opts, const SolveCounter *counter) {
  const Eigen::Index n = z0.size();
  if (lower.size() != n || upper.size() != n) {
    throw InvalidArgument("bounds do not match the control dimension");
  }
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("lower bound exceeds upper");
  if (opts.memory < 1 || opts.max_iter < 0) throw InvalidArgument("bad optimizer options");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  OptTrace trace;
  ControlVector z = project_box(z0, lower, upper);
  auto [J, g] = f(z);
  trace.evaluations = 1;
  std::deque<Pair> mem;

  auto record = [&](int iter, double pg) {
    OptIterate it;
    it.iter = iter;
    it.z = z;
    it.J = J;
    it.pg_norm = pg;
    if (counter) it.solves = counter->snapshot();
    it.seconds = elapsed();
    it.evaluations = trace.evaluations;
    trace.history.push_back(std::move(it));
  };

  for (int iter = 0;; ++iter) {
    const double pg = projected_gradient_norm(z, g, lower, upper);
    record(iter, pg);
    if (pg < opts.tol) {
      trace.reason = Termination::Converged;
      break;
    }
    if (iter >= opts.max_iter) {
      trace.reason = Termination::MaxIterations;
      break;
    }

    Vec mask = Vec::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((z[i] <= lower[i] && g[i] > 0.0) || (z[i] >= upper[i] && g[i] < 0.0)) mask[i] = 0.0;
    }
    Vec d = two_loop(mem, g, mask);
    if (d.size() == 0 || !(g.dot(d) < 0.0)) {
      mem.clear();
      d = -g.cwiseProduct(mask);
      const double dmax = d.cwiseAbs().maxCoeff();
      if (dmax > 1.0) d /= dmax;
    }

    bool accepted = false;
    double t = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      const ControlVector zt = project_box(z + t * d, lower, upper);
      const Vec step = zt - z;
      const double slope = g.dot(step);
      if (!(slope < 0.0)) continue;
      auto [Jt, gt] = f(zt);
      ++trace.evaluations;
      if (Jt <= J + opts.c1 * slope) {
        const Vec y = gt - g;
        if (step.dot(y) > 1e-12 * step.norm() * y.norm()) {
          mem.push_back({step, y});
          if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
        }
        z = zt;
        J = Jt;
        g = std::move(gt);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      trace.reason = Termination::LineSearchFailure;
      break;
    }
  }
  trace.z = z;
  trace.J = J;
  return trace;
}

}  // namespace uqoc
