// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uqoc/model.hpp"

namespace uqoc {

struct OptIterate {
  int iter = 0;
  ControlVector z;
  double J = 0.0;
  double pg_norm = 0.0;  // |P(z - grad) - z|_inf
  SolveCounts solves;    // cumulative, when a counter is attached
  double seconds = 0.0;  // cumulative wall time
  int evaluations = 0;   // cumulative cost evaluations
};

enum class Termination { Converged, MaxIterations, LineSearchFailure };

std::string_view to_string(Termination t) noexcept;

struct OptTrace {
  std::vector<OptIterate> history;  // accepted iterates, starting with z0
  Termination reason = Termination::MaxIterations;
  ControlVector z;
  double J = 0.0;
  int evaluations = 0;

  int iterations() const noexcept {
    return history.empty() ? 0 : static_cast<int>(history.size()) - 1;
  }
  bool converged() const noexcept { return reason == Termination::Converged; }
};

struct LbfgsOptions {
  double tol = 1e-3;
  int max_iter = 200;
  int memory = 10;
  double c1 = 1e-4;
  int max_halvings = 30;
};

using CostGradFn = std::function<std::pair<double, ControlVector>(const ControlVector &)>;

/// Projected-gradient limited-memory BFGS on the box [lower, upper] with a
/// backtracking Armijo search along the projected path.
OptTrace lbfgs_b(const CostGradFn &f, const ControlVector &z0, const Vec &lower,
                 const Vec &upper, const LbfgsOptions &opts = {},
                 const SolveCounter *counter = nullptr);

ControlVector project_box(const ControlVector &z, const Vec &lower, const Vec &upper);
double projected_gradient_norm(const ControlVector &z, const ControlVector &g,
                               const Vec &lower, const Vec &upper);

}  // namespace uqoc
