// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "uqoc/elliptic.hpp"
#include "uqoc/prior.hpp"

namespace uqoc {

/// Porous-medium control problem: mesh, Matern prior with constant mean, wells
/// and control bounds. Defaults reproduce the 64 x 32 reference setup.
struct ProblemSpec {
  int nx = 64;
  int ny = 32;
  double lx = 2.0;
  double ly = 1.0;

  double alpha1 = 0.1;
  double alpha2 = 20.0;
  Tensor2 theta = Tensor2::identity();
  double mean = 3.0;

  std::vector<Point> injection = uniform_grid(0.2, 0.4, 5, 0.125, 0.25, 4);
  std::vector<Point> production = uniform_grid(0.7, 0.2, 4, 0.3, 0.2, 3);
  double sigma = 0.05;
  DirichletData dirichlet;

  double z_min = 0.0;
  double z_max = 32.0;
  double z0 = 16.0;
};

struct Problem {
  ProblemSpec spec;
  std::shared_ptr<const Mesh2D> mesh;
  std::unique_ptr<EllipticModel> model;
  std::unique_ptr<MaternPrior> prior;
  Vec lower;
  Vec upper;
  ControlVector z0;
};

Problem build_problem(const ProblemSpec &spec, const SolverOptions &solver = {});

}  // namespace uqoc
