// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/problem.hpp"

#include <fmt/format.h>

namespace uqoc {

Problem build_problem(const ProblemSpec &spec, const SolverOptions &solver) {
  if (!(spec.z_min <= spec.z_max)) {
    throw InvalidArgument(fmt::format("empty control box [{}, {}]", spec.z_min, spec.z_max));
  }
  if (spec.z0 < spec.z_min || spec.z0 > spec.z_max) {
    throw InvalidArgument(fmt::format("initial control {} outside [{}, {}]", spec.z0,
                                      spec.z_min, spec.z_max));
  }
  Problem p;
  p.spec = spec;
  p.mesh = std::make_shared<const Mesh2D>(spec.nx, spec.ny, spec.lx, spec.ly);

  WellConfig wells;
  wells.injection = spec.injection;
  wells.production = spec.production;
  wells.sigma = spec.sigma;
  p.model = std::make_unique<EllipticModel>(p.mesh, std::move(wells), spec.dirichlet, solver);

  const Vec mean = Vec::Constant(static_cast<Eigen::Index>(p.mesh->num_nodes()), spec.mean);
  p.prior = std::make_unique<MaternPrior>(p.mesh, mean, spec.alpha1, spec.alpha2, spec.theta,
                                          solver);

  const Eigen::Index nc = p.model->control_dim();
  p.lower = Vec::Constant(nc, spec.z_min);
  p.upper = Vec::Constant(nc, spec.z_max);
  p.z0 = Vec::Constant(nc, spec.z0);
  return p;
}

}  // namespace uqoc
