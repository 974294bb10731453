// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "uqoc/fem.hpp"
#include "uqoc/mesh.hpp"
#include "uqoc/model.hpp"
#include "uqoc/sparse.hpp"

namespace uqoc {

/// Injection and production wells of the flow problem.
struct WellConfig {
  std::vector<Point> injection;
  std::vector<Point> production;
  /// Width of the Gaussian bump that replaces each point source.
  double sigma = 0.05;
  /// Desired pressure per production well; empty selects default_target().
  Vec target;
};

/// 3 - 8 (x - 1)^2 - 4 (y - 0.5)^2.
double default_target(Point p) noexcept;

/// nx * ny points x0 + i dx, y0 + j dy, x fastest.
std::vector<Point> uniform_grid(double x0, double dx, int nx, double y0, double dy,
                                int ny);

/// Dirichlet data g = a + b x on the left and right sides.
struct DirichletData {
  double a = 2.0;
  double b = -1.0;
};

/// Single-phase Darcy flow with log-permeability m and well controls z:
///
///   -div(e^m grad p) = sum_i z_i f_i,  p = g on x = 0, Lx,  no flux elsewhere.
///
/// The state is u = p - R_g with the lifting R_g = g extended linearly into
/// the domain, so u vanishes on the Dirichlet sides, and
///
///   Q(u) = sum_j (u(x^j) - ubar_j)^2.
///
/// Discretized with P1 elements on Mesh2D; the coefficient is e^m at the
/// triangle centroid. States live on the free (non-Dirichlet) nodes.
class EllipticModel final : public Model {
 public:
  EllipticModel(std::shared_ptr<const Mesh2D> mesh, WellConfig wells,
                DirichletData dirichlet = {}, SolverOptions solver = {});

  Eigen::Index param_dim() const noexcept override {
    return static_cast<Eigen::Index>(mesh_->num_nodes());
  }
  Eigen::Index state_dim() const noexcept override { return dofs_.num_free(); }
  Eigen::Index control_dim() const noexcept override { return loads_.cols(); }

  StateVector solve_state(const ParamVector &m, const ControlVector &z) const override;
  double eval_Q(const StateVector &u) const override;
  std::shared_ptr<const LinearizedModel> linearize(const ParamVector &m,
                                                   const ControlVector &z,
                                                   StateVector u) const override;

  const Mesh2D &mesh() const noexcept { return *mesh_; }
  const DofMap &dofs() const noexcept { return dofs_; }
  const WellConfig &wells() const noexcept { return wells_; }
  /// Nodal interpolant of the lifting R_g; equals g on the Dirichlet nodes.
  const Vec &lifting() const noexcept { return lifting_; }
  /// Free-node load vectors, one column per injection well.
  const Mat &loads() const noexcept { return loads_; }
  /// Nodal interpolation at the production wells (all nodes).
  const SparseMat &observation() const noexcept { return obs_; }
  /// 1 / (discrete integral of the unnormalized bump), per injection well.
  const Vec &source_scales() const noexcept { return source_scale_; }

  /// Pressure p = u + R_g at all nodes.
  Vec full_state(const StateVector &u) const { return dofs_.extend(u) + lifting_; }

  /// Reduced system A_ff(m) and right-hand side F z - (A R_g)_f.
  SparseMat system_matrix(const ParamVector &m) const;
  Vec system_rhs(const SparseMat &a_full, const ControlVector &z) const;

 private:
  friend class EllipticLinearization;

  std::shared_ptr<const Mesh2D> mesh_;
  WellConfig wells_;
  DirichletData dirichlet_;
  SolverOptions solver_;
  DofMap dofs_;
  Vec lifting_;
  Mat loads_;
  Vec source_scale_;
  SparseMat obs_;
  SparseMat obs_free_;
};

}  // namespace uqoc
