// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "uqoc/common.hpp"
#include "uqoc/mesh.hpp"
#include "uqoc/sparse.hpp"

namespace uqoc {

/// Symmetric 2x2 tensor [t11 t12; t12 t22].
struct Tensor2 {
  double t11 = 1.0;
  double t12 = 0.0;
  double t22 = 1.0;

  static Tensor2 identity() { return {}; }
  bool is_spd() const noexcept { return t11 > 0.0 && t11 * t22 - t12 * t12 > 0.0; }
};

struct MassMatrices {
  SparseMat consistent;
  Vec lumped;  // row sums of the consistent matrix
};

MassMatrices assemble_mass(const Mesh2D &mesh);

/// P1 stiffness for -div(kappa Theta grad). With a nodal coefficient field m,
/// kappa = exp(m) evaluated once per triangle at its centroid (the average of
/// the three vertex values); without one, kappa = 1.
SparseMat assemble_stiffness(const Mesh2D &mesh, const Tensor2 &theta,
                             const std::optional<Vec> &coeff = std::nullopt);

/// Per-triangle area * exp(centroid value of m).
Vec element_weights(const Mesh2D &mesh, const Vec &m);

/// Centroid value of a nodal field on every triangle.
Vec centroid_values(const Mesh2D &mesh, const Vec &field);

/// Constant gradient of a nodal P1 field on triangle t.
std::array<double, 2> element_gradient(const Mesh2D &mesh, int t,
                                       const Vec &field);

/// Nodal interpolant of f.
template <class F>
Vec interpolate(const Mesh2D &mesh, F &&f) {
  Vec out(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    out[static_cast<Eigen::Index>(i)] = f(mesh.nodes()[i]);
  }
  return out;
}

}  // namespace uqoc
