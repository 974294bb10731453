// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/fem.hpp"

#include <cmath>

namespace uqoc {

MassMatrices assemble_mass(const Mesh2D &mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles()[t];
    const double a = mesh.geometry()[t].area;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        trip.emplace_back(tri[i], tri[j], a / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  MassMatrices out{from_triplets(n, n, trip, true), Vec()};
  out.lumped = out.consistent.data() * Vec::Ones(n);
  return out;
}

Vec centroid_values(const Mesh2D &mesh, const Vec &field) {
  Vec out(static_cast<Eigen::Index>(mesh.num_triangles()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles()[t];
    out[static_cast<Eigen::Index>(t)] =
        (field[tri[0]] + field[tri[1]] + field[tri[2]]) / 3.0;
  }
  return out;
}

Vec element_weights(const Mesh2D &mesh, const Vec &m) {
  Vec w = centroid_values(mesh, m).array().exp();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    w[static_cast<Eigen::Index>(t)] *= mesh.geometry()[t].area;
  }
  return w;
}

std::array<double, 2> element_gradient(const Mesh2D &mesh, int t,
                                       const Vec &field) {
  const auto &tri = mesh.triangles()[t];
  const auto &g = mesh.geometry()[t].grad;
  std::array<double, 2> out{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    out[0] += field[tri[k]] * g[k][0];
    out[1] += field[tri[k]] * g[k][1];
  }
  return out;
}

SparseMat assemble_stiffness(const Mesh2D &mesh, const Tensor2 &theta,
                             const std::optional<Vec> &coeff) {
  if (!theta.is_spd()) {
    throw InvalidArgument("stiffness tensor must be symmetric positive definite");
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  if (coeff && coeff->size() != n) {
    throw InvalidArgument("coefficient field must be nodal");
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles()[t];
    const auto &geo = mesh.geometry()[t];
    double kappa = 1.0;
    if (coeff) {
      kappa = std::exp(((*coeff)[tri[0]] + (*coeff)[tri[1]] + (*coeff)[tri[2]]) / 3.0);
    }
    const double w = kappa * geo.area;
    // Upper triangle mirrored so the element matrix is exactly symmetric.
    for (int i = 0; i < 3; ++i) {
      const auto &gi = geo.grad[i];
      const double tx = theta.t11 * gi[0] + theta.t12 * gi[1];
      const double ty = theta.t12 * gi[0] + theta.t22 * gi[1];
      for (int j = i; j < 3; ++j) {
        const auto &gj = geo.grad[j];
        const double v = w * (tx * gj[0] + ty * gj[1]);
        trip.emplace_back(tri[i], tri[j], v);
        if (j != i) trip.emplace_back(tri[j], tri[i], v);
      }
    }
  }
  return from_triplets(n, n, trip, true);
}

}  // namespace uqoc
