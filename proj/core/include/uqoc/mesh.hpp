// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace uqoc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryTag : std::uint8_t {
  Interior,
  DirichletLeft,
  DirichletRight,
  NeumannBottom,
  NeumannTop,
};

/// Constant P1 data of one triangle: area and the gradients of its three hat
/// functions.
struct ElementGeometry {
  double area = 0.0;
  std::array<std::array<double, 2>, 3> grad{};
};

/// A located point: containing triangle and barycentric weights.
struct PointLocation {
  int triangle = -1;
  std::array<double, 3> weights{};
};

/// Structured triangulation of [0, Lx] x [0, Ly]. Nodes are numbered
/// lexicographically with x fastest; every cell is split along its
/// lower-left to upper-right diagonal. Corner nodes belong to the Dirichlet
/// sides.
class Mesh2D {
 public:
  Mesh2D(int nx, int ny, double lx, double ly);

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }

  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }

  const std::vector<Point> &nodes() const noexcept { return nodes_; }
  const std::vector<std::array<int, 3>> &triangles() const noexcept {
    return triangles_;
  }
  const std::vector<ElementGeometry> &geometry() const noexcept {
    return geometry_;
  }
  const std::vector<BoundaryTag> &tags() const noexcept { return tags_; }

  int node_index(int i, int j) const noexcept { return j * (nx_ + 1) + i; }
  bool is_dirichlet(int node) const noexcept {
    return tags_[node] == BoundaryTag::DirichletLeft ||
           tags_[node] == BoundaryTag::DirichletRight;
  }

  /// Triangle containing p (closed), or nullopt when p is outside the domain.
  std::optional<PointLocation> locate(Point p) const;

  /// Same mesh with h halved in both directions.
  Mesh2D refined() const { return Mesh2D(2 * nx_, 2 * ny_, lx_, ly_); }

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<ElementGeometry> geometry_;
  std::vector<BoundaryTag> tags_;
};

Mesh2D build_mesh(int nx, int ny, double lx, double ly);

/// Signed area of the triangle (a, b, c); positive for counter-clockwise order.
double signed_area(Point a, Point b, Point c) noexcept;

}  // namespace uqoc
