// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/mesh.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "uqoc/common.hpp"

namespace uqoc {

double signed_area(Point a, Point b, Point c) noexcept {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

namespace {

ElementGeometry make_geometry(Point a, Point b, Point c) {
  ElementGeometry g;
  g.area = signed_area(a, b, c);
  const double inv = 1.0 / (2.0 * g.area);
  // grad(lambda_k) = rot90(opposite edge) / (2 area)
  g.grad[0] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
  g.grad[1] = {(c.y - a.y) * inv, (a.x - c.x) * inv};
  g.grad[2] = {(a.y - b.y) * inv, (b.x - a.x) * inv};
  return g;
}

}  // namespace

Mesh2D::Mesh2D(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 2 || ny < 2) {
    throw InvalidArgument(
        fmt::format("mesh needs at least 2 cells per axis, got {}x{}", nx, ny));
  }
  if (!(lx > 0.0) || !(ly > 0.0)) {
    throw InvalidArgument("mesh lengths must be positive");
  }

  const double hx = lx / nx;
  const double hy = ly / ny;
  nodes_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  tags_.reserve(nodes_.capacity());
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      // Exact endpoints; avoids i*hx drifting past lx.
      const double x = (i == nx) ? lx : i * hx;
      const double y = (j == ny) ? ly : j * hy;
      nodes_.push_back({x, y});
      BoundaryTag tag = BoundaryTag::Interior;
      if (i == 0) {
        tag = BoundaryTag::DirichletLeft;
      } else if (i == nx) {
        tag = BoundaryTag::DirichletRight;
      } else if (j == 0) {
        tag = BoundaryTag::NeumannBottom;
      } else if (j == ny) {
        tag = BoundaryTag::NeumannTop;
      }
      tags_.push_back(tag);
    }
  }

  triangles_.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = node_index(i, j);
      const int n10 = node_index(i + 1, j);
      const int n11 = node_index(i + 1, j + 1);
      const int n01 = node_index(i, j + 1);
      triangles_.push_back({n00, n10, n11});
      triangles_.push_back({n00, n11, n01});
    }
  }

  geometry_.reserve(triangles_.size());
  for (const auto &t : triangles_) {
    geometry_.push_back(make_geometry(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]));
  }
}

std::optional<PointLocation> Mesh2D::locate(Point p) const {
  const double tol = 1e-12 * std::max(lx_, ly_);
  if (p.x < -tol || p.x > lx_ + tol || p.y < -tol || p.y > ly_ + tol) {
    return std::nullopt;
  }
  const double hx = lx_ / nx_;
  const double hy = ly_ / ny_;
  const int i = std::clamp(static_cast<int>(std::floor(p.x / hx)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(p.y / hy)), 0, ny_ - 1);
  const int cell = j * nx_ + i;
  for (int t : {2 * cell, 2 * cell + 1}) {
    const auto &tri = triangles_[t];
    const Point a = nodes_[tri[0]];
    const Point b = nodes_[tri[1]];
    const Point c = nodes_[tri[2]];
    const double area = geometry_[t].area;
    PointLocation loc;
    loc.triangle = t;
    loc.weights = {signed_area(p, b, c) / area, signed_area(a, p, c) / area,
                   signed_area(a, b, p) / area};
    if (std::all_of(loc.weights.begin(), loc.weights.end(),
                    [](double w) { return w >= -1e-12; })) {
      return loc;
    }
  }
  return std::nullopt;
}

Mesh2D build_mesh(int nx, int ny, double lx, double ly) {
  return Mesh2D(nx, ny, lx, ly);
}

}  // namespace uqoc
