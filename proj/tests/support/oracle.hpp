// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

// Dense reference computations used as test oracles. Everything here is
// assembled element by element from vertex coordinates with plain dense
// algebra, independent of the library's sparse assembly and solvers.

#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "uqoc/elliptic.hpp"
#include "uqoc/mesh.hpp"
#include "uqoc/problem.hpp"

namespace uqoc::oracle {

struct Tri {
  std::array<Point, 3> p;
  std::array<int, 3> idx;

  double area() const {
    return 0.5 * std::abs((p[1].x - p[0].x) * (p[2].y - p[0].y) -
                          (p[2].x - p[0].x) * (p[1].y - p[0].y));
  }
  // Gradients of the three hat functions.
  std::array<std::array<double, 2>, 3> grads() const {
    const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) -
                       (p[2].x - p[0].x) * (p[1].y - p[0].y);
    std::array<std::array<double, 2>, 3> g{};
    for (int k = 0; k < 3; ++k) {
      const Point &a = p[(k + 1) % 3];
      const Point &b = p[(k + 2) % 3];
      g[k] = {(a.y - b.y) / det, (b.x - a.x) / det};
    }
    return g;
  }
};

inline std::vector<Tri> triangles(const Mesh2D &mesh) {
  std::vector<Tri> out;
  for (const auto &t : mesh.triangles()) {
    Tri tri;
    for (int k = 0; k < 3; ++k) {
      tri.idx[k] = t[k];
      tri.p[k] = mesh.nodes()[t[k]];
    }
    out.push_back(tri);
  }
  return out;
}

/// Dense stiffness of -div(exp(m) grad) with exp(m) at the centroid.
inline Mat stiffness(const Mesh2D &mesh, const Vec &m) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  Mat a = Mat::Zero(n, n);
  for (const Tri &t : triangles(mesh)) {
    const double c = std::exp((m[t.idx[0]] + m[t.idx[1]] + m[t.idx[2]]) / 3.0) * t.area();
    const auto g = t.grads();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a(t.idx[i], t.idx[j]) += c * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
      }
    }
  }
  return a;
}

inline Mat mass(const Mesh2D &mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  Mat mm = Mat::Zero(n, n);
  for (const Tri &t : triangles(mesh)) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) mm(t.idx[i], t.idx[j]) += t.area() * (i == j ? 2.0 : 1.0) / 12.0;
    }
  }
  return mm;
}

/// Row of nodal interpolation weights at p, by brute-force barycentric search.
inline Vec interpolation_row(const Mesh2D &mesh, Point q) {
  Vec row = Vec::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (const Tri &t : triangles(mesh)) {
    const auto &p = t.p;
    const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    const double l1 = ((q.x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (q.y - p[0].y)) / det;
    const double l2 = ((p[1].x - p[0].x) * (q.y - p[0].y) - (q.x - p[0].x) * (p[1].y - p[0].y)) / det;
    const double l0 = 1.0 - l1 - l2;
    const double tol = -1e-12;
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      row[t.idx[0]] = l0;
      row[t.idx[1]] = l1;
      row[t.idx[2]] = l2;
      return row;
    }
  }
  return row;
}

/// The porous-medium problem assembled densely.
struct DenseFlow {
  std::shared_ptr<const Mesh2D> mesh;
  std::vector<int> free;     // free node ids
  Vec lifting;               // a + b x at all nodes
  Mat loads;                 // full nodes x wells
  Mat obs;                   // wells x full nodes
  Vec target;

  DenseFlow(std::shared_ptr<const Mesh2D> m, const ProblemSpec &spec) : mesh(std::move(m)) {
    const auto n = static_cast<Eigen::Index>(mesh->num_nodes());
    lifting.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Point p = mesh->nodes()[static_cast<std::size_t>(i)];
      lifting[i] = spec.dirichlet.a + spec.dirichlet.b * p.x;
      const bool fixed = std::abs(p.x) < 1e-14 || std::abs(p.x - mesh->lx()) < 1e-14;
      if (!fixed) free.push_back(static_cast<int>(i));
    }
    const Mat mm = mass(*mesh);
    loads.resize(n, static_cast<Eigen::Index>(spec.injection.size()));
    for (std::size_t w = 0; w < spec.injection.size(); ++w) {
      Vec bump(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Point p = mesh->nodes()[static_cast<std::size_t>(i)];
        const double dx = p.x - spec.injection[w].x;
        const double dy = p.y - spec.injection[w].y;
        bump[i] = std::exp(-(dx * dx + dy * dy) / (2.0 * spec.sigma * spec.sigma));
      }
      const Vec l = mm * bump;
      loads.col(static_cast<Eigen::Index>(w)) = l / l.sum();
    }
    obs.resize(static_cast<Eigen::Index>(spec.production.size()), n);
    target.resize(static_cast<Eigen::Index>(spec.production.size()));
    for (std::size_t j = 0; j < spec.production.size(); ++j) {
      obs.row(static_cast<Eigen::Index>(j)) = interpolation_row(*mesh, spec.production[j]).transpose();
      target[static_cast<Eigen::Index>(j)] = default_target(spec.production[j]);
    }
  }

  Eigen::Index num_free() const { return static_cast<Eigen::Index>(free.size()); }

  Mat restrict_rows(const Mat &a) const {
    Mat out(num_free(), a.cols());
    for (Eigen::Index i = 0; i < num_free(); ++i) out.row(i) = a.row(free[static_cast<std::size_t>(i)]);
    return out;
  }
  Mat free_block(const Mat &a) const {
    Mat out(num_free(), num_free());
    for (Eigen::Index i = 0; i < num_free(); ++i) {
      for (Eigen::Index j = 0; j < num_free(); ++j) {
        out(i, j) = a(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
      }
    }
    return out;
  }
  Vec extend(const Vec &u) const {
    Vec full = Vec::Zero(lifting.size());
    for (Eigen::Index i = 0; i < num_free(); ++i) full[free[static_cast<std::size_t>(i)]] = u[i];
    return full;
  }

  /// A_ff u - (F z - (A R_g)_f).
  Vec residual(const Vec &u, const Vec &m, const Vec &z) const {
    const Mat a = stiffness(*mesh, m);
    return free_block(a) * u - restrict_rows(loads) * z + restrict_rows(a * lifting);
  }
  Vec solve(const Vec &m, const Vec &z) const {
    const Mat a = stiffness(*mesh, m);
    const Vec rhs = restrict_rows(loads) * z - restrict_rows(a * lifting);
    return free_block(a).fullPivLu().solve(rhs);
  }
  double Q(const Vec &u) const { return (obs * extend(u) - target).squaredNorm(); }
};

/// Central difference of a vector-valued function along one direction.
template <class F>
Vec central(F &&f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

}  // namespace uqoc::oracle
