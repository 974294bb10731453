// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/elliptic.hpp"

#include <cmath>

#include <fmt/format.h>

namespace uqoc {

double default_target(Point p) noexcept {
  return 3.0 - 8.0 * (p.x - 1.0) * (p.x - 1.0) - 4.0 * (p.y - 0.5) * (p.y - 0.5);
}

std::vector<Point> uniform_grid(double x0, double dx, int nx, double y0, double dy,
                                int ny) {
  if (nx < 0 || ny < 0) throw InvalidArgument("grid counts must be non-negative");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) out.push_back({x0 + i * dx, y0 + j * dy});
  }
  return out;
}

namespace {

bool strictly_inside(const Mesh2D &mesh, Point p) {
  return p.x > 0.0 && p.x < mesh.lx() && p.y > 0.0 && p.y < mesh.ly();
}

// out_i = sum_t c_t grad(a) . grad(phi_i) over free nodes i.
Vec state_kernel(const Mesh2D &mesh, const DofMap &dofs, const Vec &c, const Vec &a) {
  Vec out = Vec::Zero(dofs.num_free());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double ct = c[static_cast<Eigen::Index>(t)];
    if (ct == 0.0) continue;
    const auto ga = element_gradient(mesh, static_cast<int>(t), a);
    const auto &tri = mesh.triangles()[t];
    const auto &g = mesh.geometry()[t].grad;
    for (int k = 0; k < 3; ++k) {
      const int fi = dofs.free_index(tri[k]);
      if (fi >= 0) out[fi] += ct * (ga[0] * g[k][0] + ga[1] * g[k][1]);
    }
  }
  return out;
}

// out_k = sum_t c_t grad(a) . grad(b) / 3 over the vertices k of t; the 1/3 is
// the derivative of the centroid value with respect to a vertex value.
Vec param_kernel(const Mesh2D &mesh, const Vec &c, const Vec &a, const Vec &b) {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto ga = element_gradient(mesh, static_cast<int>(t), a);
    const auto gb = element_gradient(mesh, static_cast<int>(t), b);
    const double val =
        c[static_cast<Eigen::Index>(t)] * (ga[0] * gb[0] + ga[1] * gb[1]) / 3.0;
    for (int node : mesh.triangles()[t]) out[node] += val;
  }
  return out;
}

SolverError with_context(const SolverError &e, const ParamVector &m,
                         const ControlVector &z) {
  return SolverError(e.kind(),
                     fmt::format("{} (|m|_inf = {}, |z|_inf = {})", e.what(),
                                 m.size() ? m.cwiseAbs().maxCoeff() : 0.0,
                                 z.size() ? z.cwiseAbs().maxCoeff() : 0.0));
}

}  // namespace

class EllipticLinearization final : public LinearizedModel {
 public:
  EllipticLinearization(const EllipticModel &model, ParamVector m, ControlVector z,
                        StateVector u, SolverHandle solver)
      : LinearizedModel(std::move(m), std::move(z), std::move(u), model.counter_ptr(),
                        model.state_dim()),
        model_(model),
        solver_(std::move(solver)),
        weights_(element_weights(model.mesh(), this->m())),
        u_full_(model.full_state(this->u())) {}

  StateVector solve_vu(const Vec &rhs) const override {
    counter().add_linear();
    return solver_.solve(rhs);
  }
  AdjointVector solve_uv(const Vec &rhs) const override {
    counter().add_linear();
    return solver_.solve(rhs);
  }

 protected:
  double eval_Q_impl() const override { return model_.eval_Q(u()); }

  Vec form_impl(FormTag tag, const AdjointVector &v, const Vec &p,
                const Vec &q) const override {
    const Mesh2D &mesh = model_.mesh();
    const DofMap &dofs = model_.dofs();
    auto ext = [&](const Vec &x) { return dofs.extend(x); };
    auto centroid = [&](const Vec &x) { return centroid_values(mesh, x); };
    auto weighted = [&](const Vec &x) -> Vec { return weights_.cwiseProduct(centroid(x)); };
    auto weighted2 = [&](const Vec &x, const Vec &y) -> Vec {
      return weights_.cwiseProduct(centroid(x)).cwiseProduct(centroid(y));
    };
    const Eigen::Index nu = dofs.num_free();
    const Eigen::Index nz = model_.control_dim();

    switch (tag) {
      case FormTag::M:
        return param_kernel(mesh, weights_, u_full_, ext(v));
      case FormTag::Z:
        return -model_.loads().transpose() * v;
      case FormTag::vu:
      case FormTag::uv:
        return state_kernel(mesh, dofs, weights_, ext(p));
      case FormTag::vm:
        return state_kernel(mesh, dofs, weighted(p), u_full_);
      case FormTag::um:
        return state_kernel(mesh, dofs, weighted(p), ext(v));
      case FormTag::mv:
        return param_kernel(mesh, weights_, u_full_, ext(p));
      case FormTag::mu:
        return param_kernel(mesh, weights_, ext(p), ext(v));
      case FormTag::mm:
        return param_kernel(mesh, weighted(p), u_full_, ext(v));
      case FormTag::zv:
        return -model_.loads().transpose() * p;
      case FormTag::vmu:
        return state_kernel(mesh, dofs, weighted(p), ext(q));
      case FormTag::vmm:
        return state_kernel(mesh, dofs, weighted2(p, q), u_full_);
      case FormTag::vum:
        return state_kernel(mesh, dofs, weighted(q), ext(p));
      case FormTag::umv:
        return state_kernel(mesh, dofs, weighted(p), ext(q));
      case FormTag::umm:
        return state_kernel(mesh, dofs, weighted2(p, q), ext(v));
      case FormTag::uvm:
        return state_kernel(mesh, dofs, weighted(q), ext(p));
      case FormTag::Qu: {
        const Vec r = model_.obs_free_ * u() - model_.wells_.target;
        return 2.0 * (model_.obs_free_.data().transpose() * r);
      }
      case FormTag::Quu:
        return 2.0 * (model_.obs_free_.data().transpose() * (model_.obs_free_ * p));
      // The residual is linear in u and v and independent of m in the
      // objective, so the remaining forms vanish.
      case FormTag::uu:
      case FormTag::vuu:
      case FormTag::umu:
      case FormTag::uum:
      case FormTag::uvu:
      case FormTag::uuv:
      case FormTag::uuu:
      case FormTag::Quuu:
        return Vec::Zero(nu);
      case FormTag::zu:
      case FormTag::zm:
        return Vec::Zero(nz);
    }
    throw InvalidArgument("unknown form tag");
  }

 private:
  const EllipticModel &model_;
  SolverHandle solver_;
  Vec weights_;
  Vec u_full_;
};

EllipticModel::EllipticModel(std::shared_ptr<const Mesh2D> mesh, WellConfig wells,
                             DirichletData dirichlet, SolverOptions solver)
    : mesh_(std::move(mesh)),
      wells_(std::move(wells)),
      dirichlet_(dirichlet),
      solver_(solver) {
  if (!(wells_.sigma > 0.0)) throw InvalidArgument("mollifier width must be positive");
  if (wells_.production.empty()) throw InvalidArgument("need at least one production well");
  for (const auto &p : wells_.injection) {
    if (!strictly_inside(*mesh_, p)) {
      throw InvalidArgument(
          fmt::format("injection well ({}, {}) is not inside the domain", p.x, p.y));
    }
  }
  const auto nn = static_cast<Eigen::Index>(mesh_->num_nodes());
  std::vector<bool> fixed(mesh_->num_nodes());
  for (std::size_t i = 0; i < mesh_->num_nodes(); ++i) {
    fixed[i] = mesh_->is_dirichlet(static_cast<int>(i));
  }
  dofs_ = DofMap(fixed);
  lifting_ = interpolate(*mesh_, [&](Point x) { return dirichlet_.a + dirichlet_.b * x.x; });

  const MassMatrices mass = assemble_mass(*mesh_);
  const auto nc = static_cast<Eigen::Index>(wells_.injection.size());
  loads_.resize(dofs_.num_free(), nc);
  source_scale_.resize(nc);
  const double s2 = 2.0 * wells_.sigma * wells_.sigma;
  for (Eigen::Index i = 0; i < nc; ++i) {
    const Point c = wells_.injection[static_cast<std::size_t>(i)];
    const Vec bump = interpolate(*mesh_, [&](Point x) {
      const double dx = x.x - c.x;
      const double dy = x.y - c.y;
      return std::exp(-(dx * dx + dy * dy) / s2);
    });
    const Vec load = mass.consistent * bump;
    const double integral = load.sum();
    source_scale_[i] = 1.0 / integral;
    loads_.col(i) = dofs_.restrict_free(load) / integral;
  }

  const auto np = static_cast<Eigen::Index>(wells_.production.size());
  if (wells_.target.size() == 0) {
    wells_.target.resize(np);
    for (Eigen::Index j = 0; j < np; ++j) {
      wells_.target[j] = default_target(wells_.production[static_cast<std::size_t>(j)]);
    }
  } else if (wells_.target.size() != np) {
    throw InvalidArgument("target pressure count does not match production wells");
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index j = 0; j < np; ++j) {
    const Point p = wells_.production[static_cast<std::size_t>(j)];
    const auto loc = strictly_inside(*mesh_, p) ? mesh_->locate(p) : std::nullopt;
    if (!loc) {
      throw InvalidArgument(
          fmt::format("production well ({}, {}) is not inside the domain", p.x, p.y));
    }
    const auto &tri = mesh_->triangles()[static_cast<std::size_t>(loc->triangle)];
    for (int k = 0; k < 3; ++k) {
      if (loc->weights[k] == 0.0) continue;
      trip.emplace_back(j, tri[k], loc->weights[k]);
    }
  }
  obs_ = from_triplets(np, nn, trip, false);
  std::vector<Eigen::Triplet<double>> trip_free;
  for (const auto &t : trip) {
    const int fi = dofs_.free_index(t.col());
    if (fi >= 0) trip_free.emplace_back(t.row(), fi, t.value());
  }
  obs_free_ = from_triplets(np, dofs_.num_free(), trip_free, false);
}

SparseMat EllipticModel::system_matrix(const ParamVector &m) const {
  return dofs_.free_block(assemble_stiffness(*mesh_, Tensor2::identity(), m));
}

Vec EllipticModel::system_rhs(const SparseMat &a_full, const ControlVector &z) const {
  return loads_ * z - dofs_.restrict_free(a_full * lifting_);
}

StateVector EllipticModel::solve_state(const ParamVector &m, const ControlVector &z) const {
  check_dims(m, z);
  counter().add_state();
  const SparseMat a_full = assemble_stiffness(*mesh_, Tensor2::identity(), m);
  try {
    const SolverHandle h = factorize(dofs_.free_block(a_full), solver_);
    return h.solve(system_rhs(a_full, z));
  } catch (const SolverError &e) {
    throw with_context(e, m, z);
  }
}

double EllipticModel::eval_Q(const StateVector &u) const {
  if (u.size() != state_dim()) throw InvalidArgument("state has the wrong size");
  return (obs_free_ * u - wells_.target).squaredNorm();
}

std::shared_ptr<const LinearizedModel> EllipticModel::linearize(const ParamVector &m,
                                                                const ControlVector &z,
                                                                StateVector u) const {
  check_dims(m, z);
  if (u.size() != state_dim()) throw InvalidArgument("state has the wrong size");
  SolverHandle h;
  try {
    h = factorize(system_matrix(m), solver_);
  } catch (const SolverError &e) {
    throw with_context(e, m, z);
  }
  return std::make_shared<EllipticLinearization>(*this, m, z, std::move(u), std::move(h));
}

}  // namespace uqoc
