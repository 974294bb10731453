// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/quadratic_toy.hpp"

#include <fmt/format.h>

namespace uqoc {

class ToyLinearization final : public LinearizedModel {
 public:
  ToyLinearization(const QuadraticToyModel &model, ParamVector m, ControlVector z,
                   StateVector u)
      : LinearizedModel(std::move(m), std::move(z), std::move(u), model.counter_ptr(),
                        model.state_dim()),
        model_(model) {}

  StateVector solve_vu(const Vec &rhs) const override {
    counter().add_linear();
    return rhs;
  }
  AdjointVector solve_uv(const Vec &rhs) const override {
    counter().add_linear();
    return rhs;
  }

 protected:
  double eval_Q_impl() const override { return model_.eval_Q(u()); }

  Vec form_impl(FormTag tag, const AdjointVector &v, const Vec &p,
                const Vec &) const override {
    const Eigen::Index n = model_.state_dim();
    const Eigen::Index nc = model_.control_dim();
    switch (tag) {
      case FormTag::M:
        return -v;
      case FormTag::Z:
        return -model_.coupling().transpose() * v;
      case FormTag::vu:
      case FormTag::uv:
        return p;
      case FormTag::vm:
      case FormTag::mv:
        return -p;
      case FormTag::zv:
        return -model_.coupling().transpose() * p;
      case FormTag::Qu:
        return model_.g() + model_.apply_H(u() - model_.mbar());
      case FormTag::Quu:
        return model_.apply_H(p);
      case FormTag::zu:
      case FormTag::zm:
        return Vec::Zero(nc);
      default:
        return Vec::Zero(n);
    }
  }

 private:
  const QuadraticToyModel &model_;
};

QuadraticToyModel::QuadraticToyModel(ParamVector mbar, double q0, Vec g, Mat factor,
                                     Mat core, Mat coupling)
    : mbar_(std::move(mbar)),
      q0_(q0),
      g_(std::move(g)),
      factor_(std::move(factor)),
      core_(std::move(core)),
      coupling_(std::move(coupling)) {
  const Eigen::Index n = mbar_.size();
  if (n == 0) throw InvalidArgument("toy model needs a positive dimension");
  if (g_.size() != n) throw InvalidArgument("toy gradient has the wrong size");
  if (factor_.size() == 0) factor_.resize(n, 0);
  if (factor_.rows() != n || core_.rows() != factor_.cols() ||
      core_.cols() != factor_.cols()) {
    throw InvalidArgument(fmt::format(
        "toy Hessian factors have shapes {}x{} and {}x{}", factor_.rows(),
        factor_.cols(), core_.rows(), core_.cols()));
  }
  if (core_.size() > 0 && (core_ - core_.transpose()).cwiseAbs().maxCoeff() >
                              1e-12 * std::max(1.0, core_.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("toy Hessian must be symmetric");
  }
  if (coupling_.size() == 0) coupling_.resize(n, 0);
  if (coupling_.rows() != n) throw InvalidArgument("toy coupling has the wrong row count");
}

StateVector QuadraticToyModel::solve_state(const ParamVector &m,
                                           const ControlVector &z) const {
  check_dims(m, z);
  counter().add_state();
  return m + coupling_ * z;
}

double QuadraticToyModel::eval_Q(const StateVector &u) const {
  if (u.size() != state_dim()) throw InvalidArgument("state has the wrong size");
  const Vec d = u - mbar_;
  return q0_ + g_.dot(d) + 0.5 * d.dot(apply_H(d));
}

std::shared_ptr<const LinearizedModel> QuadraticToyModel::linearize(
    const ParamVector &m, const ControlVector &z, StateVector u) const {
  check_dims(m, z);
  if (u.size() != state_dim()) throw InvalidArgument("state has the wrong size");
  return std::make_shared<ToyLinearization>(*this, m, z, std::move(u));
}

}  // namespace uqoc
