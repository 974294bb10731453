// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/hessian.hpp"

#include <cmath>

#include "uqoc/parallel.hpp"

namespace uqoc {

LinearizationPoint linearize(const Model &model, const ParamVector &mbar,
                             const ControlVector &z) {
  LinearizationPoint lp;
  lp.lin = model.linearize(mbar, z, model.solve_state(mbar, z));
  lp.v = solve_adjoint(*lp.lin);
  lp.Q = lp.lin->eval_Q();
  lp.grad = grad_m(*lp.lin, lp.v);
  return lp;
}

HessOp::HessOp(std::shared_ptr<const LinearizationPoint> lp) : lp_(std::move(lp)) {
  if (!lp_ || !lp_->lin) throw InvalidArgument("Hessian needs a linearization point");
}

Incrementals HessOp::incrementals(const ParamVector &mhat) const {
  Incrementals inc;
  inc.uhat = solve_inc_state(*lp_->lin, lp_->v, mhat);
  inc.vhat = solve_inc_adjoint(*lp_->lin, lp_->v, inc.uhat, mhat);
  return inc;
}

DualVector HessOp::assemble(const ParamVector &mhat, const Incrementals &inc) const {
  return lp_->form(FormTag::mv, inc.vhat) + lp_->form(FormTag::mu, inc.uhat) +
         lp_->form(FormTag::mm, mhat);
}

DualVector HessOp::apply(const ParamVector &mhat, Incrementals &inc) const {
  if (mhat.size() != dim()) throw InvalidArgument("Hessian direction has the wrong size");
  applies_.fetch_add(1);
  inc = incrementals(mhat);
  return assemble(mhat, inc);
}

DualVector HessOp::apply(const ParamVector &mhat) const {
  Incrementals inc;
  return apply(mhat, inc);
}

Vec PrecondHessOp::apply(const Vec &x) const {
  if (mode_ == Mode::Generalized) return prior_.apply_C(hess_.apply(x));
  return prior_.apply_sqrtC_transpose(hess_.apply(prior_.apply_sqrtC(x)));
}

Mat dense_precond_hessian(const PrecondHessOp &op) {
  if (op.mode() != PrecondHessOp::Mode::Symmetric) {
    throw InvalidArgument("dense preconditioned Hessian needs symmetric mode");
  }
  const Eigen::Index n = op.prior().dim();
  if (n > 500) throw InvalidArgument("dense preconditioned Hessian is limited to n <= 500");
  Mat h(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    h.col(jj) = op.apply(Vec::Unit(n, jj));
  });
  return 0.5 * (h + h.transpose());
}

double fd_relative_error(double fd, double analytic) noexcept {
  const double diff = std::abs(fd - analytic);
  if (diff == 0.0) return 0.0;
  if (analytic == 0.0) return diff;
  return diff / std::abs(analytic);
}

std::vector<double> decade_steps(int last) {
  std::vector<double> out;
  for (int k = 1; k <= last; ++k) out.push_back(std::pow(10.0, -k));
  return out;
}

std::vector<FdRow> fd_check_gradient(const Model &model, const ParamVector &mbar,
                                     const ControlVector &z, const ParamVector &mhat,
                                     const std::vector<double> &steps) {
  const LinearizationPoint lp = linearize(model, mbar, z);
  const double analytic = mhat.dot(lp.grad);
  std::vector<FdRow> rows(steps.size());
  parallel_for(steps.size(), [&](std::size_t i) {
    const double h = steps[i];
    const double qp = model.eval_Q(model.solve_state(mbar + h * mhat, z));
    const double qm = model.eval_Q(model.solve_state(mbar - h * mhat, z));
    const double fd = (qp - qm) / (2.0 * h);
    rows[i] = {h, fd, analytic, fd_relative_error(fd, analytic)};
  });
  return rows;
}

std::vector<FdRow> fd_check_hessian(const Model &model, const ParamVector &mbar,
                                    const ControlVector &z, const ParamVector &mhat,
                                    const ParamVector &mtilde,
                                    const std::vector<double> &steps) {
  auto lp = std::make_shared<const LinearizationPoint>(linearize(model, mbar, z));
  const HessOp hess(lp);
  const double analytic = mtilde.dot(hess.apply(mhat));
  std::vector<FdRow> rows(steps.size());
  parallel_for(steps.size(), [&](std::size_t i) {
    const double h = steps[i];
    const double gp = mtilde.dot(linearize(model, mbar + h * mhat, z).grad);
    const double gm = mtilde.dot(linearize(model, mbar - h * mhat, z).grad);
    const double fd = (gp - gm) / (2.0 * h);
    rows[i] = {h, fd, analytic, fd_relative_error(fd, analytic)};
  });
  return rows;
}

}  // namespace uqoc
