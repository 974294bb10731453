// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <vector>

#include "uqoc/model.hpp"
#include "uqoc/prior.hpp"

namespace uqoc {

/// State, adjoint, objective value and m-gradient at (mbar, z).
struct LinearizationPoint {
  std::shared_ptr<const LinearizedModel> lin;
  AdjointVector v;
  double Q = 0.0;
  DualVector grad;

  const ParamVector &mbar() const noexcept { return lin->m(); }
  const ControlVector &z() const noexcept { return lin->z(); }
  const StateVector &u() const noexcept { return lin->u(); }
  Vec form(FormTag tag, const Vec &p = Vec(), const Vec &q = Vec()) const {
    return lin->form(tag, v, p, q);
  }
};

/// One state solve and one adjoint solve.
LinearizationPoint linearize(const Model &model, const ParamVector &mbar,
                             const ControlVector &z);

struct Incrementals {
  StateVector uhat;
  AdjointVector vhat;
};

/// Hessian of Q with respect to m at a linearization point, applied through
/// an incremental state and an incremental adjoint solve.
class HessOp {
 public:
  explicit HessOp(std::shared_ptr<const LinearizationPoint> lp);

  const LinearizationPoint &point() const noexcept { return *lp_; }
  Eigen::Index dim() const noexcept { return lp_->mbar().size(); }

  /// Two linear solves.
  DualVector apply(const ParamVector &mhat) const;
  DualVector apply(const ParamVector &mhat, Incrementals &inc) const;

  /// Two linear solves.
  Incrementals incrementals(const ParamVector &mhat) const;
  /// Hessian action from precomputed incrementals; no solves.
  DualVector assemble(const ParamVector &mhat, const Incrementals &inc) const;

  long long applies() const noexcept { return applies_.load(); }

 private:
  std::shared_ptr<const LinearizationPoint> lp_;
  mutable std::atomic<long long> applies_{0};
};

inline DualVector hess_apply(const HessOp &op, const ParamVector &mhat) {
  return op.apply(mhat);
}

/// Covariance-preconditioned Hessian. Generalized mode applies C Q_mm (the
/// operator whose eigenvalues solve Q_mm psi = lambda C^-1 psi); symmetric
/// mode applies S^T Q_mm S with C = S S^T.
class PrecondHessOp {
 public:
  enum class Mode { Generalized, Symmetric };

  PrecondHessOp(const HessOp &hess, const Prior &prior, Mode mode)
      : hess_(hess), prior_(prior), mode_(mode) {}

  Vec apply(const Vec &x) const;
  Mode mode() const noexcept { return mode_; }
  const HessOp &hess() const noexcept { return hess_; }
  const Prior &prior() const noexcept { return prior_; }

 private:
  const HessOp &hess_;
  const Prior &prior_;
  Mode mode_;
};

/// Dense S^T Q_mm S, symmetrized. Requires symmetric mode and n <= 500.
Mat dense_precond_hessian(const PrecondHessOp &op);

struct FdRow {
  double step = 0.0;
  double fd = 0.0;
  double analytic = 0.0;
  double rel_error = 0.0;
};

/// Central differences of Q(mbar + h mhat) against <mhat, grad>, per step.
std::vector<FdRow> fd_check_gradient(const Model &model, const ParamVector &mbar,
                                     const ControlVector &z, const ParamVector &mhat,
                                     const std::vector<double> &steps);

/// Central differences of <mtilde, grad(mbar + h mhat)> against
/// <mtilde, Q_mm mhat>, per step.
std::vector<FdRow> fd_check_hessian(const Model &model, const ParamVector &mbar,
                                    const ControlVector &z, const ParamVector &mhat,
                                    const ParamVector &mtilde,
                                    const std::vector<double> &steps);

/// |fd - analytic| / |analytic|; 0 when both vanish.
double fd_relative_error(double fd, double analytic) noexcept;

/// 10^-1, 10^-2, ..., 10^-last.
std::vector<double> decade_steps(int last);

}  // namespace uqoc
