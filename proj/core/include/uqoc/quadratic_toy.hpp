// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "uqoc/model.hpp"

namespace uqoc {

/// Exactly quadratic model with identity state map:
///
///   r = <v, u - m - E z>,
///   Q(u) = q0 + <g, u - mbar> + 1/2 <u - mbar, H (u - mbar)>,
///
/// with H = W S W^T given by a factor W (n x r) and a symmetric core S (r x r).
/// E is an optional control coupling (n x n_c); with n_c = 0 the state is m.
class QuadraticToyModel final : public Model {
 public:
  QuadraticToyModel(ParamVector mbar, double q0, Vec g, Mat factor, Mat core,
                    Mat coupling = Mat());

  Eigen::Index param_dim() const noexcept override { return mbar_.size(); }
  Eigen::Index state_dim() const noexcept override { return mbar_.size(); }
  Eigen::Index control_dim() const noexcept override { return coupling_.cols(); }

  StateVector solve_state(const ParamVector &m, const ControlVector &z) const override;
  double eval_Q(const StateVector &u) const override;
  std::shared_ptr<const LinearizedModel> linearize(const ParamVector &m,
                                                   const ControlVector &z,
                                                   StateVector u) const override;

  const ParamVector &mbar() const noexcept { return mbar_; }
  double q0() const noexcept { return q0_; }
  const Vec &g() const noexcept { return g_; }
  const Mat &coupling() const noexcept { return coupling_; }
  Vec apply_H(const Vec &x) const { return factor_ * (core_ * (factor_.transpose() * x)); }
  Mat dense_H() const { return factor_ * core_ * factor_.transpose(); }

 private:
  ParamVector mbar_;
  double q0_;
  Vec g_;
  Mat factor_;
  Mat core_;
  Mat coupling_;
};

}  // namespace uqoc
