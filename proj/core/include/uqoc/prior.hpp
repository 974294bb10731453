// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "uqoc/common.hpp"
#include "uqoc/fem.hpp"
#include "uqoc/mesh.hpp"
#include "uqoc/rng.hpp"
#include "uqoc/sparse.hpp"

namespace uqoc {

/// Gaussian measure N(mean, C) on parameter vectors, accessed through the
/// actions of C, C^-1 and a square-root factor S with C = S S^T.
class Prior {
 public:
  virtual ~Prior() = default;

  virtual Eigen::Index dim() const noexcept = 0;
  virtual const ParamVector &mean() const noexcept = 0;

  virtual ParamVector apply_C(const DualVector &g) const = 0;
  virtual DualVector apply_Cinv(const ParamVector &p) const = 0;
  virtual ParamVector apply_sqrtC(const Vec &xi) const = 0;
  virtual Vec apply_sqrtC_transpose(const DualVector &g) const = 0;

  /// mean + S xi with xi ~ N(0, I) drawn from rng.
  ParamVector sample(Rng &rng) const {
    return mean() + apply_sqrtC(rng.normal_vector(dim()));
  }

  /// Dense C, oracle scale only.
  virtual Mat dense_covariance() const;
};

/// Prior given by an explicit dense covariance; for synthetic problems and
/// oracles.
class DenseGaussianPrior final : public Prior {
 public:
  DenseGaussianPrior(ParamVector mean, Mat covariance);

  Eigen::Index dim() const noexcept override { return mean_.size(); }
  const ParamVector &mean() const noexcept override { return mean_; }
  ParamVector apply_C(const DualVector &g) const override { return cov_ * g; }
  DualVector apply_Cinv(const ParamVector &p) const override;
  ParamVector apply_sqrtC(const Vec &xi) const override { return chol_ * xi; }
  Vec apply_sqrtC_transpose(const DualVector &g) const override {
    return chol_.transpose() * g;
  }
  Mat dense_covariance() const override { return cov_; }

 private:
  ParamVector mean_;
  Mat cov_;
  Mat chol_;
  Eigen::LLT<Mat> llt_;
};

/// Discretized Matern field m ~ N(mean, C), C = (-a1 div(Theta grad) + a2 I)^-2.
///
/// With K = a1 * A_Theta + a2 * M and lumped mass M_L the discrete covariance
/// is C = K^-1 M_L K^-1, which maps dual vectors (gradients) to parameter
/// vectors; C^-1 = K M_L^-1 K maps back. All pairings are coefficient dot
/// products.
class MaternPrior final : public Prior {
 public:
  MaternPrior(std::shared_ptr<const Mesh2D> mesh, ParamVector mean, double alpha1,
              double alpha2, Tensor2 theta, const SolverOptions &solver = {});

  const Mesh2D &mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh2D> mesh_ptr() const noexcept { return mesh_; }
  Eigen::Index dim() const noexcept override { return mean_.size(); }
  const ParamVector &mean() const noexcept override { return mean_; }
  double alpha1() const noexcept { return alpha1_; }
  double alpha2() const noexcept { return alpha2_; }
  const Tensor2 &theta() const noexcept { return theta_; }
  const SparseMat &k_matrix() const noexcept { return k_; }
  const MassMatrices &mass() const noexcept { return mass_; }

  ParamVector apply_C(const DualVector &g) const override;
  DualVector apply_Cinv(const ParamVector &p) const override;
  /// K^-1 M_L^{1/2} xi.
  ParamVector apply_sqrtC(const Vec &xi) const override;
  /// M_L^{1/2} K^-1 g.
  Vec apply_sqrtC_transpose(const DualVector &g) const override;

  Mat dense_covariance() const override;

 private:
  std::shared_ptr<const Mesh2D> mesh_;
  ParamVector mean_;
  double alpha1_;
  double alpha2_;
  Tensor2 theta_;
  MassMatrices mass_;
  Vec sqrt_lumped_;
  SparseMat k_;
  SolverHandle k_solver_;
};

}  // namespace uqoc
