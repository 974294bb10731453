// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/prior.hpp"

#include <fmt/format.h>

namespace uqoc {

Mat Prior::dense_covariance() const {
  if (dim() > 2000) throw InvalidArgument("dense covariance is oracle-scale only");
  Mat c(dim(), dim());
  for (Eigen::Index j = 0; j < dim(); ++j) {
    c.col(j) = apply_C(Vec::Unit(dim(), j));
  }
  return 0.5 * (c + c.transpose());
}

DenseGaussianPrior::DenseGaussianPrior(ParamVector mean, Mat covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw InvalidArgument("covariance shape does not match the mean");
  }
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, cov_.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("covariance must be symmetric");
  }
  llt_.compute(cov_);
  if (llt_.info() != Eigen::Success) {
    throw InvalidArgument("covariance must be positive definite");
  }
  chol_ = llt_.matrixL();
}

DualVector DenseGaussianPrior::apply_Cinv(const ParamVector &p) const {
  return llt_.solve(p);
}

MaternPrior::MaternPrior(std::shared_ptr<const Mesh2D> mesh, ParamVector mean,
                         double alpha1, double alpha2, Tensor2 theta,
                         const SolverOptions &solver)
    : mesh_(std::move(mesh)),
      mean_(std::move(mean)),
      alpha1_(alpha1),
      alpha2_(alpha2),
      theta_(theta) {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) {
    throw InvalidArgument(fmt::format(
        "prior coefficients must be positive (alpha1 = {}, alpha2 = {})", alpha1,
        alpha2));
  }
  if (!theta.is_spd()) throw InvalidArgument("prior tensor must be SPD");
  if (mean_.size() != static_cast<Eigen::Index>(mesh_->num_nodes())) {
    throw InvalidArgument("prior mean must be a nodal field");
  }
  mass_ = assemble_mass(*mesh_);
  sqrt_lumped_ = mass_.lumped.array().sqrt();
  const SparseMat stiff = assemble_stiffness(*mesh_, theta_);
  SparseMat::Storage k = alpha1_ * stiff.data() + alpha2_ * mass_.consistent.data();
  k_ = SparseMat(std::move(k), true);
  k_solver_ = factorize(k_, solver);
}

ParamVector MaternPrior::apply_C(const DualVector &g) const {
  Vec t = k_solver_.solve(g);
  t.array() *= mass_.lumped.array();
  return k_solver_.solve(t);
}

DualVector MaternPrior::apply_Cinv(const ParamVector &p) const {
  Vec t = k_ * p;
  t.array() /= mass_.lumped.array();
  return k_ * t;
}

ParamVector MaternPrior::apply_sqrtC(const Vec &xi) const {
  return k_solver_.solve(Vec(sqrt_lumped_.cwiseProduct(xi)));
}

Vec MaternPrior::apply_sqrtC_transpose(const DualVector &g) const {
  return sqrt_lumped_.cwiseProduct(k_solver_.solve(g));
}

Mat MaternPrior::dense_covariance() const {
  if (dim() > 2000) throw InvalidArgument("dense covariance is oracle-scale only");
  const Mat kinv = k_solver_.solve(Mat(Mat::Identity(dim(), dim())));
  Mat c = kinv * mass_.lumped.asDiagonal() * kinv;
  return 0.5 * (c + c.transpose());
}

}  // namespace uqoc
