// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/sparse.hpp"

#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

namespace uqoc {

SparseMat::SparseMat(Storage data, bool symmetric)
    : data_(std::move(data)), symmetric_(symmetric) {
  data_.makeCompressed();
}

double SparseMat::asymmetry() const {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < data_.outerSize(); ++r) {
    for (Storage::InnerIterator it(data_, r); it; ++it) {
      worst = std::max(worst, std::abs(it.value() - data_.coeff(it.col(), r)));
    }
  }
  return worst;
}

SparseMat from_triplets(Eigen::Index rows, Eigen::Index cols,
                        const std::vector<Eigen::Triplet<double>> &triplets,
                        bool symmetric) {
  SparseMat::Storage s(rows, cols);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return SparseMat(std::move(s), symmetric);
}

DofMap::DofMap(const std::vector<bool> &constrained)
    : full_to_free_(constrained.size(), -1) {
  for (std::size_t i = 0; i < constrained.size(); ++i) {
    if (constrained[i]) {
      fixed_.push_back(static_cast<int>(i));
    } else {
      full_to_free_[i] = static_cast<int>(free_.size());
      free_.push_back(static_cast<int>(i));
    }
  }
}

Vec DofMap::restrict_free(const Vec &full) const {
  Vec out(num_free());
  for (Eigen::Index k = 0; k < num_free(); ++k) out[k] = full[free_[k]];
  return out;
}

Vec DofMap::extend(const Vec &free) const {
  Vec out = Vec::Zero(num_full());
  for (Eigen::Index k = 0; k < num_free(); ++k) out[free_[k]] = free[k];
  return out;
}

Vec DofMap::extend(const Vec &free, const Vec &full_lifting) const {
  Vec out = full_lifting;
  for (Eigen::Index k = 0; k < num_free(); ++k) out[free_[k]] = free[k];
  return out;
}

SparseMat DofMap::free_block(const SparseMat &a) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonzeros()));
  for (Eigen::Index r = 0; r < a.data().outerSize(); ++r) {
    const int fr = full_to_free_[r];
    if (fr < 0) continue;
    for (SparseMat::Storage::InnerIterator it(a.data(), r); it; ++it) {
      const int fc = full_to_free_[it.col()];
      if (fc >= 0) trip.emplace_back(fr, fc, it.value());
    }
  }
  return from_triplets(num_free(), num_free(), trip, a.symmetric());
}

Vec DofMap::free_times_constrained(const SparseMat &a, const Vec &full) const {
  Vec out = Vec::Zero(num_free());
  for (Eigen::Index k = 0; k < num_free(); ++k) {
    double acc = 0.0;
    for (SparseMat::Storage::InnerIterator it(a.data(), free_[k]); it; ++it) {
      if (full_to_free_[it.col()] < 0) acc += it.value() * full[it.col()];
    }
    out[k] = acc;
  }
  return out;
}

struct SolverHandle::Impl {
  using ColMajor = Eigen::SparseMatrix<double>;
  Eigen::SimplicialLDLT<ColMajor, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  ColMajor matrix;  // kept for CG
  double cg_tol = 1e-12;
  int cg_max_iter = 10000;
  Eigen::Index n = 0;
};

Eigen::Index SolverHandle::size() const noexcept {
  return impl_ ? impl_->n : 0;
}

Vec SolverHandle::solve(const Vec &rhs) const {
  if (!impl_) throw Error("solve on an empty SolverHandle");
  if (rhs.size() != impl_->n) {
    throw InvalidArgument(fmt::format("rhs has size {}, matrix has size {}",
                                      rhs.size(), impl_->n));
  }
  if (kind_ == SolverKind::Direct) return impl_->ldlt.solve(rhs);

  Eigen::ConjugateGradient<Impl::ColMajor, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(impl_->cg_tol);
  cg.setMaxIterations(impl_->cg_max_iter);
  cg.compute(impl_->matrix);
  Vec x = cg.solve(rhs);
  if (cg.info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::NotConverged,
                      fmt::format("CG did not converge in {} iterations "
                                  "(estimated error {:.3e})",
                                  cg.iterations(), cg.error()));
  }
  return x;
}

Mat SolverHandle::solve(const Mat &rhs) const {
  Mat out(rhs.rows(), rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) out.col(j) = solve(Vec(rhs.col(j)));
  return out;
}

SolverHandle factorize(const SparseMat &a, const SolverOptions &opts) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument("factorize requires a square matrix");
  }
  auto impl = std::make_shared<SolverHandle::Impl>();
  impl->n = a.rows();
  impl->cg_tol = opts.cg_rel_tol;
  impl->cg_max_iter = opts.cg_max_iter;

  SolverHandle h;
  h.kind_ = opts.kind;
  if (opts.kind == SolverKind::ConjugateGradient) {
    impl->matrix = SolverHandle::Impl::ColMajor(a.data());
    h.impl_ = std::move(impl);
    return h;
  }

  impl->ldlt.compute(SolverHandle::Impl::ColMajor(a.data()));
  if (impl->ldlt.info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::Singular,
                      "sparse LDL^T factorization failed");
  }
  const Vec d = impl->ldlt.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] < 0.0 && std::abs(d[i]) > 1e-14 * scale) {
      throw SolverError(
          SolverError::Kind::Indefinite,
          fmt::format("non-positive pivot {:.6e} at position {}", d[i], i));
    }
    if (std::abs(d[i]) <= 1e-14 * scale) {
      throw SolverError(SolverError::Kind::Singular,
                        fmt::format("zero pivot at position {}", i));
    }
  }
  h.impl_ = std::move(impl);
  return h;
}

}  // namespace uqoc
