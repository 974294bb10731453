// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "uqoc/common.hpp"

namespace uqoc {

/// Compressed-row sparse matrix with a symmetry flag.
class SparseMat {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseMat() = default;
  SparseMat(Storage data, bool symmetric);

  Eigen::Index rows() const noexcept { return data_.rows(); }
  Eigen::Index cols() const noexcept { return data_.cols(); }
  Eigen::Index nonzeros() const noexcept { return data_.nonZeros(); }
  bool symmetric() const noexcept { return symmetric_; }
  const Storage &data() const noexcept { return data_; }

  Vec operator*(const Vec &x) const { return data_ * x; }

  /// Largest |a_ij - a_ji| over the stored pattern.
  double asymmetry() const;

  Mat to_dense() const { return Mat(data_); }

 private:
  Storage data_;
  bool symmetric_ = false;
};

/// Builds a matrix from (row, col, value) triplets; duplicates are summed.
SparseMat from_triplets(Eigen::Index rows, Eigen::Index cols,
                        const std::vector<Eigen::Triplet<double>> &triplets,
                        bool symmetric);

/// Split of nodal degrees of freedom into free and constrained sets, used for
/// symmetric row/column elimination of Dirichlet conditions.
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(const std::vector<bool> &constrained);

  Eigen::Index num_full() const noexcept {
    return static_cast<Eigen::Index>(full_to_free_.size());
  }
  Eigen::Index num_free() const noexcept {
    return static_cast<Eigen::Index>(free_.size());
  }
  const std::vector<int> &free_dofs() const noexcept { return free_; }
  const std::vector<int> &constrained_dofs() const noexcept { return fixed_; }
  /// -1 for constrained dofs.
  int free_index(int full) const noexcept { return full_to_free_[full]; }

  Vec restrict_free(const Vec &full) const;
  /// Zero-extends a free vector to all dofs.
  Vec extend(const Vec &free) const;
  /// Extends with prescribed values on the constrained dofs.
  Vec extend(const Vec &free, const Vec &full_lifting) const;

  /// Free-free block.
  SparseMat free_block(const SparseMat &a) const;
  /// Free-rows times full vector restricted to constrained columns.
  Vec free_times_constrained(const SparseMat &a, const Vec &full) const;

 private:
  std::vector<int> free_;
  std::vector<int> fixed_;
  std::vector<int> full_to_free_;
};

enum class SolverKind { Direct, ConjugateGradient };

struct SolverOptions {
  SolverKind kind = SolverKind::Direct;
  double cg_rel_tol = 1e-12;
  int cg_max_iter = 10000;
};

/// Factorized SPD matrix (sparse LDL^T with AMD ordering) or a CG
/// configuration bound to the matrix. Immutable and shareable; solve() is
/// const and reentrant.
class SolverHandle {
 public:
  SolverHandle() = default;

  Vec solve(const Vec &rhs) const;
  Mat solve(const Mat &rhs) const;

  Eigen::Index size() const noexcept;
  SolverKind kind() const noexcept { return kind_; }
  bool valid() const noexcept { return impl_ != nullptr; }

 private:
  struct Impl;
  friend SolverHandle factorize(const SparseMat &, const SolverOptions &);

  std::shared_ptr<const Impl> impl_;
  SolverKind kind_ = SolverKind::Direct;
};

/// Throws SolverError::Indefinite on a negative pivot and
/// SolverError::Singular on a (numerically) zero pivot.
SolverHandle factorize(const SparseMat &a, const SolverOptions &opts = {});

}  // namespace uqoc
