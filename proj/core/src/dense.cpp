// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/dense.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace uqoc {

std::vector<Eigen::Index> order_by_magnitude(const Vec &values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  return idx;
}

SymEig dense_sym_eig(const Mat &a) {
  if (a.rows() != a.cols()) throw InvalidArgument("matrix must be square");
  if (a.rows() > 2000) {
    throw InvalidArgument(
        fmt::format("dense_sym_eig is oracle-scale only (n = {})", a.rows()));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success) {
    // Eigen's tridiagonal QR gives up after 30 * n sweeps.
    throw SolverError(SolverError::Kind::NotConverged,
                      fmt::format("symmetric eigensolver did not converge "
                                  "within {} iterations",
                                  30 * a.rows()));
  }
  const auto order = order_by_magnitude(es.eigenvalues());
  SymEig out{Vec(a.rows()), Mat(a.rows(), a.cols())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values[static_cast<Eigen::Index>(k)] = es.eigenvalues()[order[k]];
    out.vectors.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(order[k]);
  }
  return out;
}

}  // namespace uqoc
