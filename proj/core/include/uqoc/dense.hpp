// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "uqoc/common.hpp"

namespace uqoc {

struct SymEig {
  Vec values;   // sorted by |lambda|, descending
  Mat vectors;  // orthonormal columns matching values
};

/// Dense symmetric eigendecomposition for oracle-scale matrices (n <= 2000).
SymEig dense_sym_eig(const Mat &a);

/// Permutation that sorts values by decreasing magnitude (stable).
std::vector<Eigen::Index> order_by_magnitude(const Vec &values);

}  // namespace uqoc
