// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uqoc/csv.hpp"
#include "uqoc/hessian.hpp"
#include "uqoc/prior.hpp"
#include "uqoc/rng.hpp"

namespace uqoc {

using LinearOp = std::function<Vec(const Vec &)>;

/// Dominant eigenpairs of A psi = lambda B psi.
struct EigPairs {
  Vec values;   // sorted by |lambda| descending, signs kept
  Mat vectors;  // columns are B-orthonormal
  int oversampling = 0;
  std::uint64_t seed = 0;
  /// Basis columns dropped during B-orthonormalization.
  int dropped = 0;
  /// Applications of A performed.
  long long a_applies = 0;

  Eigen::Index size() const noexcept { return values.size(); }
};

/// Double-pass randomized solver for A psi = lambda B psi with A symmetric
/// and B SPD, using k + p Gaussian probes. A is applied exactly 2 (k + p)
/// times unless columns are dropped.
EigPairs double_pass_gevp(const LinearOp &a_op, const LinearOp &b_inv,
                          const LinearOp &b_op, Eigen::Index n, int k, int p, Rng &rng);

/// Convenience: Q_mm psi = lambda C^-1 psi.
EigPairs hessian_gevp(const HessOp &hess, const Prior &prior, int k, int p, Rng &rng);

struct TraceEstimate {
  enum class Kind { T1, T2 };

  Kind kind = Kind::T2;
  int n = 0;
  double tr_h = 0.0;   // estimate of tr(H)
  double tr_h2 = 0.0;  // estimate of tr(H^2)
  /// Standard errors of the sample means (T1 only).
  double se_h = 0.0;
  double se_h2 = 0.0;
  std::uint64_t seed = 0;
  long long hess_applies = 0;
};

/// Partial sums of lambda_j and lambda_j^2 over j <= n.
TraceEstimate trace_from_eigs(const EigPairs &eigs, int n);

/// Gaussian estimator with n directions mhat ~ N(0, C):
/// tr(H) ~ mean <mhat, Q_mm mhat>, tr(H^2) ~ mean <Q_mm mhat, C Q_mm mhat>.
TraceEstimate gaussian_trace(const HessOp &hess, const Prior &prior, int n, Rng &rng);

/// Per-sample integrands of gaussian_trace, columns (tr_h, tr_h2).
Mat gaussian_trace_samples(const HessOp &hess, const Prior &prior, int n, Rng &rng);

/// Errors of both estimators against the full eigenvalue sums of reference:
/// columns N, error1, error2 (for tr(H)) and error1_sq, error2_sq (for tr(H^2)).
/// T2 sums the first N values of eigs; T1 uses the first N of max(n_list)
/// shared directions.
CsvTable trace_error_sweep(const HessOp &hess, const Prior &prior,
                           const std::vector<int> &n_list, const EigPairs &eigs,
                           const EigPairs &reference, Rng &rng);

/// Largest N' <= n such that |lambda_N' - lambda_N'+1| >= tol |lambda_1|, so
/// a truncation never splits a cluster of repeated eigenvalues.
int cluster_safe_count(const Vec &values, int n, double tol = 1e-10);

}  // namespace uqoc
