// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/randeig.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "uqoc/dense.hpp"
#include "uqoc/parallel.hpp"

namespace uqoc {
namespace {

Mat apply_columns(const LinearOp &op, const Mat &x, Eigen::Index rows) {
  Mat out(rows, x.cols());
  parallel_for(static_cast<std::size_t>(x.cols()), [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out.col(jj) = op(x.col(jj));
  });
  return out;
}

}  // namespace

EigPairs double_pass_gevp(const LinearOp &a_op, const LinearOp &b_inv,
                          const LinearOp &b_op, Eigen::Index n, int k, int p, Rng &rng) {
  if (k < 1 || p < 0) throw InvalidArgument("need k >= 1 and p >= 0");
  if (k + p > n) {
    throw InvalidArgument(
        fmt::format("k + p = {} exceeds the problem dimension {}", k + p, n));
  }
  const int l = k + p;
  EigPairs out;
  out.oversampling = p;
  out.seed = rng.seed();

  const Mat omega = rng.normal_matrix(n, l);
  const Mat a_omega = apply_columns(a_op, omega, n);
  const Mat y = apply_columns(b_inv, a_omega, n);

  // B-orthonormal basis by modified Gram-Schmidt, two passes.
  Mat q(n, l);
  Mat bq(n, l);
  int r = 0;
  for (int j = 0; j < l; ++j) {
    Vec x = y.col(j);
    const double norm0 = std::sqrt(std::max(0.0, x.dot(b_op(x))));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < r; ++i) x -= bq.col(i).dot(x) * q.col(i);
    }
    const Vec bx = b_op(x);
    const double norm = std::sqrt(std::max(0.0, x.dot(bx)));
    if (!(norm > 1e-12 * norm0) || norm == 0.0) {
      ++out.dropped;
      continue;
    }
    q.col(r) = x / norm;
    bq.col(r) = bx / norm;
    ++r;
  }
  if (r == 0) throw SolverError(SolverError::Kind::Breakdown, "randomized basis is empty");
  q.conservativeResize(Eigen::NoChange, r);

  const Mat aq = apply_columns(a_op, q, n);
  out.a_applies = l + r;
  Mat t = q.transpose() * aq;
  t = 0.5 * (t + t.transpose());
  const SymEig eig = dense_sym_eig(t);
  const int keep = std::min(k, r);
  out.values = eig.values.head(keep);
  out.vectors = q * eig.vectors.leftCols(keep);
  return out;
}

EigPairs hessian_gevp(const HessOp &hess, const Prior &prior, int k, int p, Rng &rng) {
  return double_pass_gevp([&](const Vec &x) { return hess.apply(x); },
                          [&](const Vec &x) { return prior.apply_C(x); },
                          [&](const Vec &x) { return prior.apply_Cinv(x); }, hess.dim(),
                          k, p, rng);
}

TraceEstimate trace_from_eigs(const EigPairs &eigs, int n) {
  if (n < 0 || n > eigs.size()) {
    throw InvalidArgument(
        fmt::format("requested {} eigenvalues but {} are available", n, eigs.size()));
  }
  TraceEstimate t;
  t.kind = TraceEstimate::Kind::T2;
  t.n = n;
  t.seed = eigs.seed;
  t.hess_applies = eigs.a_applies;
  const auto head = eigs.values.head(n);
  t.tr_h = head.sum();
  t.tr_h2 = head.squaredNorm();
  return t;
}

Mat gaussian_trace_samples(const HessOp &hess, const Prior &prior, int n, Rng &rng) {
  if (n < 1) throw InvalidArgument("Gaussian trace needs at least one direction");
  const Mat xi = rng.normal_matrix(prior.dim(), n);
  Mat out(n, 2);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const Vec mhat = prior.apply_sqrtC(xi.col(jj));
    const Vec h = hess.apply(mhat);
    out(jj, 0) = mhat.dot(h);
    out(jj, 1) = h.dot(prior.apply_C(h));
  });
  return out;
}

TraceEstimate gaussian_trace(const HessOp &hess, const Prior &prior, int n, Rng &rng) {
  TraceEstimate t;
  t.kind = TraceEstimate::Kind::T1;
  t.n = n;
  t.seed = rng.seed();
  const Mat s = gaussian_trace_samples(hess, prior, n, rng);
  t.hess_applies = n;
  t.tr_h = s.col(0).mean();
  t.tr_h2 = s.col(1).mean();
  if (n > 1) {
    auto se = [&](int c) {
      const double var = (s.col(c).array() - s.col(c).mean()).square().sum() / (n - 1);
      return std::sqrt(var / n);
    };
    t.se_h = se(0);
    t.se_h2 = se(1);
  }
  return t;
}

CsvTable trace_error_sweep(const HessOp &hess, const Prior &prior,
                           const std::vector<int> &n_list, const EigPairs &eigs,
                           const EigPairs &reference, Rng &rng) {
  CsvTable table({"N", "error1", "error2", "error1_sq", "error2_sq"});
  if (n_list.empty()) return table;
  const int n_max = *std::max_element(n_list.begin(), n_list.end());
  const TraceEstimate ref = trace_from_eigs(reference, static_cast<int>(reference.size()));
  const Mat s = gaussian_trace_samples(hess, prior, n_max, rng);
  for (int n : n_list) {
    const TraceEstimate t2 = trace_from_eigs(eigs, std::min<int>(n, eigs.size()));
    const double t1 = s.col(0).head(n).mean();
    const double t1_sq = s.col(1).head(n).mean();
    table.add_row({static_cast<long long>(n), std::abs(t1 - ref.tr_h),
                   std::abs(t2.tr_h - ref.tr_h), std::abs(t1_sq - ref.tr_h2),
                   std::abs(t2.tr_h2 - ref.tr_h2)});
  }
  return table;
}

int cluster_safe_count(const Vec &values, int n, double tol) {
  n = std::min<int>(n, values.size());
  if (n <= 0 || n == values.size()) return std::max(n, 0);
  const double scale = std::abs(values[0]);
  while (n > 0 && std::abs(values[n - 1] - values[n]) < tol * scale) --n;
  return n;
}

}  // namespace uqoc
