// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "uqoc/hessian.hpp"
#include "uqoc/model.hpp"
#include "uqoc/prior.hpp"
#include "uqoc/randeig.hpp"

namespace uqoc {

/// Prior samples with per-sample objective values and Taylor terms.
struct SampleBatch {
  std::uint64_t seed = 0;
  Mat m;            // one sample per column
  Vec Q;            // Q(m_i), empty until evaluated
  double Qbar = 0;  // Q(mbar), set with the Taylor terms
  Vec lin;          // <m_i - mbar, grad>
  Vec quad;         // 1/2 <m_i - mbar, Q_mm (m_i - mbar)>, empty if not evaluated

  int size() const noexcept { return static_cast<int>(m.cols()); }
  Vec Qlin() const { return Vec::Constant(lin.size(), Qbar) + lin; }
  Vec Qquad() const { return Qlin() + quad; }
};

/// Sample i is mean + S xi_i with xi_i from stream i of the seed, so samples
/// do not depend on M or on the worker count.
SampleBatch draw_batch(const Prior &prior, int count, std::uint64_t seed);

/// One state solve per sample.
void evaluate_Q(const Model &model, const ControlVector &z, SampleBatch &batch);

/// Linear terms, and quadratic terms when hess is given (one Hessian action
/// per sample).
void evaluate_taylor(const LinearizationPoint &lp, const HessOp *hess, SampleBatch &batch);

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

struct MomentReport {
  std::string id;
  int samples = 0;
  double mean = 0.0;
  double var = 0.0;
  /// Population variance of the Monte Carlo integrand of the mean over M.
  double mse = 0.0;
  SolveCounts solves;
  std::uint64_t seed = 0;
};

/// Population variance (1/M).
double population_variance(const Vec &x);
/// Sample variance (1/(M-1)).
double sample_variance(const Vec &x);

MomentReport saa(const SampleBatch &batch);

Moments taylor_lin_moments(const LinearizationPoint &lp, const Prior &prior);
Moments taylor_quad_moments(const LinearizationPoint &lp, const Prior &prior,
                            const EigPairs &eigs, int n);

double eval_Qlin(const LinearizationPoint &lp, const ParamVector &m);
/// One Hessian action.
double eval_Qquad(const LinearizationPoint &lp, const HessOp &hess, const ParamVector &m);

/// var_batch, when given, supplies the samples of the variance correction;
/// otherwise both corrections share batch.
MomentReport mc_corrected_lin(const LinearizationPoint &lp, const Prior &prior,
                              const SampleBatch &batch,
                              const SampleBatch *var_batch = nullptr);
MomentReport mc_corrected_quad(const LinearizationPoint &lp, const Prior &prior,
                               const EigPairs &eigs, int n, const SampleBatch &batch,
                               const SampleBatch *var_batch = nullptr);

/// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> correlation(const Vec &a, const Vec &b);

struct CorrelationReport {
  std::optional<double> Q_lin;
  std::optional<double> Q_quad;
  std::optional<double> q_lin;
  std::optional<double> q_quad;
};

/// Correlations of Q with Q_lin and Q_quad, and of q = (Q - Qbar)^2 with the
/// matching Taylor integrands.
CorrelationReport correlation_report(const SampleBatch &batch);

/// MSE of the mean and variance integrands, columns of the variance-reduction
/// tables.
struct MseSummary {
  int samples = 0;
  double mean_Q = 0.0;
  double mse_Q = 0.0;
  double mse_Q_lin = 0.0;
  double mse_Q_quad = 0.0;
  double mean_q = 0.0;
  double mse_q = 0.0;
  double mse_q_lin = 0.0;
  double mse_q_quad = 0.0;
};

MseSummary mse_summary(const SampleBatch &batch);

}  // namespace uqoc
