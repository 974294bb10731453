// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/estimators.hpp"

#include <cmath>

#include <fmt/format.h>

#include "uqoc/parallel.hpp"

namespace uqoc {
namespace {

void require_samples(const SampleBatch &b, int min, const char *what) {
  if (b.size() < min) {
    throw InvalidArgument(fmt::format("{} needs at least {} samples, got {}", what, min,
                                      b.size()));
  }
}

void require_Q(const SampleBatch &b) {
  if (b.Q.size() != b.size()) throw InvalidArgument("batch has no objective values");
}

void require_taylor(const SampleBatch &b, bool quad) {
  if (b.lin.size() != b.size()) throw InvalidArgument("batch has no linear Taylor terms");
  if (quad && b.quad.size() != b.size()) {
    throw InvalidArgument("batch has no quadratic Taylor terms");
  }
}

}  // namespace

SampleBatch draw_batch(const Prior &prior, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("batch needs at least one sample");
  SampleBatch b;
  b.seed = seed;
  b.m.resize(prior.dim(), count);
  const Rng root(seed);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    Rng rng = root.stream(i);
    b.m.col(static_cast<Eigen::Index>(i)) = prior.sample(rng);
  });
  return b;
}

void evaluate_Q(const Model &model, const ControlVector &z, SampleBatch &batch) {
  batch.Q.resize(batch.size());
  parallel_for(static_cast<std::size_t>(batch.size()), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    try {
      batch.Q[ii] = model.eval_Q(model.solve_state(batch.m.col(ii), z));
    } catch (const SolverError &e) {
      throw SolverError(e.kind(), fmt::format("sample {}: {}", i, e.what()));
    }
  });
}

void evaluate_taylor(const LinearizationPoint &lp, const HessOp *hess, SampleBatch &batch) {
  const int n = batch.size();
  batch.Qbar = lp.Q;
  batch.lin.resize(n);
  for (int i = 0; i < n; ++i) {
    batch.lin[i] = (batch.m.col(i) - lp.mbar()).dot(lp.grad);
  }
  if (!hess) {
    batch.quad.resize(0);
    return;
  }
  batch.quad.resize(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Vec d = batch.m.col(ii) - lp.mbar();
    batch.quad[ii] = 0.5 * d.dot(hess->apply(d));
  });
}

double population_variance(const Vec &x) {
  if (x.size() == 0) return 0.0;
  return (x.array() - x.mean()).square().mean();
}

double sample_variance(const Vec &x) {
  if (x.size() < 2) throw InvalidArgument("sample variance needs two values");
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

MomentReport saa(const SampleBatch &batch) {
  require_samples(batch, 2, "sample average");
  require_Q(batch);
  MomentReport r;
  r.id = "saa";
  r.samples = batch.size();
  r.seed = batch.seed;
  r.mean = batch.Q.mean();
  r.var = batch.Q.array().square().mean() - r.mean * r.mean;
  r.mse = population_variance(batch.Q) / batch.size();
  return r;
}

Moments taylor_lin_moments(const LinearizationPoint &lp, const Prior &prior) {
  return {lp.Q, lp.grad.dot(prior.apply_C(lp.grad))};
}

Moments taylor_quad_moments(const LinearizationPoint &lp, const Prior &prior,
                            const EigPairs &eigs, int n) {
  const TraceEstimate t = trace_from_eigs(eigs, n);
  const Moments lin = taylor_lin_moments(lp, prior);
  return {lin.mean + 0.5 * t.tr_h, lin.var + 0.5 * t.tr_h2};
}

double eval_Qlin(const LinearizationPoint &lp, const ParamVector &m) {
  return lp.Q + (m - lp.mbar()).dot(lp.grad);
}

double eval_Qquad(const LinearizationPoint &lp, const HessOp &hess, const ParamVector &m) {
  const Vec d = m - lp.mbar();
  return lp.Q + d.dot(lp.grad) + 0.5 * d.dot(hess.apply(d));
}

MomentReport mc_corrected_lin(const LinearizationPoint &lp, const Prior &prior,
                              const SampleBatch &batch, const SampleBatch *var_batch) {
  const SampleBatch &vb = var_batch ? *var_batch : batch;
  for (const SampleBatch *b : {&batch, &vb}) {
    require_samples(*b, 2, "linear correction");
    require_Q(*b);
    require_taylor(*b, false);
  }
  const Moments lin = taylor_lin_moments(lp, prior);
  const Vec rem = batch.Q.array() - lp.Q - batch.lin.array();
  const Vec vrem = vb.Q.array() - lp.Q - vb.lin.array();
  const Vec dev = vb.Q.array() - lp.Q;
  MomentReport r;
  r.id = "lin-mc";
  r.samples = batch.size();
  r.seed = batch.seed;
  r.mean = lp.Q + rem.mean();
  r.var = lin.var + (dev.array().square() - vb.lin.array().square()).mean() -
          vrem.mean() * vrem.mean();
  r.mse = population_variance(rem) / batch.size();
  return r;
}

MomentReport mc_corrected_quad(const LinearizationPoint &lp, const Prior &prior,
                               const EigPairs &eigs, int n, const SampleBatch &batch,
                               const SampleBatch *var_batch) {
  const SampleBatch &vb = var_batch ? *var_batch : batch;
  for (const SampleBatch *b : {&batch, &vb}) {
    require_samples(*b, 2, "quadratic correction");
    require_Q(*b);
    require_taylor(*b, true);
  }
  const TraceEstimate t = trace_from_eigs(eigs, n);
  const double gcg = lp.grad.dot(prior.apply_C(lp.grad));
  const Vec rem = batch.Q.array() - lp.Q - batch.lin.array() - batch.quad.array();
  const Vec vrem = vb.Q.array() - lp.Q - vb.lin.array() - vb.quad.array();
  const Vec dev = vb.Q.array() - lp.Q;
  const Vec taylor = vb.lin + vb.quad;
  const double shift = 0.5 * t.tr_h + vrem.mean();
  MomentReport r;
  r.id = "quad-mc";
  r.samples = batch.size();
  r.seed = batch.seed;
  r.mean = lp.Q + 0.5 * t.tr_h + rem.mean();
  r.var = gcg + 0.25 * t.tr_h * t.tr_h + 0.5 * t.tr_h2 +
          (dev.array().square() - taylor.array().square()).mean() - shift * shift;
  r.mse = population_variance(rem) / batch.size();
  return r;
}

std::optional<double> correlation(const Vec &a, const Vec &b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const Vec da = a.array() - a.mean();
  const Vec db = b.array() - b.mean();
  const double na = da.norm();
  const double nb = db.norm();
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return da.dot(db) / (na * nb);
}

CorrelationReport correlation_report(const SampleBatch &batch) {
  require_Q(batch);
  require_taylor(batch, false);
  CorrelationReport r;
  const Vec q = (batch.Q.array() - batch.Qbar).square();
  r.Q_lin = correlation(batch.Q, batch.Qlin());
  r.q_lin = correlation(q, batch.lin.array().square().matrix());
  if (batch.quad.size() == batch.size()) {
    r.Q_quad = correlation(batch.Q, batch.Qquad());
    r.q_quad = correlation(q, (batch.lin + batch.quad).array().square().matrix());
  }
  return r;
}

MseSummary mse_summary(const SampleBatch &batch) {
  require_Q(batch);
  require_taylor(batch, true);
  const double m = batch.size();
  const Vec q = (batch.Q.array() - batch.Qbar).square();
  const Vec q_lin = batch.lin.array().square();
  const Vec q_quad = (batch.lin + batch.quad).array().square();
  MseSummary s;
  s.samples = batch.size();
  s.mean_Q = batch.Q.mean();
  s.mse_Q = population_variance(batch.Q) / m;
  s.mse_Q_lin = population_variance(batch.Q - batch.Qlin()) / m;
  s.mse_Q_quad = population_variance(batch.Q - batch.Qquad()) / m;
  s.mean_q = q.mean();
  s.mse_q = population_variance(q) / m;
  s.mse_q_lin = population_variance(q - q_lin) / m;
  s.mse_q_quad = population_variance(q - q_quad) / m;
  return s;
}

}  // namespace uqoc
