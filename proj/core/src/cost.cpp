// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/cost.hpp"

#include <array>

#include <fmt/format.h>

#include "uqoc/parallel.hpp"

namespace uqoc {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Saa:
      return "saa";
    case Method::Lin:
      return "lin";
    case Method::Quad:
      return "quad";
    case Method::LinMc:
      return "lin-mc";
    case Method::QuadMc:
      return "quad-mc";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (Method m : {Method::Saa, Method::Lin, Method::Quad, Method::LinMc, Method::QuadMc}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool uses_samples(Method m) noexcept {
  return m == Method::Saa || m == Method::LinMc || m == Method::QuadMc;
}

bool uses_eigs(Method m) noexcept { return m == Method::Quad || m == Method::QuadMc; }

void CostConfig::validate() const {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be non-negative");
  if (!(beta_p >= 0.0)) throw InvalidArgument("penalty weight must be non-negative");
  if (uses_eigs(method) && (n_eigs < 1 || oversampling < 0)) {
    throw InvalidArgument("eigensolver needs N >= 1 and p >= 0");
  }
  if (uses_samples(method) && samples < 1) throw InvalidArgument("need at least one sample");
}

double penalty(const CostConfig &cfg, const ControlVector &z) {
  return cfg.beta_p * z.squaredNorm();
}

ControlVector dz_penalty(const CostConfig &cfg, const ControlVector &z) {
  return 2.0 * cfg.beta_p * z;
}

SolveLedger expected_solves(Method m, int n, int p, int s) {
  switch (m) {
    case Method::Saa:
      return {s, 0, s};
    case Method::Lin:
      return {1, 1, 2};
    case Method::Quad:
      return {1, 1 + 4LL * n + 4LL * p, 2 + 2LL * n};
    case Method::LinMc:
      return {1 + s, 1, 2 + s};
    case Method::QuadMc:
      return {1 + s, 1 + 4LL * n + 4LL * p + 2LL * s, 2 + 2LL * n + 3LL * s};
  }
  return {};
}

namespace {

struct SampleStates {
  Vec Q;
  std::vector<std::shared_ptr<const LinearizedModel>> lins;
};

SampleStates solve_samples(const Model &model, const ControlVector &z,
                           const SampleBatch &batch, bool keep) {
  SampleStates s;
  const int n = batch.size();
  s.Q.resize(n);
  if (keep) s.lins.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    try {
      StateVector u = model.solve_state(batch.m.col(ii), z);
      s.Q[ii] = model.eval_Q(u);
      if (keep) s.lins[i] = model.linearize(batch.m.col(ii), z, std::move(u));
    } catch (const SolverError &e) {
      throw SolverError(e.kind(), fmt::format("sample {}: {}", i, e.what()));
    }
  });
  return s;
}

// Per-sample adjoints v_i for weights dJ/dQ_i; returns sum of dr/dz [v_i].
ControlVector sample_adjoint_terms(const SampleStates &s, const Vec &weights,
                                   Eigen::Index nz, AdjointBundle &bundle) {
  const std::size_t n = s.lins.size();
  bundle.sample_adjoints.assign(n, AdjointVector());
  std::vector<ControlVector> terms(n);
  parallel_for(n, [&](std::size_t i) {
    const LinearizedModel &lin = *s.lins[i];
    const Vec zero = Vec::Zero(lin.u().size());
    const Vec rhs = -weights[static_cast<Eigen::Index>(i)] * lin.form(FormTag::Qu, zero);
    bundle.sample_adjoints[i] = lin.solve_uv(rhs);
    terms[i] = lin.form(FormTag::zv, bundle.sample_adjoints[i], bundle.sample_adjoints[i]);
  });
  ControlVector out = ControlVector::Zero(nz);
  for (const auto &t : terms) out += t;
  return out;
}

// Contributions of s * <psi, Q_mm psi> to the right-hand sides of the u* and
// v* equations. star holds (uhat*, vhat*) when they were solved for;
// otherwise they are s * inc.
void add_hessian_terms(const LinearizationPoint &lp, const ParamVector &psi,
                       const Incrementals &inc, double s, const Incrementals *star,
                       Vec &u_rhs, Vec &v_rhs) {
  const ParamVector psi_s = s * psi;
  const StateVector uh_s = star ? star->uhat : StateVector(s * inc.uhat);
  const AdjointVector vh_s = star ? star->vhat : AdjointVector(s * inc.vhat);
  u_rhs += lp.form(FormTag::vmu, psi_s, inc.uhat) + lp.form(FormTag::vum, uh_s, psi) +
           lp.form(FormTag::vmm, psi, psi_s) + lp.form(FormTag::vuu, inc.uhat, uh_s);
  v_rhs += lp.form(FormTag::umv, psi_s, inc.vhat) + lp.form(FormTag::uvm, vh_s, psi) +
           lp.form(FormTag::umu, psi_s, inc.uhat) + lp.form(FormTag::uum, uh_s, psi) +
           lp.form(FormTag::umm, psi, psi_s) + lp.form(FormTag::uvu, vh_s, inc.uhat) +
           lp.form(FormTag::uuv, uh_s, inc.vhat) + lp.form(FormTag::uuu, inc.uhat, uh_s) +
           lp.form(FormTag::Quuu, inc.uhat, uh_s);
}

struct Multipliers {
  StateVector u_star;
  AdjointVector v_star;
};

// Solves for u*, v* given the m-direction w of the gradient terms, the weight
// of Q(mbar) and the accumulated Hessian terms; returns the z-gradient part.
ControlVector point_multipliers(const LinearizationPoint &lp, const ParamVector &w,
                                double dj_dqbar, Vec u_rhs, Vec v_rhs,
                                AdjointBundle &bundle) {
  u_rhs += lp.form(FormTag::vm, w);
  bundle.u_star = lp.lin->solve_vu(-u_rhs);
  v_rhs += dj_dqbar * lp.form(FormTag::Qu) + lp.form(FormTag::um, w) +
           lp.form(FormTag::uu, bundle.u_star) + lp.form(FormTag::Quu, bundle.u_star);
  bundle.v_star = lp.lin->solve_uv(-v_rhs);
  bundle.w = w;
  return lp.form(FormTag::zm, w) + lp.lin->form(FormTag::zv, lp.v, bundle.v_star) +
         lp.form(FormTag::zu, bundle.u_star);
}

struct EigStage {
  EigPairs eigs;
  int n = 0;
  double tr_h = 0.0;
  double tr_h2 = 0.0;
};

EigStage eig_stage(const HessOp &hess, const Prior &prior, const CostConfig &cfg) {
  EigStage st;
  Rng rng(cfg.eig_seed);
  st.eigs = hessian_gevp(hess, prior, cfg.n_eigs, cfg.oversampling, rng);
  st.n = cluster_safe_count(st.eigs.values, cfg.n_eigs, cfg.cluster_tol);
  const TraceEstimate t = trace_from_eigs(st.eigs, st.n);
  st.tr_h = t.tr_h;
  st.tr_h2 = t.tr_h2;
  return st;
}

std::vector<Incrementals> eig_incrementals(const HessOp &hess, const EigStage &st) {
  std::vector<Incrementals> inc(static_cast<std::size_t>(st.n));
  parallel_for(inc.size(), [&](std::size_t j) {
    inc[j] = hess.incrementals(st.eigs.vectors.col(static_cast<Eigen::Index>(j)));
  });
  return inc;
}

void add_eig_terms(const LinearizationPoint &lp, const EigStage &st,
                   const std::vector<Incrementals> &inc, const Vec &factors, Vec &u_rhs,
                   Vec &v_rhs) {
  for (int j = 0; j < st.n; ++j) {
    add_hessian_terms(lp, st.eigs.vectors.col(j), inc[static_cast<std::size_t>(j)],
                      factors[j], nullptr, u_rhs, v_rhs);
  }
}

class Tally {
 public:
  explicit Tally(const Model &m) : model_(m), start_(m.counter().snapshot()) {}
  SolveCounts lap() {
    const SolveCounts now = model_.counter().snapshot();
    const SolveCounts d = now - start_;
    start_ = now;
    return d;
  }

 private:
  const Model &model_;
  SolveCounts start_;
};

void check_batch(const Prior &prior, const SampleBatch &batch) {
  if (batch.size() < 1) throw InvalidArgument("sample batch is empty");
  if (batch.m.rows() != prior.dim()) throw InvalidArgument("sample dimension mismatch");
}

}  // namespace

CostGrad cost_grad_saa(const Model &model, const Prior &prior, const ControlVector &z,
                       const SampleBatch &batch, const CostConfig &cfg, bool gradient) {
  check_batch(prior, batch);
  Tally tally(model);
  CostGrad r;
  const SampleStates s = solve_samples(model, z, batch, gradient);
  const double m = batch.size();
  r.mean = s.Q.mean();
  r.var = population_variance(s.Q);
  r.J = r.mean + cfg.beta * r.var + penalty(cfg, z);
  r.cost_solves = tally.lap();
  if (!gradient) return r;
  const Vec weights = (1.0 + 2.0 * cfg.beta * (s.Q.array() - r.mean)) / m;
  r.grad = dz_penalty(cfg, z) + sample_adjoint_terms(s, weights, z.size(), r.bundle);
  r.grad_solves = tally.lap();
  return r;
}

CostGrad cost_grad_lin(const Model &model, const Prior &prior, const ControlVector &z,
                       const CostConfig &cfg, bool gradient) {
  Tally tally(model);
  CostGrad r;
  const LinearizationPoint lp = linearize(model, prior.mean(), z);
  const ParamVector cg = prior.apply_C(lp.grad);
  r.mean = lp.Q;
  r.var = lp.grad.dot(cg);
  r.J = r.mean + cfg.beta * r.var + penalty(cfg, z);
  r.cost_solves = tally.lap();
  if (!gradient) return r;
  const Vec zero_u = Vec::Zero(lp.u().size());
  r.grad = dz_penalty(cfg, z) + point_multipliers(lp, 2.0 * cfg.beta * cg, 1.0, zero_u,
                                                  zero_u, r.bundle);
  r.grad_solves = tally.lap();
  return r;
}

CostGrad cost_grad_quad(const Model &model, const Prior &prior, const ControlVector &z,
                        const CostConfig &cfg, bool gradient) {
  Tally tally(model);
  CostGrad r;
  auto lp = std::make_shared<const LinearizationPoint>(linearize(model, prior.mean(), z));
  const HessOp hess(lp);
  const EigStage st = eig_stage(hess, prior, cfg);
  const ParamVector cg = prior.apply_C(lp->grad);
  const double gcg = lp->grad.dot(cg);
  r.n_eigs_used = st.n;
  r.mean = lp->Q + 0.5 * st.tr_h;
  r.var = gcg + 0.5 * st.tr_h2;
  r.J = r.mean + cfg.beta * r.var + penalty(cfg, z);
  r.cost_solves = tally.lap();
  if (!gradient) return r;
  const auto lambda = st.eigs.values.head(st.n).array();
  r.bundle.eig_factors = (1.0 + 2.0 * cfg.beta * lambda) / 2.0;
  const std::vector<Incrementals> inc = eig_incrementals(hess, st);
  Vec u_rhs = Vec::Zero(lp->u().size());
  Vec v_rhs = Vec::Zero(lp->u().size());
  add_eig_terms(*lp, st, inc, r.bundle.eig_factors, u_rhs, v_rhs);
  r.grad = dz_penalty(cfg, z) +
           point_multipliers(*lp, 2.0 * cfg.beta * cg, 1.0, u_rhs, v_rhs, r.bundle);
  r.grad_solves = tally.lap();
  return r;
}

CostGrad cost_grad_lin_mc(const Model &model, const Prior &prior, const ControlVector &z,
                          const SampleBatch &batch, const CostConfig &cfg, bool gradient) {
  check_batch(prior, batch);
  Tally tally(model);
  CostGrad r;
  const LinearizationPoint lp = linearize(model, prior.mean(), z);
  const SampleStates s = solve_samples(model, z, batch, gradient);
  const ParamVector cg = prior.apply_C(lp.grad);
  const double gcg = lp.grad.dot(cg);
  const Mat mt = batch.m.colwise() - lp.mbar();
  const Vec ell = mt.transpose() * lp.grad;
  const Vec dev = s.Q.array() - lp.Q;
  const double dbar = (dev - ell).mean();
  const double m = batch.size();
  r.mean = lp.Q + dbar;
  r.var = gcg + (dev.array().square() - ell.array().square()).mean() - dbar * dbar;
  r.J = r.mean + cfg.beta * r.var + penalty(cfg, z);
  r.cost_solves = tally.lap();
  if (!gradient) return r;
  const Vec dj_dq = (1.0 + cfg.beta * (2.0 * dev.array() - 2.0 * dbar)) / m;
  const double dj_dqbar = -2.0 * cfg.beta * ell.mean();
  const Vec a = (-1.0 + cfg.beta * (-2.0 * ell.array() + 2.0 * dbar)) / m;
  const ParamVector w = 2.0 * cfg.beta * cg + mt * a;
  const Vec zero_u = Vec::Zero(lp.u().size());
  r.grad = dz_penalty(cfg, z) + point_multipliers(lp, w, dj_dqbar, zero_u, zero_u, r.bundle) +
           sample_adjoint_terms(s, dj_dq, z.size(), r.bundle);
  r.grad_solves = tally.lap();
  return r;
}

CostGrad cost_grad_quad_mc(const Model &model, const Prior &prior, const ControlVector &z,
                           const SampleBatch &batch, const CostConfig &cfg, bool gradient) {
  check_batch(prior, batch);
  Tally tally(model);
  CostGrad r;
  auto lp = std::make_shared<const LinearizationPoint>(linearize(model, prior.mean(), z));
  const HessOp hess(lp);
  const EigStage st = eig_stage(hess, prior, cfg);
  const SampleStates s = solve_samples(model, z, batch, gradient);
  const int ns = batch.size();
  const Mat mt = batch.m.colwise() - lp->mbar();
  std::vector<Incrementals> sample_inc(static_cast<std::size_t>(ns));
  Vec h(ns);
  parallel_for(static_cast<std::size_t>(ns), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    h[ii] = 0.5 * mt.col(ii).dot(hess.apply(mt.col(ii), sample_inc[i]));
  });
  const ParamVector cg = prior.apply_C(lp->grad);
  const double gcg = lp->grad.dot(cg);
  const Vec ell = mt.transpose() * lp->grad;
  const Vec dev = s.Q.array() - lp->Q;
  const Vec taylor = ell + h;
  const double c = (dev - taylor).mean();
  const double e = 0.5 * st.tr_h + c;
  const double m = ns;
  r.n_eigs_used = st.n;
  r.bundle.c = c;
  r.mean = lp->Q + e;
  r.var = gcg + 0.25 * st.tr_h * st.tr_h + 0.5 * st.tr_h2 +
          (dev.array().square() - taylor.array().square()).mean() - e * e;
  r.J = r.mean + cfg.beta * r.var + penalty(cfg, z);
  r.cost_solves = tally.lap();
  if (!gradient) return r;

  const Vec dj_dq = (1.0 + cfg.beta * (2.0 * dev.array() - 2.0 * e)) / m;
  const double dj_dqbar = cfg.beta * (2.0 * e - 2.0 * dev.mean());
  const auto lambda = st.eigs.values.head(st.n).array();
  r.bundle.eig_factors = (1.0 + 2.0 * cfg.beta * lambda) / 2.0 - cfg.beta * c;
  const Vec a = (-1.0 + cfg.beta * (-2.0 * taylor.array() + 2.0 * e)) / m;
  r.bundle.sample_factors = 0.5 * a;
  const ParamVector w = 2.0 * cfg.beta * cg + mt * a;

  const std::vector<Incrementals> inc = eig_incrementals(hess, st);
  std::vector<Incrementals> star(static_cast<std::size_t>(ns));
  parallel_for(star.size(), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    star[i] = hess.incrementals(r.bundle.sample_factors[ii] * mt.col(ii));
  });
  Vec u_rhs = Vec::Zero(lp->u().size());
  Vec v_rhs = Vec::Zero(lp->u().size());
  add_eig_terms(*lp, st, inc, r.bundle.eig_factors, u_rhs, v_rhs);
  for (int i = 0; i < ns; ++i) {
    add_hessian_terms(*lp, mt.col(i), sample_inc[static_cast<std::size_t>(i)],
                      r.bundle.sample_factors[i], &star[static_cast<std::size_t>(i)], u_rhs,
                      v_rhs);
  }
  r.grad = dz_penalty(cfg, z) + point_multipliers(*lp, w, dj_dqbar, u_rhs, v_rhs, r.bundle) +
           sample_adjoint_terms(s, dj_dq, z.size(), r.bundle);
  r.grad_solves = tally.lap();
  return r;
}

CostFunctional::CostFunctional(const Model &model, const Prior &prior, CostConfig cfg)
    : model_(model), prior_(prior), cfg_(cfg) {
  cfg_.validate();
  if (uses_samples(cfg_.method)) batch_ = draw_batch(prior_, cfg_.samples, cfg_.sample_seed);
}

CostFunctional::CostFunctional(const Model &model, const Prior &prior, CostConfig cfg,
                               SampleBatch batch)
    : model_(model), prior_(prior), cfg_(cfg), batch_(std::move(batch)) {
  cfg_.validate();
}

CostGrad CostFunctional::operator()(const ControlVector &z, bool gradient) const {
  switch (cfg_.method) {
    case Method::Saa:
      return cost_grad_saa(model_, prior_, z, batch_, cfg_, gradient);
    case Method::Lin:
      return cost_grad_lin(model_, prior_, z, cfg_, gradient);
    case Method::Quad:
      return cost_grad_quad(model_, prior_, z, cfg_, gradient);
    case Method::LinMc:
      return cost_grad_lin_mc(model_, prior_, z, batch_, cfg_, gradient);
    case Method::QuadMc:
      return cost_grad_quad_mc(model_, prior_, z, batch_, cfg_, gradient);
  }
  throw InvalidArgument("unknown method");
}

}  // namespace uqoc
