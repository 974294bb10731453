// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Everything runs single-threaded with fixed seeds.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "toy.hpp"
#include "uqoc/cost.hpp"
#include "uqoc/dense.hpp"
#include "uqoc/estimators.hpp"
#include "uqoc/hessian.hpp"
#include "uqoc/lbfgsb.hpp"
#include "uqoc/parallel.hpp"
#include "uqoc/problem.hpp"
#include "uqoc/randeig.hpp"

namespace {

using namespace uqoc;

constexpr std::uint64_t kEigSeed = 1;
constexpr std::uint64_t kSampleSeed = 2;
constexpr std::uint64_t kProbeSeed = 3;
constexpr std::uint64_t kValidationSeed = 4;

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string &name, const Verdict &v) {
  fmt::print("{} [{}] {}: {}\n", v.pass ? "PASS" : "FAIL", id, name, v.detail);
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Problem make_problem(int nx, int ny) {
  ProblemSpec spec;
  spec.nx = nx;
  spec.ny = ny;
  return build_problem(spec);
}

CostConfig full_cost(Method m) {
  CostConfig c;
  c.method = m;
  c.beta = 1.0;
  c.beta_p = 1e-5;
  c.n_eigs = 100;
  c.oversampling = 10;
  c.samples = 100;
  c.eig_seed = kEigSeed;
  c.sample_seed = kSampleSeed;
  return c;
}

// 1. Gradient and Hessian finite differences on 16 x 8.
Verdict derivatives() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem pr = make_problem(16, 8);
  Rng rng(11);
  const Vec m = pr.prior->sample(rng);
  const auto steps = decade_steps(8);
  double worst_g = 0.0, worst_h = 0.0, worst_sym = 0.0;
  const auto lp = std::make_shared<LinearizationPoint>(linearize(*pr.model, m, pr.z0));
  const HessOp hess(lp);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec a = rng.normal_vector(m.size());
    const Vec b = rng.normal_vector(m.size());
    double best_g = INFINITY, best_h = INFINITY;
    for (const FdRow &r : fd_check_gradient(*pr.model, m, pr.z0, a, steps)) {
      best_g = std::min(best_g, r.rel_error);
    }
    for (const FdRow &r : fd_check_hessian(*pr.model, m, pr.z0, a, b, steps)) {
      best_h = std::min(best_h, r.rel_error);
    }
    const double ab = b.dot(hess.apply(a));
    const double ba = a.dot(hess.apply(b));
    worst_g = std::max(worst_g, best_g);
    worst_h = std::max(worst_h, best_h);
    worst_sym = std::max(worst_sym, std::abs(ab - ba) / std::max(std::abs(ab), std::abs(ba)));
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst_g <= 1e-5 && worst_h <= 1e-4 && worst_sym <= 1e-10 && secs <= 30.0;
  v.detail = fmt::format(
      "min rel err grad {:.2e} (<= 1e-5), Hessian {:.2e} (<= 1e-4), symmetry {:.2e} "
      "(<= 1e-10), {:.1f} s (<= 30)",
      worst_g, worst_h, worst_sym, secs);
  return v;
}

// 2. Randomized eigensolver against the dense oracle on 16 x 8 (n = 153).
Verdict eigensolver() {
  const Problem pr = make_problem(16, 8);
  const auto lp =
      std::make_shared<LinearizationPoint>(linearize(*pr.model, pr.prior->mean(), pr.z0));
  const HessOp hess(lp);
  const PrecondHessOp sym(hess, *pr.prior, PrecondHessOp::Mode::Symmetric);
  const Vec ref = dense_sym_eig(dense_precond_hessian(sym)).values;
  Rng rng(kEigSeed);
  const EigPairs e = hessian_gevp(hess, *pr.prior, 20, 10, rng);

  double worst_val = 0.0;
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    if (std::abs(ref[j]) < 1e-8 * std::abs(ref[0])) continue;
    worst_val = std::max(worst_val, std::abs(e.values[j] - ref[j]) / std::abs(ref[j]));
  }
  Mat cinv_v(e.vectors.rows(), e.vectors.cols());
  for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) {
    cinv_v.col(j) = pr.prior->apply_Cinv(e.vectors.col(j));
  }
  const double ortho =
      (e.vectors.transpose() * cinv_v - Mat::Identity(e.size(), e.size())).cwiseAbs().maxCoeff();
  double worst_margin = -INFINITY;
  for (int n = 1; n <= e.size(); ++n) {
    const double err = std::abs(trace_from_eigs(e, n).tr_h - ref.sum());
    const double tail = ref.tail(ref.size() - n).cwiseAbs().sum();
    worst_margin = std::max(worst_margin, err - tail - 1e-10);
  }
  Verdict v;
  v.pass = worst_val <= 1e-8 && ortho <= 1e-8 && worst_margin <= 0.0;
  v.detail = fmt::format(
      "n = {}, k = 20, p = 10: max rel eigenvalue err {:.2e} (<= 1e-8), C^-1 "
      "orthonormality {:.2e} (<= 1e-8), max(T2 err - tail) {:.2e} (<= 0); "
      "|lambda_31/lambda_20| = {:.2f}",
      ref.size(), worst_val, ortho, worst_margin, std::abs(ref[30] / ref[19]));
  return v;
}

// 3. Exactly quadratic model with closed-form moments.
Verdict closed_form() {
  oracle::ToyOptions o;
  o.n = 60;
  o.rank = 8;
  o.controls = 3;
  const oracle::Toy t = oracle::make_toy(o);
  const Vec z = Vec::LinSpaced(3, -0.5, 0.5);
  const auto lp = std::make_shared<LinearizationPoint>(linearize(*t.model, t.prior->mean(), z));
  const HessOp hess(lp);
  Rng rng(kEigSeed);
  const EigPairs e = hessian_gevp(hess, *t.prior, 12, 6, rng);
  const int n = static_cast<int>(e.size());
  const Moments quad = taylor_quad_moments(*lp, *t.prior, e, n);
  const double mean = t.mean(z), var = t.var(z);
  const double moment_err =
      std::max(std::abs(quad.mean - mean) / std::abs(mean), std::abs(quad.var - var) / var);

  double sample_err = 0.0, mc_err = 0.0;
  for (int count : {10, 100}) {
    for (std::uint64_t seed : {kSampleSeed, kValidationSeed}) {
      SampleBatch b = draw_batch(*t.prior, count, seed);
      evaluate_Q(*t.model, z, b);
      evaluate_taylor(*lp, &hess, b);
      sample_err = std::max(sample_err, (b.Q - b.Qquad()).cwiseAbs().maxCoeff());
      const MomentReport r = mc_corrected_quad(*lp, *t.prior, e, n, b);
      mc_err = std::max({mc_err, std::abs(r.mean - mean) / std::abs(mean),
                         std::abs(r.var - var) / var});
    }
  }
  Verdict v;
  v.pass = moment_err <= 1e-8 && sample_err <= 1e-12 && mc_err <= 1e-8;
  v.detail = fmt::format(
      "rel err of E, Var {:.2e} (<= 1e-8), max |Q - Q_quad| {:.2e} (<= 1e-12), "
      "MC-corrected vs closed form over M in {{10, 100}} and 2 seeds {:.2e} (<= 1e-8)",
      moment_err, sample_err, mc_err);
  return v;
}

// 4. Variance reduction at z0 on 64 x 32.
Verdict variance_reduction(const Problem &pr) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto lp =
      std::make_shared<LinearizationPoint>(linearize(*pr.model, pr.prior->mean(), pr.z0));
  const HessOp hess(lp);
  SampleBatch b = draw_batch(*pr.prior, 100, kSampleSeed);
  evaluate_Q(*pr.model, pr.z0, b);
  evaluate_taylor(*lp, &hess, b);
  const MseSummary s = mse_summary(b);
  const double secs = seconds_since(t0);
  const double r_lin = s.mse_Q_lin / s.mse_Q;
  const double r_quad = s.mse_Q_quad / s.mse_Q;
  const double target = 25.4;
  Verdict v;
  v.pass = s.mean_Q >= target / 2 && s.mean_Q <= 2 * target && r_lin <= 1e-1 &&
           r_quad <= 1e-2 && secs <= 600.0;
  v.detail = fmt::format(
      "M = 100: E[Q] {:.3g} (within 2x of 25.4), MSE ratio lin {:.2e} (<= 1e-1), quad "
      "{:.2e} (<= 1e-2), {:.1f} s (<= 600)",
      s.mean_Q, r_lin, r_quad, secs);
  return v;
}

struct ChainResult {
  std::vector<OptTrace> stages;
  ControlVector z_quad;
  ControlVector z_final;
  double seconds = 0.0;
};

ChainResult run_chain(const Problem &pr) {
  const auto t0 = std::chrono::steady_clock::now();
  ChainResult out;
  LbfgsOptions opts;
  opts.tol = 1e-3;
  opts.max_iter = 200;
  const SampleBatch batch = draw_batch(*pr.prior, 100, kSampleSeed);
  ControlVector z = pr.z0;
  for (Method m : {Method::Lin, Method::Quad, Method::QuadMc}) {
    const CostFunctional cost(*pr.model, *pr.prior, full_cost(m), batch);
    const auto f = [&](const ControlVector &x) {
      const CostGrad r = cost(x);
      return std::pair<double, ControlVector>{r.J, r.grad};
    };
    out.stages.push_back(lbfgs_b(f, z, pr.lower, pr.upper, opts, &pr.model->counter()));
    z = out.stages.back().z;
    if (m == Method::Quad) out.z_quad = z;
  }
  out.z_final = z;
  out.seconds = seconds_since(t0);
  return out;
}

// 5. Trace estimators at the quadratic-method optimum.
Verdict trace_comparison(const Problem &pr, const ControlVector &z_quad) {
  const auto lp =
      std::make_shared<LinearizationPoint>(linearize(*pr.model, pr.prior->mean(), z_quad));
  const HessOp hess(lp);
  Rng eig_rng(kEigSeed);
  const EigPairs ref = hessian_gevp(hess, *pr.prior, 140, 10, eig_rng);
  Rng eig_rng2(kEigSeed);
  const EigPairs e = hessian_gevp(hess, *pr.prior, 100, 10, eig_rng2);
  Rng probe(kProbeSeed);
  const TraceEstimate t1 = gaussian_trace(hess, *pr.prior, 100, probe);
  const double tr_ref = trace_from_eigs(ref, static_cast<int>(ref.size())).tr_h;
  const double err1 = std::abs(t1.tr_h - tr_ref);
  const double err2 = std::abs(trace_from_eigs(e, 100).tr_h - tr_ref);
  const double decay = std::abs(e.values[99] / e.values[0]);
  Verdict v;
  v.pass = err2 * 10.0 <= err1 && decay <= 1e-3;
  v.detail = fmt::format(
      "N = 100: T1 err {:.2e}, T2 err {:.2e}, ratio {:.3g} (>= 10); |lambda_100/lambda_1| "
      "{:.2e} (<= 1e-3)",
      err1, err2, err1 / std::max(err2, 1e-300), decay);
  return v;
}

// 6. Optimization outcome of the lin -> quad -> quad-mc chain.
Verdict optimization(const Problem &pr, const ChainResult &c) {
  int iters = 0;
  bool converged = true, monotone = true;
  std::string per_stage;
  for (const OptTrace &t : c.stages) {
    iters += t.iterations();
    converged = converged && t.converged();
    for (std::size_t k = 1; k < t.history.size(); ++k) {
      monotone = monotone && t.history[k].J <= t.history[k - 1].J;
    }
    per_stage += fmt::format("{}{}", per_stage.empty() ? "" : "+", t.iterations());
  }
  SampleBatch b = draw_batch(*pr.prior, 100, kValidationSeed);
  evaluate_Q(*pr.model, c.z_final, b);
  const MomentReport s = saa(b);
  Verdict v;
  v.pass = converged && iters <= 200 && s.mean <= 1.0 && s.var <= 0.1 && monotone;
  v.detail = fmt::format(
      "iterations {} = {} (<= 200, converged: {}), validation E[Q] {:.3g} (<= 1), Var[Q] "
      "{:.3g} (<= 0.1), J non-increasing: {}, {:.0f} s",
      per_stage, iters, converged ? "yes" : "no", s.mean, s.var, monotone ? "yes" : "no",
      c.seconds);
  return v;
}

// 7. Solve counts per cost and gradient evaluation.
Verdict ledgers() {
  const Problem pr = make_problem(16, 8);
  std::string detail;
  bool pass = true;
  for (Method m : {Method::Saa, Method::Lin, Method::Quad, Method::LinMc, Method::QuadMc}) {
    CostConfig cfg = full_cost(m);
    cfg.n_eigs = 20;
    cfg.oversampling = 10;
    cfg.samples = 10;
    const CostFunctional cost(*pr.model, *pr.prior, cfg);
    const CostGrad r = cost(pr.z0);
    const SolveLedger e = expected_solves(m, cfg.n_eigs, cfg.oversampling, cfg.samples);
    const bool ok = r.cost_solves.state == e.cost_state &&
                    r.cost_solves.linear == e.cost_linear && r.grad_solves.state == 0 &&
                    r.grad_solves.linear == e.grad_linear;
    pass = pass && ok;
    detail += fmt::format("{}{} {}/{}/{}{}", detail.empty() ? "" : ", ", to_string(m),
                          r.cost_solves.state, r.cost_solves.linear, r.grad_solves.linear,
                          ok ? "" : fmt::format(" (expected {}/{}/{})", e.cost_state,
                                                e.cost_linear, e.grad_linear));
  }
  Verdict v;
  v.pass = pass;
  v.detail = "N = 20, p = 10, M = 10, state/linear/gradient-linear: " + detail;
  return v;
}

// 8. Effective rank under mesh refinement. Returns the number of eigenvalues
// needed on each mesh at the control z.
std::vector<int> needed_eigs(const ControlVector &z) {
  std::vector<int> needed;
  for (auto [nx, ny] : {std::pair{16, 8}, std::pair{32, 16}, std::pair{64, 32}}) {
    const Problem pr = make_problem(nx, ny);
    const auto lp =
        std::make_shared<LinearizationPoint>(linearize(*pr.model, pr.prior->mean(), z));
    const HessOp hess(lp);
    Rng rng(kEigSeed);
    const EigPairs e = hessian_gevp(hess, *pr.prior, 140, 10, rng);
    const int k = static_cast<int>(e.size());
    const double ref = trace_from_eigs(e, k).tr_h;
    const double tol = 1e-3 * std::abs(e.values[0]);
    // Smallest N after which the truncation error stays below tol.
    int n = k;
    while (n > 0 && std::abs(trace_from_eigs(e, n - 1).tr_h - ref) <= tol) --n;
    needed.push_back(n);
  }
  return needed;
}

Verdict effective_rank(const Problem &pr, const ControlVector &z_quad) {
  auto spread = [](const std::vector<int> &v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  const std::vector<int> at_opt = needed_eigs(z_quad);
  const std::vector<int> at_z0 = needed_eigs(pr.z0);
  Verdict v;
  v.pass = spread(at_opt) <= 4 && spread(at_z0) <= 4;
  v.detail = fmt::format(
      "eigenvalues needed for T2 err <= 1e-3 |lambda_1| on 16x8, 32x16, 64x32 (spread <= 4, "
      "i.e. +-2): at the quad optimum {}, spread {}; at z0 {}, spread {}",
      fmt::join(at_opt, "/"), spread(at_opt), fmt::join(at_z0, "/"), spread(at_z0));
  return v;
}

}  // namespace

int main() {
  set_max_jobs(1);
  const auto guarded = [](int id, const std::string &name, const std::function<Verdict()> &f) {
    try {
      report(id, name, f());
    } catch (const std::exception &e) {
      report(id, name, {false, fmt::format("exception: {}", e.what())});
    }
  };
  guarded(1, "derivatives", derivatives);
  guarded(2, "eigensolver-oracle", eigensolver);
  guarded(3, "closed-form-quadratic", closed_form);

  const Problem full = make_problem(64, 32);
  guarded(4, "variance-reduction", [&] { return variance_reduction(full); });
  ChainResult chain;
  std::string chain_error;
  try {
    chain = run_chain(full);
  } catch (const std::exception &e) {
    chain_error = e.what();
  }
  guarded(5, "trace-estimators", [&] {
    if (!chain_error.empty()) throw Error(chain_error);
    return trace_comparison(full, chain.z_quad);
  });
  guarded(6, "optimization", [&] {
    if (!chain_error.empty()) throw Error(chain_error);
    return optimization(full, chain);
  });
  guarded(7, "solve-ledgers", ledgers);
  guarded(8, "effective-rank", [&] {
    if (!chain_error.empty()) throw Error(chain_error);
    return effective_rank(full, chain.z_quad);
  });
  fmt::print("{} of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
