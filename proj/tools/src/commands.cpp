// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <fmt/format.h>

#include "uqoc/cost.hpp"
#include "uqoc/elliptic.hpp"
#include "uqoc/estimators.hpp"
#include "uqoc/hessian.hpp"
#include "uqoc/lbfgsb.hpp"
#include "uqoc/randeig.hpp"
#include "uqoc_app/run.hpp"

namespace uqoc::app {

namespace {

constexpr double kGradTol = 1e-5;
constexpr double kHessTol = 1e-4;
constexpr double kSymTol = 1e-10;
constexpr double kZGradTol = 1e-4;

std::uint64_t validation_seed(const RunConfig &cfg) noexcept { return cfg.seed + 3; }

CostConfig stage_config(const RunConfig &cfg, Method m) {
  CostConfig c = cfg.cost;
  c.method = m;
  c.eig_seed = eig_seed(cfg);
  c.sample_seed = sample_seed(cfg);
  return c;
}

std::shared_ptr<const LinearizationPoint> make_point(const Setup &s, const ControlVector &z) {
  return std::make_shared<const LinearizationPoint>(linearize(*s.model, s.prior->mean(), z));
}

double min_error(const std::vector<FdRow> &rows) {
  double best = INFINITY;
  for (const auto &r : rows) best = std::min(best, r.rel_error);
  return best;
}

void corrupt(std::vector<FdRow> &rows, double factor) {
  for (auto &r : rows) {
    r.analytic *= factor;
    r.rel_error = fd_relative_error(r.fd, r.analytic);
  }
}

CsvTable fd_table(const std::vector<FdRow> &rows) {
  CsvTable t({"step", "fd", "analytic", "rel_error"});
  for (const auto &r : rows) t.add_row({r.step, r.fd, r.analytic, r.rel_error});
  return t;
}

std::vector<Method> chain_for(const RunConfig &cfg) {
  const Method m = cfg.cost.method;
  if (!cfg.chain) return {m};
  switch (m) {
    case Method::Quad:
      return {Method::Lin, Method::Quad};
    case Method::LinMc:
      return {Method::Lin, Method::LinMc};
    case Method::QuadMc:
      return {Method::Lin, Method::Quad, Method::QuadMc};
    default:
      return {m};
  }
}

SampleBatch head(const SampleBatch &b, int m) {
  SampleBatch out;
  out.seed = b.seed;
  out.m = b.m.leftCols(m);
  out.Q = b.Q.head(m);
  out.Qbar = b.Qbar;
  out.lin = b.lin.head(m);
  if (b.quad.size() > 0) out.quad = b.quad.head(m);
  return out;
}

double rel(double exact, double approx) {
  return exact == 0.0 ? std::abs(approx) : std::abs(exact - approx) / std::abs(exact);
}

struct EstimateTables {
  CsvTable mean{{"control_id", "M", "Ehat", "MSE_Q", "MSE_Q_lin", "MSE_Q_quad"}};
  CsvTable var{{"control_id", "M", "Ehat", "MSE_q", "MSE_q_lin", "MSE_q_quad"}};
  CsvTable moments{{"control_id", "method", "M", "mean", "var"}};
  CsvTable errors{{"control_id", "sample", "Q", "Q_lin", "Q_quad", "q", "q_lin", "q_quad",
                   "rel_error_Q_lin", "rel_error_Q_quad", "rel_error_q_lin",
                   "rel_error_q_quad"}};
};

// Variance-reduction rows and moment estimates at one control; samples are
// nested prefixes of one batch.
void estimate_at(const RunConfig &cfg, const Setup &s, const ControlVector &z,
                 const std::string &id, const std::vector<int> &sample_counts,
                 std::uint64_t seed, EstimateTables &t) {
  const auto lp = make_point(s, z);
  const HessOp hess(lp);
  Rng rng(eig_seed(cfg));
  const int k = static_cast<int>(std::min<Eigen::Index>(
      cfg.cost.n_eigs, std::max<Eigen::Index>(s.prior->dim() - cfg.cost.oversampling, 1)));
  const EigPairs eigs = hessian_gevp(hess, *s.prior, k, cfg.cost.oversampling, rng);
  const int n = cluster_safe_count(eigs.values, k, cfg.cost.cluster_tol);

  const int m_max = *std::max_element(sample_counts.begin(), sample_counts.end());
  SampleBatch all = draw_batch(*s.prior, m_max, seed);
  evaluate_Q(*s.model, z, all);
  evaluate_taylor(*lp, &hess, all);

  const Moments lin = taylor_lin_moments(*lp, *s.prior);
  const Moments quad = taylor_quad_moments(*lp, *s.prior, eigs, n);
  t.moments.add_row({id, std::string("lin"), 0LL, lin.mean, lin.var});
  t.moments.add_row({id, std::string("quad"), 0LL, quad.mean, quad.var});

  for (int m : sample_counts) {
    const SampleBatch b = head(all, m);
    const MseSummary sum = mse_summary(b);
    t.mean.add_row({id, static_cast<long long>(m), sum.mean_Q, sum.mse_Q, sum.mse_Q_lin,
                    sum.mse_Q_quad});
    t.var.add_row({id, static_cast<long long>(m), sum.mean_q, sum.mse_q, sum.mse_q_lin,
                   sum.mse_q_quad});
    const MomentReport mc = saa(b);
    const MomentReport lmc = mc_corrected_lin(*lp, *s.prior, b);
    const MomentReport qmc = mc_corrected_quad(*lp, *s.prior, eigs, n, b);
    t.moments.add_row({id, std::string("saa"), static_cast<long long>(m), mc.mean, mc.var});
    t.moments.add_row({id, std::string("lin-mc"), static_cast<long long>(m), lmc.mean, lmc.var});
    t.moments.add_row({id, std::string("quad-mc"), static_cast<long long>(m), qmc.mean, qmc.var});
    fmt::print("{} M={}: E[Q] {:.6g}  MSE(Q) {:.3e}  MSE(Q-Q_lin) {:.3e}  MSE(Q-Q_quad) {:.3e}\n",
               id, m, sum.mean_Q, sum.mse_Q, sum.mse_Q_lin, sum.mse_Q_quad);
  }

  const Vec ql = all.Qlin();
  const Vec qq = all.Qquad();
  for (int i = 0; i < m_max; ++i) {
    const double q = std::pow(all.Q[i] - all.Qbar, 2);
    const double q_lin = std::pow(all.lin[i], 2);
    const double q_quad = std::pow(all.lin[i] + all.quad[i], 2);
    t.errors.add_row({id, static_cast<long long>(i), all.Q[i], ql[i], qq[i], q, q_lin, q_quad,
                      rel(all.Q[i], ql[i]), rel(all.Q[i], qq[i]), rel(q, q_lin), rel(q, q_quad)});
  }
}

void write_estimate(Output &out, const EstimateTables &t) {
  out.write("estimate_Q.csv", t.mean);
  out.write("estimate_q.csv", t.var);
  out.write("moments.csv", t.moments);
  out.write("taylor_errors.csv", t.errors);
}

}  // namespace

int cmd_check_derivatives(const RunConfig &cfg) {
  const Setup s = make_setup(cfg);
  Output out(cfg.output_dir, "check-derivatives", cfg);
  const ControlVector z = initial_control(cfg, s);
  const ParamVector &mbar = s.prior->mean();
  const Rng probe(probe_seed(cfg));
  Rng r0 = probe.stream(0), r1 = probe.stream(1), r2 = probe.stream(2);
  const ParamVector mhat = s.prior->sample(r0) - mbar;
  const ParamVector mtilde = s.prior->sample(r1) - mbar;
  const ControlVector dz = r2.normal_vector(z.size());
  const std::vector<double> steps = decade_steps(cfg.check_decades);
  const double factor = cfg.corrupt_gradient ? 1.01 : 1.0;

  CsvTable summary({"check", "min_rel_error", "threshold", "passed"});
  bool ok = true;
  auto report = [&](const std::string &name, double err, double tol) {
    const bool pass = err <= tol;
    ok = ok && pass;
    summary.add_row({name, err, tol, static_cast<long long>(pass)});
    fmt::print("{:<14} {:.3e}  (<= {:.0e})  {}\n", name, err, tol, pass ? "ok" : "FAILED");
  };

  auto grad = fd_check_gradient(*s.model, mbar, z, mhat, steps);
  corrupt(grad, factor);
  out.write("check_gradient.csv", fd_table(grad));
  report("gradient", min_error(grad), kGradTol);

  auto hess_rows = fd_check_hessian(*s.model, mbar, z, mhat, mtilde, steps);
  corrupt(hess_rows, factor);
  out.write("check_hessian.csv", fd_table(hess_rows));
  report("hessian", min_error(hess_rows), kHessTol);

  const HessOp hess(make_point(s, z));
  const double a = mtilde.dot(hess.apply(mhat));
  const double b = mhat.dot(hess.apply(mtilde));
  const double scale = std::max(std::abs(a), std::abs(b));
  report("symmetry", scale == 0.0 ? 0.0 : std::abs(a - b) / scale, kSymTol);

  CsvTable zt({"method", "step", "fd", "analytic", "rel_error"});
  const double zscale = std::max(1.0, z.cwiseAbs().maxCoeff());
  for (Method m : {Method::Saa, Method::Lin, Method::Quad, Method::LinMc, Method::QuadMc}) {
    const CostFunctional f(*s.model, *s.prior, stage_config(cfg, m));
    const double analytic = factor * f(z).grad.dot(dz);
    std::vector<FdRow> rows;
    for (double h : steps) {
      const double hz = h * zscale;
      const double fd =
          (f(z + hz * dz, false).J - f(z - hz * dz, false).J) / (2.0 * hz);
      rows.push_back({hz, fd, analytic, fd_relative_error(fd, analytic)});
      zt.add_row({std::string(to_string(m)), hz, fd, analytic, rows.back().rel_error});
    }
    report(fmt::format("zgrad-{}", to_string(m)), min_error(rows), kZGradTol);
  }
  out.write("check_zgrad.csv", zt);
  out.write("check_summary.csv", summary);
  out.finish();
  return ok ? kOk : kCheckFailed;
}

int cmd_eigdecay(const RunConfig &cfg) {
  const Setup s = make_setup(cfg);
  Output out(cfg.output_dir, "eigdecay", cfg);
  const ControlVector z = initial_control(cfg, s);
  const HessOp hess(make_point(s, z));

  Rng rng(eig_seed(cfg));
  const EigPairs eigs = hessian_gevp(hess, *s.prior, cfg.cost.n_eigs, cfg.cost.oversampling, rng);
  EigPairs ref = eigs;
  if (cfg.k_ref != cfg.cost.n_eigs) {
    Rng rng_ref(eig_seed(cfg));
    ref = hessian_gevp(hess, *s.prior, cfg.k_ref, cfg.cost.oversampling, rng_ref);
  }
  auto spectrum = [](const EigPairs &e) {
    CsvTable t({"j", "lambda", "sign"});
    for (Eigen::Index j = 0; j < e.size(); ++j) {
      const double l = e.values[j];
      t.add_row({static_cast<long long>(j + 1), std::abs(l), static_cast<long long>(l < 0 ? -1 : 1)});
    }
    return t;
  };
  out.write("spectrum.csv", spectrum(eigs));
  out.write("spectrum_ref.csv", spectrum(ref));

  Rng probe(probe_seed(cfg));
  out.write("trace_error.csv", trace_error_sweep(hess, *s.prior, cfg.trace_n, eigs, ref, probe));
  if (eigs.size() > 0) {
    fmt::print("lambda_1 {:.6e}  lambda_{} {:.6e}  ratio {:.3e}\n", eigs.values[0], eigs.size(),
               eigs.values[eigs.size() - 1],
               std::abs(eigs.values[eigs.size() - 1] / eigs.values[0]));
  }
  out.finish();
  return kOk;
}

int cmd_estimate(const RunConfig &cfg) {
  const Setup s = make_setup(cfg);
  Output out(cfg.output_dir, "estimate", cfg);
  const ControlVector z = initial_control(cfg, s);
  const std::string id = cfg.control_file.empty() ? "z0" : cfg.control_file.stem().string();
  EstimateTables t;
  estimate_at(cfg, s, z, id, cfg.estimate_samples, sample_seed(cfg), t);
  write_estimate(out, t);
  out.finish();
  return kOk;
}

int cmd_optimize(const RunConfig &cfg) {
  const Setup s = make_setup(cfg);
  Output out(cfg.output_dir, "optimize", cfg);
  const ControlVector z_start = initial_control(cfg, s);
  const std::vector<Method> stages = chain_for(cfg);

  const bool need_batch = std::any_of(stages.begin(), stages.end(), uses_samples);
  const SampleBatch batch =
      need_batch ? draw_batch(*s.prior, cfg.cost.samples, sample_seed(cfg)) : SampleBatch();

  CsvTable trace({"method", "iter", "J", "pg_norm", "state_solves", "linear_solves", "seconds"});
  CsvTable summary({"method", "iterations", "evaluations", "reason", "J", "mean", "var",
                    "pg_norm", "eigs_used"});
  s.model->counter().reset();
  ControlVector z = z_start;
  double t_offset = 0.0;
  bool failed = false;
  for (Method m : stages) {
    const CostConfig c = stage_config(cfg, m);
    const CostFunctional f = uses_samples(m) ? CostFunctional(*s.model, *s.prior, c, batch)
                                             : CostFunctional(*s.model, *s.prior, c);
    const OptTrace tr = lbfgs_b(
        [&](const ControlVector &x) {
          CostGrad r = f(x);
          return std::make_pair(r.J, std::move(r.grad));
        },
        z, s.lower, s.upper, cfg.optimizer, &s.model->counter());
    for (const auto &it : tr.history) {
      trace.add_row({std::string(to_string(m)), static_cast<long long>(it.iter), it.J,
                     it.pg_norm, it.solves.state, it.solves.linear, t_offset + it.seconds});
    }
    if (!tr.history.empty()) t_offset += tr.history.back().seconds;
    z = tr.z;
    const CostGrad final = f(z, false);
    const double pg = tr.history.empty() ? 0.0 : tr.history.back().pg_norm;
    summary.add_row({std::string(to_string(m)), static_cast<long long>(tr.iterations()),
                     static_cast<long long>(tr.evaluations), std::string(to_string(tr.reason)),
                     final.J, final.mean, final.var, pg,
                     static_cast<long long>(final.n_eigs_used)});
    fmt::print("{:<8} {:>4} iterations  J {:.6g}  E {:.6g}  Var {:.6g}  ({})\n", to_string(m),
               tr.iterations(), final.J, final.mean, final.var, to_string(tr.reason));
    if (uses_eigs(m) && final.n_eigs_used < c.n_eigs) {
      fmt::print(stderr, "warning: {} of {} eigenpairs kept to avoid splitting a cluster\n",
                 final.n_eigs_used, c.n_eigs);
    }
    if (!tr.converged()) {
      failed = true;
      break;
    }
  }
  out.write("trace.csv", trace);
  out.write("optimize_summary.csv", summary);
  CsvTable control({"well", "z"});
  for (Eigen::Index i = 0; i < z.size(); ++i) control.add_row({static_cast<long long>(i), z[i]});
  out.write("control.csv", control);

  if (!failed) {
    EstimateTables t;
    const std::vector<int> counts{cfg.cost.samples < 2 ? 2 : cfg.cost.samples};
    estimate_at(cfg, s, z_start, "z0", counts, validation_seed(cfg), t);
    estimate_at(cfg, s, z, "zopt", counts, validation_seed(cfg), t);
    write_estimate(out, t);
  }
  out.finish();
  return failed ? kOptimizerFailed : kOk;
}

int cmd_sample_field(const RunConfig &cfg) {
  const Setup s = make_setup(cfg);
  Output out(cfg.output_dir, "sample-field", cfg);
  const Rng rng(sample_seed(cfg));
  std::vector<ParamVector> samples;
  for (int i = 0; i < cfg.field_samples; ++i) {
    Rng r = rng.stream(static_cast<std::uint64_t>(i));
    samples.push_back(s.prior->sample(r));
  }
  std::vector<std::string> header{"node", "x", "y", "mean"};
  for (int i = 0; i < cfg.field_samples; ++i) header.push_back(fmt::format("sample_{}", i + 1));
  Vec pressure;
  if (s.elliptic) {
    header.push_back("pressure");
    const ControlVector z = initial_control(cfg, s);
    pressure = s.elliptic->full_state(s.model->solve_state(s.prior->mean(), z));
  }
  CsvTable field(header);
  const auto &nodes = s.mesh->nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    std::vector<CsvTable::Cell> row{static_cast<long long>(k), nodes[k].x, nodes[k].y,
                                    s.prior->mean()[kk]};
    for (const auto &m : samples) row.emplace_back(m[kk]);
    if (s.elliptic) row.emplace_back(pressure[kk]);
    field.add_row(std::move(row));
  }
  out.write("field.csv", field);

  CsvTable wells({"kind", "index", "x", "y", "target"});
  if (s.elliptic) {
    const WellConfig &w = s.elliptic->wells();
    for (std::size_t i = 0; i < w.injection.size(); ++i) {
      wells.add_row({std::string("injection"), static_cast<long long>(i), w.injection[i].x,
                     w.injection[i].y, std::string("")});
    }
    for (std::size_t i = 0; i < w.production.size(); ++i) {
      wells.add_row({std::string("production"), static_cast<long long>(i), w.production[i].x,
                     w.production[i].y, w.target[static_cast<Eigen::Index>(i)]});
    }
  }
  out.write("wells.csv", wells);
  out.finish();
  return kOk;
}

int run_command(const std::string &name, const RunConfig &cfg) {
  static const std::map<std::string, std::function<int(const RunConfig &)>> table = {
      {"check-derivatives", cmd_check_derivatives},
      {"eigdecay", cmd_eigdecay},
      {"estimate", cmd_estimate},
      {"optimize", cmd_optimize},
      {"sample-field", cmd_sample_field},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    fmt::print(stderr, "error: unknown command '{}'\n", name);
    return kConfig;
  }
  try {
    return it->second(cfg);
  } catch (const InvalidArgument &e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const SolverError &e) {
    fmt::print(stderr, "solver error: {}\n", e.what());
    return kSolver;
  } catch (const std::exception &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kError;
  }
}

}  // namespace uqoc::app
