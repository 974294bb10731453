// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "uqoc/estimators.hpp"
#include "uqoc/hessian.hpp"
#include "uqoc/model.hpp"
#include "uqoc/prior.hpp"
#include "uqoc/randeig.hpp"

namespace uqoc {

enum class Method { Saa, Lin, Quad, LinMc, QuadMc };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;
bool uses_samples(Method m) noexcept;
bool uses_eigs(Method m) noexcept;

/// Mean-variance cost J(z) = E[Q] + beta Var[Q] + beta_p |z|^2 under one of
/// the five approximations.
struct CostConfig {
  Method method = Method::Lin;
  double beta = 1.0;
  double beta_p = 1e-5;
  int n_eigs = 100;  // N
  int oversampling = 10;
  int samples = 100;  // M
  std::uint64_t eig_seed = 1;
  std::uint64_t sample_seed = 2;
  /// Relative gap below which eigenvalues at the truncation count as repeated.
  double cluster_tol = 1e-10;

  void validate() const;
};

double penalty(const CostConfig &cfg, const ControlVector &z);
ControlVector dz_penalty(const CostConfig &cfg, const ControlVector &z);

/// Lagrange multipliers of one evaluation. Scaled eigenvector multipliers are
/// kept as factors: psi*_j = eig_factors[j] psi_j, likewise for uhat*, vhat*.
struct AdjointBundle {
  std::vector<AdjointVector> sample_adjoints;  // v_i
  StateVector u_star;
  AdjointVector v_star;
  Vec eig_factors;
  Vec sample_factors;  // psi*_i = sample_factors[i] (m_i - mbar)
  ParamVector w;       // m-direction of the gradient terms
  double c = 0.0;      // mean quadratic remainder
};

struct CostGrad {
  double J = 0.0;
  double mean = 0.0;
  double var = 0.0;
  ControlVector grad;  // empty when not requested
  SolveCounts cost_solves;
  SolveCounts grad_solves;
  int n_eigs_used = 0;
  AdjointBundle bundle;
};

CostGrad cost_grad_saa(const Model &model, const Prior &prior, const ControlVector &z,
                       const SampleBatch &batch, const CostConfig &cfg,
                       bool gradient = true);
CostGrad cost_grad_lin(const Model &model, const Prior &prior, const ControlVector &z,
                       const CostConfig &cfg, bool gradient = true);
CostGrad cost_grad_quad(const Model &model, const Prior &prior, const ControlVector &z,
                        const CostConfig &cfg, bool gradient = true);
CostGrad cost_grad_lin_mc(const Model &model, const Prior &prior, const ControlVector &z,
                          const SampleBatch &batch, const CostConfig &cfg,
                          bool gradient = true);
CostGrad cost_grad_quad_mc(const Model &model, const Prior &prior, const ControlVector &z,
                           const SampleBatch &batch, const CostConfig &cfg,
                           bool gradient = true);

/// Cost with frozen randomness: the sample batch and the eigensolver seed are
/// fixed at construction, so J(z) is deterministic.
class CostFunctional {
 public:
  CostFunctional(const Model &model, const Prior &prior, CostConfig cfg);
  CostFunctional(const Model &model, const Prior &prior, CostConfig cfg, SampleBatch batch);

  CostGrad operator()(const ControlVector &z, bool gradient = true) const;

  const CostConfig &config() const noexcept { return cfg_; }
  const SampleBatch &batch() const noexcept { return batch_; }

 private:
  const Model &model_;
  const Prior &prior_;
  CostConfig cfg_;
  SampleBatch batch_;
};

/// Expected solve counts per evaluation: (state, linear) for the cost and
/// linear solves for the gradient.
struct SolveLedger {
  long long cost_state = 0;
  long long cost_linear = 0;
  long long grad_linear = 0;
};

SolveLedger expected_solves(Method m, int n_eigs, int oversampling, int samples);

}  // namespace uqoc
