// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include "uqoc/common.hpp"

namespace uqoc {

/// Derivative forms of the residual r(u, v, m, z) = 0 (linear in v) and of the
/// objective Q(u).
///
/// Letters name the differentiation variables in order. The first letter is
/// the output space: a form "x..." returns the dual vector paired with a
/// direction in x. The remaining letters name the argument spaces, so
///   form(vm, v, p)     = d2r/dv dm [., p]
///   form(vmu, v, p, q) = d3r/dv dm du [., p, q]
/// with p in the m-space and q in the u-space. Forms without a "v" are
/// evaluated with the adjoint v of the linearization point.
/// M and Z are the first-order forms dr/dm and dr/dz (the m-gradient and the
/// control gradient at that point).
enum class FormTag : std::uint8_t {
  M,
  Z,
  vu,
  uv,
  uu,
  vm,
  um,
  mv,
  mu,
  mm,
  zv,
  zu,
  zm,
  vmu,
  vmm,
  vum,
  vuu,
  umv,
  umu,
  umm,
  uum,
  uvu,
  uvm,
  uuv,
  uuu,
  Qu,
  Quu,
  Quuu,
};

inline constexpr int kNumFormTags = static_cast<int>(FormTag::Quuu) + 1;

std::string_view to_string(FormTag tag) noexcept;
std::optional<FormTag> parse_form_tag(std::string_view name) noexcept;

/// Number of direction arguments a form takes (0, 1 or 2).
int form_arity(FormTag tag) noexcept;

enum class Space : std::uint8_t { State, Param, Control };

/// Output space of a form. Adjoint-space outputs are reported as State.
Space form_output_space(FormTag tag) noexcept;

struct SolveCounts {
  long long state = 0;
  long long linear = 0;

  friend SolveCounts operator-(SolveCounts a, SolveCounts b) {
    return {a.state - b.state, a.linear - b.linear};
  }
  friend bool operator==(SolveCounts, SolveCounts) = default;
};

/// Thread-safe tally of state solves (full forward problem) and linearized
/// solves (adjoint, incremental, multiplier problems).
class SolveCounter {
 public:
  void add_state(long long n = 1) noexcept { state_.fetch_add(n); }
  void add_linear(long long n = 1) noexcept { linear_.fetch_add(n); }
  SolveCounts snapshot() const noexcept { return {state_.load(), linear_.load()}; }
  void reset() noexcept {
    state_ = 0;
    linear_ = 0;
  }

 private:
  std::atomic<long long> state_{0};
  std::atomic<long long> linear_{0};
};

/// Model frozen at (m, z, u). Immutable; all methods are reentrant.
class LinearizedModel {
 public:
  virtual ~LinearizedModel() = default;

  const ParamVector &m() const noexcept { return m_; }
  const ControlVector &z() const noexcept { return z_; }
  const StateVector &u() const noexcept { return u_; }

  /// Solves d2r/dv du [., x] = rhs (incremental state and u-multipliers).
  virtual StateVector solve_vu(const Vec &rhs) const = 0;
  /// Solves d2r/du dv [., x] = rhs (adjoint, incremental adjoint, v-multipliers).
  virtual AdjointVector solve_uv(const Vec &rhs) const = 0;

  /// Applies a form at this point with adjoint v. Unused arguments may be
  /// empty. Throws InvalidArgument on an arity or size mismatch.
  Vec form(FormTag tag, const AdjointVector &v, const Vec &p = Vec(),
           const Vec &q = Vec()) const;

  double eval_Q() const { return eval_Q_impl(); }

 protected:
  LinearizedModel(ParamVector m, ControlVector z, StateVector u,
                  std::shared_ptr<SolveCounter> counter, Eigen::Index n_state)
      : m_(std::move(m)),
        z_(std::move(z)),
        u_(std::move(u)),
        counter_(std::move(counter)),
        n_state_(n_state) {}

  virtual Vec form_impl(FormTag tag, const AdjointVector &v, const Vec &p,
                        const Vec &q) const = 0;
  virtual double eval_Q_impl() const = 0;

  SolveCounter &counter() const noexcept { return *counter_; }

 private:
  Eigen::Index dim_of(Space s) const noexcept;

  ParamVector m_;
  ControlVector z_;
  StateVector u_;
  std::shared_ptr<SolveCounter> counter_;
  Eigen::Index n_state_;
};

/// A control problem under uncertainty: a state equation r(u, v, m, z) = 0
/// and an objective Q(u).
class Model {
 public:
  virtual ~Model() = default;

  virtual Eigen::Index param_dim() const noexcept = 0;
  virtual Eigen::Index state_dim() const noexcept = 0;
  virtual Eigen::Index control_dim() const noexcept = 0;

  /// Counted as one state solve.
  virtual StateVector solve_state(const ParamVector &m, const ControlVector &z) const = 0;
  virtual double eval_Q(const StateVector &u) const = 0;

  /// Freezes the model at (m, z, u); u must solve the state equation. No
  /// solves are counted.
  virtual std::shared_ptr<const LinearizedModel> linearize(const ParamVector &m,
                                                           const ControlVector &z,
                                                           StateVector u) const = 0;

  SolveCounter &counter() const noexcept { return *counter_; }
  std::shared_ptr<SolveCounter> counter_ptr() const noexcept { return counter_; }

 protected:
  void check_dims(const ParamVector &m, const ControlVector &z) const;

 private:
  std::shared_ptr<SolveCounter> counter_ = std::make_shared<SolveCounter>();
};

/// Adjoint v solving d2r/du dv [., v] = -dQ/du. One linear solve.
AdjointVector solve_adjoint(const LinearizedModel &lin);

/// dr/dm at (u, v, m): the m-gradient of Q when v is the adjoint.
DualVector grad_m(const LinearizedModel &lin, const AdjointVector &v);

/// Incremental state for direction mhat. One linear solve.
StateVector solve_inc_state(const LinearizedModel &lin, const AdjointVector &v,
                            const ParamVector &mhat);

/// Incremental adjoint for (uhat, mhat). One linear solve.
AdjointVector solve_inc_adjoint(const LinearizedModel &lin, const AdjointVector &v,
                                const StateVector &uhat, const ParamVector &mhat);

}  // namespace uqoc
