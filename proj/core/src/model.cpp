// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc/model.hpp"

#include <array>

#include <fmt/format.h>

namespace uqoc {
namespace {

constexpr std::array<std::string_view, kNumFormTags> kNames = {
    "M",   "Z",   "vu",  "uv",  "uu",  "vm",  "um",  "mv",  "mu",  "mm",
    "zv",  "zu",  "zm",  "vmu", "vmm", "vum", "vuu", "umv", "umu", "umm",
    "uum", "uvu", "uvm", "uuv", "uuu", "Qu",  "Quu", "Quuu"};

Space letter_space(char c) noexcept {
  switch (c) {
    case 'm':
      return Space::Param;
    case 'z':
      return Space::Control;
    default:
      return Space::State;
  }
}

}  // namespace

std::string_view to_string(FormTag tag) noexcept {
  return kNames[static_cast<std::size_t>(tag)];
}

std::optional<FormTag> parse_form_tag(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<FormTag>(i);
  }
  return std::nullopt;
}

int form_arity(FormTag tag) noexcept {
  switch (tag) {
    case FormTag::M:
    case FormTag::Z:
    case FormTag::Qu:
      return 0;
    case FormTag::Quu:
      return 1;
    case FormTag::Quuu:
      return 2;
    default:
      return static_cast<int>(to_string(tag).size()) - 1;
  }
}

Space form_output_space(FormTag tag) noexcept {
  switch (tag) {
    case FormTag::M:
      return Space::Param;
    case FormTag::Z:
      return Space::Control;
    case FormTag::Qu:
    case FormTag::Quu:
    case FormTag::Quuu:
      return Space::State;
    default:
      return letter_space(to_string(tag)[0]);
  }
}

Eigen::Index LinearizedModel::dim_of(Space s) const noexcept {
  switch (s) {
    case Space::Param:
      return m_.size();
    case Space::Control:
      return z_.size();
    default:
      return n_state_;
  }
}

Vec LinearizedModel::form(FormTag tag, const AdjointVector &v, const Vec &p,
                          const Vec &q) const {
  const int arity = form_arity(tag);
  const std::string_view name = to_string(tag);
  auto arg_space = [&](int k) {
    if (tag == FormTag::Quu || tag == FormTag::Quuu) return Space::State;
    return letter_space(name[static_cast<std::size_t>(k)]);
  };
  if (v.size() != n_state_) {
    throw InvalidArgument(fmt::format("form {}: adjoint has size {}, expected {}",
                                      name, v.size(), n_state_));
  }
  const std::array<const Vec *, 2> args = {&p, &q};
  for (int k = 0; k < arity; ++k) {
    const Eigen::Index want = dim_of(arg_space(k + 1));
    if (args[k]->size() != want) {
      throw InvalidArgument(fmt::format("form {}: argument {} has size {}, expected {}",
                                        name, k + 1, args[k]->size(), want));
    }
  }
  return form_impl(tag, v, p, q);
}

void Model::check_dims(const ParamVector &m, const ControlVector &z) const {
  if (m.size() != param_dim()) {
    throw InvalidArgument(
        fmt::format("parameter has size {}, expected {}", m.size(), param_dim()));
  }
  if (z.size() != control_dim()) {
    throw InvalidArgument(
        fmt::format("control has size {}, expected {}", z.size(), control_dim()));
  }
}

AdjointVector solve_adjoint(const LinearizedModel &lin) {
  const Vec zero = Vec::Zero(lin.u().size());
  return lin.solve_uv(-lin.form(FormTag::Qu, zero));
}

DualVector grad_m(const LinearizedModel &lin, const AdjointVector &v) {
  return lin.form(FormTag::M, v);
}

StateVector solve_inc_state(const LinearizedModel &lin, const AdjointVector &v,
                            const ParamVector &mhat) {
  return lin.solve_vu(-lin.form(FormTag::vm, v, mhat));
}

AdjointVector solve_inc_adjoint(const LinearizedModel &lin, const AdjointVector &v,
                                const StateVector &uhat, const ParamVector &mhat) {
  Vec rhs = lin.form(FormTag::uu, v, uhat) + lin.form(FormTag::Quu, v, uhat) +
            lin.form(FormTag::um, v, mhat);
  return lin.solve_uv(-rhs);
}

}  // namespace uqoc
