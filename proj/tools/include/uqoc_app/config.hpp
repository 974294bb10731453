// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "uqoc/cost.hpp"
#include "uqoc/lbfgsb.hpp"
#include "uqoc/problem.hpp"

namespace uqoc::app {

/// Rejected configuration: unknown key, bad value, inconsistent settings.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class ModelKind { Elliptic, Toy };

/// Synthetic quadratic model on the prior mesh: Q = q0 + g'd + d'Hd/2,
/// d = m - mbar + E z, with H of the given rank.
struct ToySpec {
  int rank = 8;
  int controls = 4;
  double q0 = 1.0;
  double decay = 0.5;  // eigenvalue ratio between consecutive modes of H
  std::uint64_t seed = 7;
};

struct RunConfig {
  ModelKind model = ModelKind::Elliptic;
  ProblemSpec problem;
  ToySpec toy;

  CostConfig cost;
  bool chain = true;  // warm-start through the cheaper methods
  int k_ref = 140;
  LbfgsOptions optimizer;

  std::uint64_t seed = 1;
  std::vector<int> estimate_samples{10, 100};
  std::vector<int> trace_n{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  int field_samples = 3;
  std::filesystem::path control_file;  // empty: z0
  int check_decades = 8;
  bool corrupt_gradient = false;  // test hook for check-derivatives
  std::filesystem::path output_dir = "out";

  /// Every key with its resolved value, in a stable order.
  std::map<std::string, std::string> resolved() const;
  /// resolved() as key = value lines.
  std::string resolved_text() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, duplicates
/// and malformed values raise ConfigError.
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::filesystem::path &path);

/// Applies one key = value assignment.
void set_option(RunConfig &cfg, const std::string &key, const std::string &value);

/// Cross-field checks: sizes, bounds, method fields.
void validate(const RunConfig &cfg);

}  // namespace uqoc::app
