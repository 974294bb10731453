// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "uqoc/csv.hpp"
#include "uqoc/model.hpp"
#include "uqoc/prior.hpp"
#include "uqoc_app/config.hpp"

namespace uqoc::app {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kConfig = 2,
  kSolver = 3,
  kCheckFailed = 4,
  kOptimizerFailed = 5,
};

std::string_view version() noexcept;

/// Model, prior and control box built from a RunConfig.
struct Setup {
  std::shared_ptr<const Mesh2D> mesh;
  std::unique_ptr<Model> model;
  std::unique_ptr<Prior> prior;
  const EllipticModel *elliptic = nullptr;  // set for the flow model
  Vec lower;
  Vec upper;
  ControlVector z0;
};

Setup make_setup(const RunConfig &cfg);

/// control.file when set, otherwise z0. Checks the size.
ControlVector initial_control(const RunConfig &cfg, const Setup &setup);

/// Seeds derived from rng.seed.
std::uint64_t eig_seed(const RunConfig &cfg) noexcept;
std::uint64_t sample_seed(const RunConfig &cfg) noexcept;
std::uint64_t probe_seed(const RunConfig &cfg) noexcept;

/// Output directory of one command. Files written through it are listed in
/// the manifest with their SHA-256.
class Output {
 public:
  Output(std::filesystem::path dir, std::string command, const RunConfig &cfg);

  const std::filesystem::path &dir() const noexcept { return dir_; }

  void write(const std::string &name, const CsvTable &table);
  void write_text(const std::string &name, const std::string &text);

  /// Writes config.resolved and manifest.json.
  void finish();

 private:
  std::filesystem::path dir_;
  std::string command_;
  const RunConfig &cfg_;
  std::vector<std::string> files_;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string &data);
std::string sha256_file(const std::filesystem::path &path);

}  // namespace uqoc::app
