// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "uqoc_app/config.hpp"

namespace uqoc::app {

/// Each command writes its CSV files, config.resolved and manifest.json into
/// cfg.output_dir and returns a process exit code.
int cmd_check_derivatives(const RunConfig &cfg);
int cmd_eigdecay(const RunConfig &cfg);
int cmd_estimate(const RunConfig &cfg);
int cmd_optimize(const RunConfig &cfg);
int cmd_sample_field(const RunConfig &cfg);

/// Dispatches by name and maps library errors to exit codes.
int run_command(const std::string &name, const RunConfig &cfg);

}  // namespace uqoc::app
