// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "uqoc/parallel.hpp"
#include "uqoc_app/commands.hpp"
#include "uqoc_app/run.hpp"

int main(int argc, char **argv) {
  using namespace uqoc::app;
  CLI::App app{"Mean-variance optimal control under uncertainty with Taylor approximations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string out_dir;
  std::vector<std::string> overrides;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"check-derivatives", "finite-difference checks of all derivatives"},
      {"eigdecay", "eigenvalue decay and trace-estimator errors"},
      {"estimate", "moment estimates and variance-reduction tables"},
      {"optimize", "bound-constrained optimization of the control"},
      {"sample-field", "prior mean, samples and pressure on the mesh"},
  };
  for (const auto &[name, help] : commands) {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "base random seed (overrides rng.seed)");
    sub->add_option("--jobs", jobs, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--set", overrides, "extra key=value assignment, repeatable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto &kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", kv));
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
      };
      set_option(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    validate(cfg);
  } catch (const uqoc::InvalidArgument &e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  }
  uqoc::set_max_jobs(jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()));
  return run_command(app.get_subcommands().front()->get_name(), cfg);
}
