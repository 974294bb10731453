// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc_app/run.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "json.hpp"
#include "uqoc/elliptic.hpp"
#include "uqoc/quadratic_toy.hpp"

namespace uqoc::app {

std::string_view version() noexcept { return "0.1.0"; }

std::uint64_t eig_seed(const RunConfig &cfg) noexcept { return cfg.seed; }
std::uint64_t sample_seed(const RunConfig &cfg) noexcept { return cfg.seed + 1; }
std::uint64_t probe_seed(const RunConfig &cfg) noexcept { return cfg.seed + 2; }

namespace {

std::unique_ptr<Model> make_toy(const RunConfig &cfg, const Prior &prior) {
  const Eigen::Index n = prior.dim();
  const ToySpec &t = cfg.toy;
  if (t.rank > n) throw ConfigError("toy.rank exceeds the parameter dimension");
  Rng rng(t.seed);
  const Mat w = Eigen::HouseholderQR<Mat>(rng.normal_matrix(n, t.rank))
                    .householderQ() *
                Mat::Identity(n, t.rank);
  Vec core_diag(t.rank);
  for (int j = 0; j < t.rank; ++j) core_diag[j] = (j % 2 ? -1.0 : 1.0) * std::pow(t.decay, j);
  const Mat core = core_diag.asDiagonal();
  const Vec g = w * rng.normal_vector(t.rank);
  const Mat coupling = w * rng.normal_matrix(t.rank, t.controls);
  return std::make_unique<QuadraticToyModel>(prior.mean(), t.q0, g, w, core, coupling);
}

}  // namespace

Setup make_setup(const RunConfig &cfg) {
  Setup s;
  Problem p = build_problem(cfg.problem);
  s.mesh = p.mesh;
  s.prior = std::move(p.prior);
  if (cfg.model == ModelKind::Elliptic) {
    s.elliptic = p.model.get();
    s.model = std::move(p.model);
    s.lower = p.lower;
    s.upper = p.upper;
    s.z0 = p.z0;
  } else {
    s.model = make_toy(cfg, *s.prior);
    const Eigen::Index nc = s.model->control_dim();
    s.lower = Vec::Constant(nc, cfg.problem.z_min);
    s.upper = Vec::Constant(nc, cfg.problem.z_max);
    s.z0 = Vec::Constant(nc, cfg.problem.z0);
  }
  return s;
}

ControlVector initial_control(const RunConfig &cfg, const Setup &setup) {
  if (cfg.control_file.empty()) return setup.z0;
  std::ifstream in(cfg.control_file);
  if (!in) throw ConfigError(fmt::format("cannot read control file '{}'", cfg.control_file.string()));
  // Either the optimizer's (well, z) table or one value per line.
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of("0123456789+-.eE,") != std::string::npos) continue;
    const auto comma = line.rfind(',');
    values.push_back(std::stod(comma == std::string::npos ? line : line.substr(comma + 1)));
  }
  if (static_cast<Eigen::Index>(values.size()) != setup.z0.size()) {
    throw ConfigError(fmt::format("control file has {} entries, model has {} controls",
                                  values.size(), setup.z0.size()));
  }
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string sha256_hex(const std::string &data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string sha256_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

Output::Output(std::filesystem::path dir, std::string command, const RunConfig &cfg)
    : dir_(std::move(dir)), command_(std::move(command)), cfg_(cfg) {
  std::filesystem::create_directories(dir_);
}

void Output::write(const std::string &name, const CsvTable &table) {
  table.write(dir_ / name);
  files_.push_back(name);
}

void Output::write_text(const std::string &name, const std::string &text) {
  std::ofstream out(dir_ / name, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", (dir_ / name).string()));
  out << text;
  files_.push_back(name);
}

void Output::finish() {
  const std::string resolved = cfg_.resolved_text();
  write_text("config.resolved", resolved);
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["config_sha256"] = sha256_hex(resolved);
  j["seed"] = cfg_.seed;
  j["version"] = std::string(version());
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto &f : files_) files[f] = sha256_file(dir_ / f);
  j["files"] = files;
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << j.dump(2) << '\n';
}

}  // namespace uqoc::app
