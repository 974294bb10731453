// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "uqoc_app/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "uqoc/csv.hpp"

namespace uqoc::app {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string &key, const std::string &value,
                            std::string_view expected) {
  throw ConfigError(fmt::format("{}: cannot parse '{}' as {}", key, value, expected));
}

double to_double(const std::string &key, const std::string &v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "a number");
  }
  return x;
}

long long to_int(const std::string &key, const std::string &v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "an integer");
  }
  return x;
}

int to_int32(const std::string &key, const std::string &v) {
  const long long x = to_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) bad_value(key, v, "a 32-bit integer");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string &key, const std::string &v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "an unsigned integer");
  }
  return x;
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<int> to_int_list(const std::string &key, const std::string &v) {
  std::vector<int> out;
  for (const auto &item : split(v, ',')) out.push_back(to_int32(key, item));
  return out;
}

std::string int_list(const std::vector<int> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Either "grid(x0, dx, nx, y0, dy, ny)" or "x y; x y; ...".
std::vector<Point> to_points(const std::string &key, const std::string &v) {
  if (v.rfind("grid(", 0) == 0 && v.back() == ')') {
    const auto args = split(std::string_view(v).substr(5, v.size() - 6), ',');
    if (args.size() != 6) bad_value(key, v, "grid(x0, dx, nx, y0, dy, ny)");
    return uniform_grid(to_double(key, args[0]), to_double(key, args[1]),
                        to_int32(key, args[2]), to_double(key, args[3]),
                        to_double(key, args[4]), to_int32(key, args[5]));
  }
  std::vector<Point> out;
  for (const auto &item : split(v, ';')) {
    std::istringstream in(item);
    std::string xs, ys, extra;
    if (!(in >> xs >> ys) || (in >> extra)) bad_value(key, v, "'x y' pairs separated by ';'");
    out.push_back({to_double(key, xs), to_double(key, ys)});
  }
  return out;
}

std::string points(const std::vector<Point> &pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += fmt::format("{}{} {}", i ? "; " : "", format_double(pts[i].x), format_double(pts[i].y));
  }
  return s;
}

std::string_view to_string(ModelKind k) { return k == ModelKind::Toy ? "toy" : "elliptic"; }

struct Key {
  std::function<void(RunConfig &, const std::string &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

#define UQOC_DOUBLE(field)                                                             \
  Key {                                                                                \
    [](RunConfig &c, const std::string &k, const std::string &v) {                     \
      c.field = to_double(k, v);                                                       \
    },                                                                                 \
        [](const RunConfig &c) { return format_double(c.field); }                      \
  }
#define UQOC_INT(field)                                                                \
  Key {                                                                                \
    [](RunConfig &c, const std::string &k, const std::string &v) {                     \
      c.field = to_int32(k, v);                                                        \
    },                                                                                 \
        [](const RunConfig &c) { return std::to_string(c.field); }                     \
  }
#define UQOC_U64(field)                                                                \
  Key {                                                                                \
    [](RunConfig &c, const std::string &k, const std::string &v) {                     \
      c.field = to_u64(k, v);                                                          \
    },                                                                                 \
        [](const RunConfig &c) { return std::to_string(c.field); }                     \
  }
#define UQOC_BOOL(field)                                                               \
  Key {                                                                                \
    [](RunConfig &c, const std::string &k, const std::string &v) {                     \
      c.field = to_bool(k, v);                                                         \
    },                                                                                 \
        [](const RunConfig &c) { return std::string(c.field ? "true" : "false"); }     \
  }

const std::map<std::string, Key> &keys() {
  static const std::map<std::string, Key> table = {
      {"model.kind",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          if (v == "elliptic") {
            c.model = ModelKind::Elliptic;
          } else if (v == "toy") {
            c.model = ModelKind::Toy;
          } else {
            bad_value(k, v, "elliptic or toy");
          }
        },
        [](const RunConfig &c) { return std::string(to_string(c.model)); }}},
      {"mesh.nx", UQOC_INT(problem.nx)},
      {"mesh.ny", UQOC_INT(problem.ny)},
      {"mesh.lx", UQOC_DOUBLE(problem.lx)},
      {"mesh.ly", UQOC_DOUBLE(problem.ly)},
      {"prior.alpha1", UQOC_DOUBLE(problem.alpha1)},
      {"prior.alpha2", UQOC_DOUBLE(problem.alpha2)},
      {"prior.theta11", UQOC_DOUBLE(problem.theta.t11)},
      {"prior.theta12", UQOC_DOUBLE(problem.theta.t12)},
      {"prior.theta22", UQOC_DOUBLE(problem.theta.t22)},
      {"prior.mean", UQOC_DOUBLE(problem.mean)},
      {"wells.injection",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          c.problem.injection = to_points(k, v);
        },
        [](const RunConfig &c) { return points(c.problem.injection); }}},
      {"wells.production",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          c.problem.production = to_points(k, v);
        },
        [](const RunConfig &c) { return points(c.problem.production); }}},
      {"wells.sigma", UQOC_DOUBLE(problem.sigma)},
      {"bc.a", UQOC_DOUBLE(problem.dirichlet.a)},
      {"bc.b", UQOC_DOUBLE(problem.dirichlet.b)},
      {"toy.rank", UQOC_INT(toy.rank)},
      {"toy.controls", UQOC_INT(toy.controls)},
      {"toy.q0", UQOC_DOUBLE(toy.q0)},
      {"toy.decay", UQOC_DOUBLE(toy.decay)},
      {"toy.seed", UQOC_U64(toy.seed)},
      {"cost.beta", UQOC_DOUBLE(cost.beta)},
      {"cost.beta_p", UQOC_DOUBLE(cost.beta_p)},
      {"cost.z_min", UQOC_DOUBLE(problem.z_min)},
      {"cost.z_max", UQOC_DOUBLE(problem.z_max)},
      {"cost.z0", UQOC_DOUBLE(problem.z0)},
      {"method.name",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          const auto m = parse_method(v);
          if (!m) bad_value(k, v, "saa, lin, quad, lin-mc or quad-mc");
          c.cost.method = *m;
        },
        [](const RunConfig &c) { return std::string(to_string(c.cost.method)); }}},
      {"method.chain", UQOC_BOOL(chain)},
      {"method.N", UQOC_INT(cost.n_eigs)},
      {"method.p", UQOC_INT(cost.oversampling)},
      {"method.M", UQOC_INT(cost.samples)},
      {"method.k_ref", UQOC_INT(k_ref)},
      {"method.cluster_tol", UQOC_DOUBLE(cost.cluster_tol)},
      {"optimizer.tol", UQOC_DOUBLE(optimizer.tol)},
      {"optimizer.max_iter", UQOC_INT(optimizer.max_iter)},
      {"optimizer.memory", UQOC_INT(optimizer.memory)},
      {"optimizer.c1", UQOC_DOUBLE(optimizer.c1)},
      {"optimizer.max_halvings", UQOC_INT(optimizer.max_halvings)},
      {"rng.seed", UQOC_U64(seed)},
      {"estimate.samples",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          c.estimate_samples = to_int_list(k, v);
        },
        [](const RunConfig &c) { return int_list(c.estimate_samples); }}},
      {"eigdecay.trace_n",
       {[](RunConfig &c, const std::string &k, const std::string &v) {
          c.trace_n = to_int_list(k, v);
        },
        [](const RunConfig &c) { return int_list(c.trace_n); }}},
      {"field.samples", UQOC_INT(field_samples)},
      {"control.file",
       {[](RunConfig &c, const std::string &, const std::string &v) { c.control_file = v; },
        [](const RunConfig &c) { return c.control_file.string(); }}},
      {"check.decades", UQOC_INT(check_decades)},
      {"check.corrupt_gradient", UQOC_BOOL(corrupt_gradient)},
      {"output.directory",
       {[](RunConfig &c, const std::string &, const std::string &v) { c.output_dir = v; },
        [](const RunConfig &c) { return c.output_dir.string(); }}},
  };
  return table;
}

#undef UQOC_DOUBLE
#undef UQOC_INT
#undef UQOC_U64
#undef UQOC_BOOL

}  // namespace

void set_option(RunConfig &cfg, const std::string &key, const std::string &value) {
  const auto it = keys().find(key);
  if (it == keys().end()) throw ConfigError(fmt::format("unknown key '{}'", key));
  it->second.set(cfg, key, value);
}

std::map<std::string, std::string> RunConfig::resolved() const {
  std::map<std::string, std::string> out;
  for (const auto &[k, key] : keys()) out.emplace(k, key.get(*this));
  return out;
}

std::string RunConfig::resolved_text() const {
  std::string s;
  for (const auto &[k, v] : resolved()) s += fmt::format("{} = {}\n", k, v);
  return s;
}

RunConfig parse_config(const std::string &text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    }
    try {
      set_option(cfg, key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    } catch (const InvalidArgument &e) {
      throw ConfigError(fmt::format("line {}: {}: {}", lineno, key, e.what()));
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError &e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void validate(const RunConfig &cfg) {
  const auto &p = cfg.problem;
  if (p.nx < 2 || p.ny < 2) throw ConfigError("mesh needs nx, ny >= 2");
  if (!(p.lx > 0.0) || !(p.ly > 0.0)) throw ConfigError("mesh lengths must be positive");
  if (!(p.alpha1 > 0.0) || !(p.alpha2 > 0.0)) {
    throw ConfigError("prior.alpha1 and prior.alpha2 must be positive");
  }
  if (!p.theta.is_spd()) throw ConfigError("prior.theta is not symmetric positive definite");
  if (!(p.z_min <= p.z_max)) throw ConfigError("cost.z_min exceeds cost.z_max");
  if (p.z0 < p.z_min || p.z0 > p.z_max) throw ConfigError("cost.z0 is outside the bounds");
  if (cfg.model == ModelKind::Elliptic && p.injection.empty()) {
    throw ConfigError("wells.injection is empty");
  }
  if (cfg.model == ModelKind::Toy) {
    if (cfg.toy.rank < 1 || cfg.toy.controls < 1) {
      throw ConfigError("toy.rank and toy.controls must be positive");
    }
    if (!(cfg.toy.decay > 0.0)) throw ConfigError("toy.decay must be positive");
  }
  try {
    cfg.cost.validate();
  } catch (const InvalidArgument &e) {
    throw ConfigError(e.what());
  }
  if (cfg.k_ref < 1) throw ConfigError("method.k_ref must be positive");
  if (cfg.optimizer.max_iter < 0 || cfg.optimizer.memory < 1 ||
      !(cfg.optimizer.tol > 0.0) || cfg.optimizer.max_halvings < 0) {
    throw ConfigError("invalid optimizer settings");
  }
  for (int m : cfg.estimate_samples) {
    if (m < 2) throw ConfigError("estimate.samples entries must be >= 2");
  }
  if (cfg.estimate_samples.empty()) throw ConfigError("estimate.samples is empty");
  for (int n : cfg.trace_n) {
    if (n < 1) throw ConfigError("eigdecay.trace_n entries must be positive");
  }
  if (cfg.field_samples < 0) throw ConfigError("field.samples must be non-negative");
  if (cfg.check_decades < 1 || cfg.check_decades > 15) {
    throw ConfigError("check.decades must lie in [1, 15]");
  }
}

}  // namespace uqoc::app
