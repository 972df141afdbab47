#include "lcflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lcflow/output.hpp"
#include "lcflow/steady.hpp"

namespace lcflow::io {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (...) {
    throw ConfigError("config: " + key + ": not a number: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("config: " + key + ": trailing junk in '" + v + "'");
  if (!std::isfinite(x)) throw ConfigError("config: " + key + ": non-finite value");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (...) {
    throw ConfigError("config: " + key + ": not an integer: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("config: " + key + ": trailing junk in '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + ": expected on/off, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config: line " + std::to_string(lineno) + ": empty key or value");

    if (key == "grid.L") {
      cfg.grid_L = static_cast<int>(parse_int(key, val));
    } else if (key == "grid.oversample") {
      cfg.grid_oversample = parse_double(key, val);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
      cfg.flow.seed = cfg.seed;
    } else if (key == "initial.kind") {
      if (val == "round")
        cfg.initial_kind = InitialKind::Round;
      else if (val == "mobius")
        cfg.initial_kind = InitialKind::Mobius;
      else if (val == "random")
        cfg.initial_kind = InitialKind::Random;
      else if (val == "file")
        cfg.initial_kind = InitialKind::File;
      else
        throw ConfigError("config: initial.kind: unknown kind '" + val + "'");
    } else if (key == "initial.c") {
      cfg.initial_c = parse_double(key, val);
    } else if (key == "initial.a") {
      const auto parts = split_list(val);
      if (parts.size() != 3) throw ConfigError("config: initial.a: expected three components");
      for (int k = 0; k < 3; ++k) cfg.initial_a[k] = parse_double(key, parts[k]);
    } else if (key == "initial.file") {
      cfg.initial_file = val;
    } else if (key == "initial.amplitude") {
      cfg.initial_amplitude = parse_double(key, val);
    } else if (key == "initial.lmax") {
      cfg.initial_lmax = static_cast<int>(parse_int(key, val));
    } else if (key == "flow.mode") {
      if (val == "unnormalized")
        cfg.flow.mode = flow::Mode::Unnormalized;
      else if (val == "normalized")
        cfg.flow.mode = flow::Mode::Normalized;
      else
        throw ConfigError("config: flow.mode: unknown mode '" + val + "'");
    } else if (key == "flow.rk_tolerance") {
      cfg.flow.rk_tolerance = parse_double(key, val);
    } else if (key == "flow.dt_initial") {
      cfg.flow.dt_initial = parse_double(key, val);
    } else if (key == "flow.dt_min") {
      cfg.flow.dt_min = parse_double(key, val);
    } else if (key == "flow.dt_max") {
      cfg.flow.dt_max = parse_double(key, val);
    } else if (key == "flow.stop") {
      if (val == "extinction")
        cfg.flow.stop = flow::StopRule::Extinction;
      else if (val == "convergence")
        cfg.flow.stop = flow::StopRule::Convergence;
      else if (val == "t_final")
        cfg.flow.stop = flow::StopRule::TFinal;
      else
        throw ConfigError("config: flow.stop: unknown rule '" + val + "'");
    } else if (key == "flow.eps_ext") {
      cfg.flow.eps_ext = parse_double(key, val);
    } else if (key == "flow.eps_conv") {
      cfg.flow.eps_conv = parse_double(key, val);
    } else if (key == "flow.t_final") {
      cfg.flow.t_final = parse_double(key, val);
    } else if (key == "flow.snapshot_every") {
      cfg.flow.snapshot_every = parse_double(key, val);
    } else if (key == "flow.sigma_list") {
      cfg.flow.sigma_list.clear();
      for (const auto& p : split_list(val)) cfg.flow.sigma_list.push_back(parse_double(key, p));
    } else if (key == "flow.psi_k0") {
      cfg.flow.psi_k0 = parse_double(key, val);
    } else if (key == "verify.checks") {
      cfg.verify_checks = split_list(val);
    } else if (key == "verify.tol_codazzi") {
      cfg.tol_codazzi = parse_double(key, val);
    } else if (key == "verify.tol_simons") {
      cfg.tol_simons = parse_double(key, val);
    } else if (key == "verify.tol_gradient_inequality") {
      cfg.tol_gradient_inequality = parse_double(key, val);
    } else if (key == "verify.tol_variation") {
      cfg.tol_variation = parse_double(key, val);
    } else if (key == "verify.variation_eps") {
      cfg.variation_eps = parse_double(key, val);
    } else if (key == "output.directory") {
      cfg.output_directory = val;
    } else if (key == "output.csv") {
      cfg.output_csv = parse_bool(key, val);
    } else if (key == "output.snapshot_stride") {
      cfg.flow.snapshot_every = parse_double(key, val);
    } else if (key == "output.deterministic") {
      cfg.deterministic = parse_bool(key, val);
      cfg.flow.deterministic = cfg.deterministic;
    } else {
      throw ConfigError("config: line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  // domain validation
  if (cfg.grid_L < 4) throw ConfigError("config: grid.L must be >= 4");
  if (!(cfg.grid_oversample >= 1.0)) throw ConfigError("config: grid.oversample must be >= 1");
  if (!(cfg.initial_c > 0.0)) throw ConfigError("config: initial.c must be positive");
  if (!(cfg.flow.rk_tolerance > 0.0)) throw ConfigError("config: flow.rk_tolerance must be positive");
  if (!(cfg.flow.eps_ext > 0.0) || !(cfg.flow.eps_conv > 0.0))
    throw ConfigError("config: flow stop thresholds must be positive");
  if (!(cfg.flow.dt_min <= cfg.flow.dt_max))
    throw ConfigError("config: flow.dt_min must be <= flow.dt_max");
  for (double s : cfg.flow.sigma_list)
    if (s < 0.0 || s > 1.0) throw ConfigError("config: flow.sigma_list entries must lie in [0,1]");
  if (cfg.initial_kind == InitialKind::File && cfg.initial_file.empty())
    throw ConfigError("config: initial.kind = file requires initial.file");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ConformalFactor build_initial(const RunConfig& cfg, const SphereGrid& g) {
  switch (cfg.initial_kind) {
    case InitialKind::Round: {
      ScalarField w(g);
      for (double& x : w.v) x = cfg.initial_c;
      return ConformalFactor(std::move(w));
    }
    case InitialKind::Mobius:
      return steady::mobius_omega({cfg.initial_c, cfg.initial_a}, g);
    case InitialKind::Random:
      return flow::random_admissible_omega(g, cfg.seed, cfg.initial_c, cfg.initial_amplitude,
                                           cfg.initial_lmax);
    case InitialKind::File: {
      const flow::Snapshot s = read_snapshot(cfg.initial_file, g);
      return ConformalFactor(s.omega);
    }
  }
  throw ConfigError("config: unreachable initial kind");
}

}  // namespace lcflow::io
