#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lcflow/field.hpp"
#include "lcflow/flow.hpp"

namespace lcflow::io {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InitialKind { Round, Mobius, Random, File };

struct RunConfig {
  int grid_L = 16;
  double grid_oversample = 2.0;

  InitialKind initial_kind = InitialKind::Round;
  double initial_c = 1.0;
  std::array<double, 3> initial_a{0.0, 0.0, 0.0};
  std::string initial_file;
  double initial_amplitude = 0.05;
  int initial_lmax = 4;

  flow::FlowOptions flow;

  std::vector<std::string> verify_checks{"codazzi", "simons", "gradient_inequality", "variation"};
  double tol_codazzi = 1e-8;
  double tol_simons = 1e-5;
  double tol_gradient_inequality = 1e-8;
  double tol_variation = 1e-5;
  double variation_eps = 1e-3;

  std::string output_directory = "out";
  bool output_csv = true;
  bool deterministic = true;
  std::uint64_t seed = 0;
};

/// Line-oriented "section.key = value" format; '#' starts a comment. Unknown
/// keys and domain violations are errors naming the line / key.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Initial conformal factor per config (round / mobius / random / file).
ConformalFactor build_initial(const RunConfig& cfg, const SphereGrid& g);

}  // namespace lcflow::io
