#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lcflow/config.hpp"
#include "lcflow/lightcone.hpp"
#include "lcflow/output.hpp"
#include "lcflow/steady.hpp"
#include "lcflow/verify.hpp"

namespace {

using namespace lcflow;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
};

io::RunConfig load_config(const GlobalOpts& g) {
  io::RunConfig cfg = g.config_path.empty() ? io::RunConfig{} : io::parse_config_file(g.config_path);
  if (!g.out_dir.empty()) cfg.output_directory = g.out_dir;
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.flow.seed = *g.seed;
  }
  if (g.deterministic) {
    cfg.deterministic = true;
    cfg.flow.deterministic = true;
  }
  return cfg;
}

std::vector<verify::ResidualReport> run_checks(const io::RunConfig& cfg, const ConformalFactor& w,
                                               const SphereGrid& grid) {
  std::vector<verify::ResidualReport> reports;
  for (const std::string& name : cfg.verify_checks) {
    if (name == "codazzi") {
      reports.push_back(verify::check_codazzi(w, cfg.tol_codazzi));
    } else if (name == "simons") {
      reports.push_back(verify::check_simons(w, cfg.tol_simons));
    } else if (name == "gradient_inequality") {
      reports.push_back(verify::check_gradient_inequality(w, cfg.tol_gradient_inequality));
    } else if (name == "variation") {
      HarmonicCoeffs pc(grid.bandlimit());
      pc(1, 1) = 1.0;
      pc(2, 0) = 0.5;
      const ScalarField phi = synthesize(pc, grid);
      reports.push_back(verify::check_variation(w, phi, cfg.variation_eps, cfg.tol_variation));
    } else {
      throw io::ConfigError("verify.checks: unknown check '" + name + "'");
    }
  }
  return reports;
}

void print_reports(const std::vector<verify::ResidualReport>& reports) {
  for (const auto& r : reports) {
    std::printf("[%s] %-22s residual %.3e  scale %.3e  (L=%d, tol %.1e)\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.max_residual, r.scale, r.grid_L,
                r.tolerance);
    for (const auto& [k, v] : r.extras) std::printf("       %-28s %.6g\n", k.c_str(), v);
  }
}

int cmd_run(const GlobalOpts& g) {
  const io::RunConfig cfg = load_config(g);
  const SphereGrid grid = SphereGrid::build(cfg.grid_L, cfg.grid_oversample);
  const ConformalFactor w0 = io::build_initial(cfg, grid);
  flow::TrajectoryLog traj = flow::run_flow(w0, cfg.flow);
  std::optional<steady::FitResult> fit;
  try {
    fit = steady::fit_constant_curvature(ConformalFactor(traj.snapshots.back().omega));
  } catch (const std::exception&) {
    // far from the family; leave fit empty
  }
  io::write_outputs(traj, cfg, {}, fit);
  const auto& last = traj.records.back();
  std::printf("run: %zu records, stop=%s, t=%.6g, vol=%.9g, max|Aring|^2=%.3e\n",
              traj.records.size(), traj.meta.stop_reason.c_str(), last.t, last.vol,
              last.a_ring_sq_max);
  if (fit)
    std::printf("final fit: c=%.9g a=(%.6g, %.6g, %.6g) residual=%.3e\n", fit->params.c,
                fit->params.a[0], fit->params.a[1], fit->params.a[2], fit->residual);
  std::printf("outputs in %s\n", cfg.output_directory.c_str());
  return 0;
}

int cmd_verify(const GlobalOpts& g) {
  const io::RunConfig cfg = load_config(g);
  const SphereGrid grid = SphereGrid::build(cfg.grid_L, cfg.grid_oversample);
  const ConformalFactor w = io::build_initial(cfg, grid);
  const auto reports = run_checks(cfg, w, grid);
  print_reports(reports);
  std::filesystem::create_directories(cfg.output_directory);
  io::write_report_json((std::filesystem::path(cfg.output_directory) / "report.json").string(),
                        cfg, nullptr, reports, std::nullopt);
  for (const auto& r : reports)
    if (!r.pass) return 1;
  return 0;
}

int cmd_steady(const GlobalOpts& g, double beta, std::vector<double> axis) {
  io::RunConfig cfg = load_config(g);
  const SphereGrid grid = SphereGrid::build(cfg.grid_L, cfg.grid_oversample);
  ConformalFactor w = steady::mobius_omega({cfg.initial_c, cfg.initial_a}, grid);
  if (beta != 0.0) {
    if (axis.size() != 3) throw io::ConfigError("steady: --axis needs three components");
    w = steady::boost_cross_section(w, {beta, {axis[0], axis[1], axis[2]}});
  }
  const steady::FitResult fit = steady::fit_constant_curvature(w);
  std::filesystem::create_directories(cfg.output_directory);
  io::write_snapshot({0.0, w.omega},
                     (std::filesystem::path(cfg.output_directory) / "omega_0000.f64").string());
  io::write_report_json((std::filesystem::path(cfg.output_directory) / "report.json").string(),
                        cfg, nullptr, {}, fit);
  std::printf("steady member written; fit c=%.9g a=(%.6g, %.6g, %.6g) residual=%.3e\n",
              fit.params.c, fit.params.a[0], fit.params.a[1], fit.params.a[2], fit.residual);
  std::printf("gauss residual %.3e\n", cone::gauss_residual(w));
  return 0;
}

int cmd_fit(const GlobalOpts& g, const std::string& snapshot_path) {
  const io::RunConfig cfg = load_config(g);
  const io::SnapshotHeader h = io::read_snapshot_header(snapshot_path);
  // reconstruct a grid matching the snapshot dimensions: the configured one,
  // or the bandlimit implied by the header at the configured oversample
  int L = cfg.grid_L;
  {
    const SphereGrid probe = SphereGrid::build(L, cfg.grid_oversample);
    if (probe.n_theta() != h.n_theta || probe.n_phi() != h.n_phi)
      L = static_cast<int>(std::llround(h.n_theta / cfg.grid_oversample)) - 1;
  }
  const SphereGrid grid = SphereGrid::build(L, cfg.grid_oversample);
  const flow::Snapshot s = io::read_snapshot(snapshot_path, grid);
  const steady::FitResult fit = steady::fit_constant_curvature(ConformalFactor(s.omega));
  std::printf("fit: c=%.12g a=(%.9g, %.9g, %.9g) residual=%.6e\n", fit.params.c, fit.params.a[0],
              fit.params.a[1], fit.params.a[2], fit.residual);
  return 0;
}

int cmd_report(const GlobalOpts& g, const std::string& dir) {
  (void)g;
  namespace fs = std::filesystem;
  const fs::path d(dir);
  const fs::path csv = d / "diagnostics.csv";
  if (!fs::exists(csv)) {
    std::fprintf(stderr, "report: %s not found\n", csv.string().c_str());
    return 1;
  }
  std::ifstream in(csv);
  std::string header, line, last;
  std::getline(in, header);
  std::size_t rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (rows == 0) first = line;
    last = line;
    ++rows;
  }
  std::printf("trajectory %s: %zu records\n", dir.c_str(), rows);
  std::printf("columns: %s\n", header.c_str());
  std::printf("first:   %s\n", first.c_str());
  std::printf("last:    %s\n", last.c_str());
  if (fs::exists(d / "report.json")) {
    std::ifstream rj(d / "report.json");
    std::stringstream ss;
    ss << rj.rdbuf();
    std::printf("report.json:\n%s\n", ss.str().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null mean curvature flow laboratory on the Minkowski lightcone"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "config file (key = value lines)");
  app.add_option("--out", g.out_dir, "output directory override");
  std::uint64_t seed_val = 0;
  auto* seed_opt = app.add_option("--seed", seed_val, "seed override");
  app.add_flag("--deterministic", g.deterministic, "fixed reduction orders / reproducible bytes");

  auto* run = app.add_subcommand("run", "integrate the flow and write diagnostics");
  auto* ver = app.add_subcommand("verify", "run the residual suite on the configured omega");
  auto* steady_cmd = app.add_subcommand("steady", "generate / boost a constant-curvature member");
  // global flags may follow the subcommand name
  for (CLI::App* s : {run, ver, steady_cmd}) s->fallthrough();
  double beta = 0.0;
  std::vector<double> axis{0.0, 0.0, 1.0};
  steady_cmd->add_option("--beta", beta, "boost rapidity");
  steady_cmd->add_option("--axis", axis, "boost axis (three components)")->expected(3);
  auto* fit = app.add_subcommand("fit", "fit a snapshot to the constant-curvature family");
  std::string fit_in;
  fit->add_option("--in", fit_in, "snapshot file (.f64)")->required();
  auto* rep = app.add_subcommand("report", "summarize a trajectory directory");
  std::string rep_dir = "out";
  rep->add_option("--dir", rep_dir, "trajectory directory");
  fit->fallthrough();
  rep->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed_val;

  try {
    if (run->parsed()) return cmd_run(g);
    if (ver->parsed()) return cmd_verify(g);
    if (steady_cmd->parsed()) return cmd_steady(g, beta, axis);
    if (fit->parsed()) return cmd_fit(g, fit_in);
    if (rep->parsed()) return cmd_report(g, rep_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
