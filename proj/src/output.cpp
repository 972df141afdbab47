#include "lcflow/output.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "lcflow/config.hpp"

namespace lcflow::io {

namespace {

std::string fmt_full(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_sigma(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

constexpr char kMagic[8] = {'L', 'C', 'F', 'L', 'O', 'W', '0', '1'};

}  // namespace

void write_diagnostics_csv(const flow::TrajectoryLog& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,vol,h2_min,h2_max,r_min,r_max,a_ring_sq_max";
  for (double s : traj.meta.opts.sigma_list) out << ",f_sigma_" << fmt_sigma(s);
  out << ",grad_h2_sq_max,psi,gauss_residual,diam_lo,diam_hi,grad_ineq_slack\n";
  for (const auto& r : traj.records) {
    out << fmt_full(r.t) << ',' << fmt_full(r.vol) << ',' << fmt_full(r.h2_min) << ','
        << fmt_full(r.h2_max) << ',' << fmt_full(r.r_min) << ',' << fmt_full(r.r_max) << ','
        << fmt_full(r.a_ring_sq_max);
    for (double f : r.f_sigma_max) out << ',' << fmt_full(f);
    out << ',' << fmt_full(r.grad_h2_sq_max) << ',' << fmt_full(r.psi_max) << ','
        << fmt_full(r.gauss_residual) << ',' << fmt_full(r.diam_lo) << ',' << fmt_full(r.diam_hi)
        << ',' << fmt_full(r.grad_ineq_slack_min) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failure on " + path);
}

void write_snapshot(const flow::Snapshot& snap, const std::string& path) {
  const SphereGrid& g = *snap.omega.grid;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char header[32] = {};
  std::memcpy(header, kMagic, 8);
  const std::uint32_t nt = static_cast<std::uint32_t>(g.n_theta());
  const std::uint32_t np = static_cast<std::uint32_t>(g.n_phi());
  std::memcpy(header + 8, &nt, 4);
  std::memcpy(header + 12, &np, 4);
  std::memcpy(header + 16, &snap.t, 8);
  out.write(header, 32);
  out.write(reinterpret_cast<const char*>(snap.omega.v.data()),
            static_cast<std::streamsize>(snap.omega.v.size() * sizeof(double)));
  out.flush();
  if (!out) throw std::runtime_error("write failure on " + path);
}

SnapshotHeader read_snapshot_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);
  char header[32];
  in.read(header, 32);
  if (!in || std::memcmp(header, kMagic, 8) != 0)
    throw std::runtime_error("bad snapshot header in " + path);
  SnapshotHeader h;
  std::uint32_t nt = 0, np = 0;
  std::memcpy(&nt, header + 8, 4);
  std::memcpy(&np, header + 12, 4);
  std::memcpy(&h.t, header + 16, 8);
  h.n_theta = static_cast<int>(nt);
  h.n_phi = static_cast<int>(np);
  return h;
}

flow::Snapshot read_snapshot(const std::string& path, const SphereGrid& g) {
  const SnapshotHeader h = read_snapshot_header(path);
  if (h.n_theta != g.n_theta() || h.n_phi != g.n_phi())
    throw std::runtime_error("snapshot grid mismatch in " + path);
  const std::uintmax_t expect = 32 + sizeof(double) * g.n_nodes();
  if (std::filesystem::file_size(path) != expect)
    throw std::runtime_error("snapshot truncated or oversized: " + path);
  std::ifstream in(path, std::ios::binary);
  in.seekg(32);
  flow::Snapshot s{h.t, ScalarField(g)};
  in.read(reinterpret_cast<char*>(s.omega.v.data()),
          static_cast<std::streamsize>(s.omega.v.size() * sizeof(double)));
  if (!in) throw std::runtime_error("snapshot read failure: " + path);
  return s;
}

namespace {

nlohmann::json report_of(const verify::ResidualReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["max_residual"] = r.max_residual;
  j["scale"] = r.scale;
  j["grid_L"] = r.grid_L;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  for (const auto& [k, v] : r.extras) j["extras"][k] = v;
  return j;
}

}  // namespace

void write_report_json(const std::string& path, const RunConfig& cfg,
                       const flow::TrajectoryLog* traj,
                       const std::vector<verify::ResidualReport>& reports,
                       const std::optional<steady::FitResult>& fit) {
  nlohmann::json j;
  j["grid"]["L"] = cfg.grid_L;
  j["grid"]["oversample"] = cfg.grid_oversample;
  j["seed"] = cfg.seed;
  j["deterministic"] = cfg.deterministic;
  if (traj) {
    j["run"]["records"] = traj->records.size();
    j["run"]["snapshots"] = traj->snapshots.size();
    j["run"]["stop_reason"] = traj->meta.stop_reason;
    if (!traj->records.empty()) {
      const auto& last = traj->records.back();
      j["run"]["t_final"] = last.t;
      j["run"]["vol_final"] = last.vol;
      j["run"]["a_ring_sq_max_final"] = last.a_ring_sq_max;
      j["run"]["h2_ratio_final"] =
          last.h2_min > 0 ? last.h2_max / last.h2_min : std::numeric_limits<double>::quiet_NaN();
    }
  }
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(report_of(r));
  if (fit) {
    j["fit"]["c"] = fit->params.c;
    j["fit"]["a"] = {fit->params.a[0], fit->params.a[1], fit->params.a[2]};
    j["fit"]["residual"] = fit->residual;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failure on " + path);
}

void write_outputs(const flow::TrajectoryLog& traj, const RunConfig& cfg,
                   const std::vector<verify::ResidualReport>& reports,
                   const std::optional<steady::FitResult>& fit) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_directory);
  const fs::path dir(cfg.output_directory);
  if (cfg.output_csv) write_diagnostics_csv(traj, (dir / "diagnostics.csv").string());
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "omega_%04zu.f64", k);
    write_snapshot(traj.snapshots[k], (dir / name).string());
  }
  write_report_json((dir / "report.json").string(), cfg, &traj, reports, fit);
}

}  // namespace lcflow::io
