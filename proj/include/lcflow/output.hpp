#pragma once

#include <optional>
#include <string>

#include "lcflow/flow.hpp"
#include "lcflow/steady.hpp"
#include "lcflow/verify.hpp"

namespace lcflow::io {

struct RunConfig;  // config.hpp

/// diagnostics.csv: header then one row per record, columns exactly
/// t, vol, h2_min, h2_max, r_min, r_max, a_ring_sq_max, f_sigma_<s>...,
/// grad_h2_sq_max, psi, gauss_residual, diam_lo, diam_hi, grad_ineq_slack.
void write_diagnostics_csv(const flow::TrajectoryLog& traj, const std::string& path);

/// omega_<index>.f64 layout: 32-byte header (magic "LCFLOW01", u32 n_theta,
/// u32 n_phi, f64 t, 8 zero pad bytes) then row-major little-endian doubles.
void write_snapshot(const flow::Snapshot& snap, const std::string& path);
flow::Snapshot read_snapshot(const std::string& path, const SphereGrid& g);

struct SnapshotHeader {
  double t = 0;
  int n_theta = 0, n_phi = 0;
};
SnapshotHeader read_snapshot_header(const std::string& path);

/// report.json with run metadata, residual reports, fit parameters and slopes.
void write_report_json(const std::string& path, const RunConfig& cfg,
                       const flow::TrajectoryLog* traj,
                       const std::vector<verify::ResidualReport>& reports,
                       const std::optional<steady::FitResult>& fit);

/// Full output bundle for a run directory.
void write_outputs(const flow::TrajectoryLog& traj, const RunConfig& cfg,
                   const std::vector<verify::ResidualReport>& reports,
                   const std::optional<steady::FitResult>& fit);

}  // namespace lcflow::io
