#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcflow/field.hpp"

namespace lcflow::flow {

enum class Mode { Unnormalized, Normalized };
enum class StopRule { Extinction, Convergence, TFinal };

struct FlowOptions {
  Mode mode = Mode::Unnormalized;
  double rk_tolerance = 1e-10;
  double dt_initial = 1e-3;
  double dt_min = 1e-13;
  double dt_max = 0.1;
  StopRule stop = StopRule::Extinction;
  double eps_ext = 1e-3;   // extinction: min omega threshold
  double eps_conv = 1e-9;  // convergence: max |Aring|^2 threshold
  double t_final = 1.0;
  double snapshot_every = 0.0;  // 0: first and last state only
  std::vector<double> sigma_list{0.0, 0.5, 1.0};
  double psi_k0 = 1.0;
  std::uint64_t seed = 0;
  bool deterministic = true;
};

struct FlowState {
  double t = 0.0;
  ScalarField omega;
};

struct DiagnosticsRecord {
  double t = 0, vol = 0;
  double h2_min = 0, h2_max = 0, r_min = 0, r_max = 0;
  double a_ring_sq_max = 0;
  std::vector<double> f_sigma_max;  // per sigma_list entry; NaN when flagged
  bool h2_nonpositive = false;      // f_sigma undefined at some node
  double grad_h2_sq_max = 0;
  double psi_max = 0;  // |grad H2|^2/H2 + K0 |Aring|^2
  double gauss_residual = 0;
  double diam_lo = 0, diam_hi = 0;  // [pi min omega, pi max omega]
  double grad_ineq_slack_min = 0;   // min |grad A|^2 - (3/4)|grad H2|^2
  double dt = 0;                    // size of the accepted step ending at t
};

struct Snapshot {
  double t = 0.0;
  ScalarField omega;
};

struct RunMetadata {
  int L = 0;
  double oversample = 2.0;
  FlowOptions opts;
  std::string stop_reason;
};

struct TrajectoryLog {
  std::vector<DiagnosticsRecord> records;
  std::vector<Snapshot> snapshots;
  RunMetadata meta;
};

struct StiffFailure : std::runtime_error {
  FlowState state;
  StiffFailure(std::string msg, FlowState s)
      : std::runtime_error(std::move(msg)), state(std::move(s)) {}
};

/// d omega/dt. Unnormalized: -theta/2; normalized: (r - R) omega / 2 with
/// r = 8 pi / Vol. The two unnormalized routes (-theta/2 and -omega K) are
/// evaluated together and must agree to 1e-8 relative (internal assertion).
ScalarField rhs(const ConformalFactor& w, Mode mode);

/// max |(-theta/2) - (-omega K)| over nodes, for tests of the dual route.
double rhs_dual_route_residual(const ConformalFactor& w);

struct StepResult {
  FlowState state;
  double dt_taken = 0;
  double dt_next = 0;
  int rejected = 0;
};

/// One accepted embedded Dormand-Prince 5(4) step with error-per-step
/// control at opts.rk_tolerance; dt clamped to [dt_min, dt_max]; a step that
/// would push min omega below eps_ext/2 is rejected and halved.
StepResult step_adaptive(const FlowState& s, const FlowOptions& opts, double dt);

/// Fixed-step Dormand-Prince step (no error control); for convergence-order
/// measurements.
FlowState step_fixed(const FlowState& s, Mode mode, double dt);

TrajectoryLog run_flow(const ConformalFactor& w0, const FlowOptions& opts);

/// Rescales an unnormalized trajectory to the volume-normalized one:
/// c(t) = exp(int_0^t r dtau), t~ = int_0^t c dtau (trapezoid over records),
/// omega~ = sqrt(c) omega. Record diagnostics transform by their scaling
/// degrees; snapshots are rescaled fields.
TrajectoryLog renormalize_trajectory(const TrajectoryLog& traj);

DiagnosticsRecord diagnostics(const ConformalFactor& w, const std::vector<double>& sigma_list,
                              double psi_k0 = 1.0);

/// Seeded random conformal factor c0 (1 + sum_{2<=l<=l_max} eps_lm Y_lm),
/// resampled until R > 0 and omega > 0 everywhere.
ConformalFactor random_admissible_omega(const SphereGrid& g, std::uint64_t seed, double c0 = 1.0,
                                        double amplitude = 0.05, int l_max = 4);

}  // namespace lcflow::flow
