#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lcflow/field.hpp"
#include "lcflow/flow.hpp"

namespace lcflow::verify {

using lcflow::flow::TrajectoryLog;

struct ResidualReport {
  std::string name;
  double max_residual = 0.0;
  double scale = 0.0;   // norm of the dominant term, for relative reporting
  int grid_L = 0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> extras;  // slopes, orders, ...
};

/// Total symmetry of nabla A and the Codazzi equation for chi with zeta terms;
/// reports the larger of the two residuals in pointwise gamma-norm.
ResidualReport check_codazzi(const ConformalFactor& w, double tol = 1e-8);

/// Null Simons identity: Delta A - Hess_gamma H^2 - (H^2/2) Aring, gamma-norm
/// relative to |Delta A| + |Hess H^2|.
ResidualReport check_simons(const ConformalFactor& w, double tol = 1e-5);

/// min over nodes of |nabla A|^2 - (3/4)|nabla H^2|^2 >= -tol.
ResidualReport check_gradient_inequality(const ConformalFactor& w, double tol = 1e-8);

struct VariationResiduals {
  double d_gamma = 0, d_thb = 0, d_theta = 0, d_A = 0, d_H2 = 0;  // absolute
  double scale_gamma = 0, scale_thb = 0, scale_theta = 0, scale_A = 0, scale_H2 = 0;
  double max_relative() const;
};

/// Central finite differences in eps of (gamma, thb, theta, A, H2) under
/// omega -> omega + eps phi, against the analytic first variations.
VariationResiduals variation_residuals(const ConformalFactor& w, const ScalarField& phi,
                                       double eps);

/// Runs variation_residuals at eps and eps/2, requires relative residuals
/// below tol and measured convergence order >= 1.9 (identities at the
/// round-off floor are exempt from the order measurement).
ResidualReport check_variation(const ConformalFactor& w, const ScalarField& phi, double eps,
                               double tol = 1e-5);

/// Centered time differences of the H^2 and |A|^2 fields across uniform-stride
/// snapshots against their evolution equations, plus the monotonicity audit of
/// max |A|^2/(H^2)^2 from the records.
ResidualReport check_evolution(const TrajectoryLog& traj, double tol = 1e-5);

/// Normalized-mode trajectory: (a) max f_sigma bounded by its initial value,
/// (b) negative fitted slopes of log max|Aring|^2, log max|grad H2|^2,
/// log(H2_max - H2_min) and log spectral norms of H2 (orders k = 2,3) over the
/// final two-thirds of the run.
ResidualReport check_monotonicity_decay(const TrajectoryLog& traj, double min_r2 = 0.99);

/// Gradient estimate: C(eta, t) = max(|grad R| - eta^2 R^{3/2}) stays bounded
/// by 2x its maximum over the first quarter of the time interval, for
/// eta in {0.5, 0.25}. Uses snapshots.
ResidualReport check_gradient_estimate(const TrajectoryLog& traj);

/// min over snapshots and nodes of G_eps = 2 C_eps + eps (H^2)^2 - |Aring|^2,
/// with C_eps fixed from the initial snapshot. Positive along admissible runs.
double g_epsilon_min(const TrajectoryLog& traj, double eps = 0.125);

}  // namespace lcflow::verify
