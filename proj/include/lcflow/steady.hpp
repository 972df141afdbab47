#pragma once

#include <array>

#include "lcflow/field.hpp"

namespace lcflow::steady {

/// Parameters of the constant-curvature family
/// omega(x) = c / (sqrt(1+|a|^2) + a.x); a = 0 gives the round sphere of
/// radius c, general a its Lorentz-boosted images.
struct SteadyStateParams {
  double c = 1.0;
  std::array<double, 3> a{0.0, 0.0, 0.0};
};

/// Rapidity/axis form of the boosts; a = sinh(beta) n.
struct BoostSpec {
  double beta = 0.0;
  std::array<double, 3> n{0.0, 0.0, 1.0};
};

ConformalFactor mobius_omega(const SteadyStateParams& p, const SphereGrid& g);

/// Push a cross section along the Lorentz boost that fixes the cone: for each
/// target direction x', the source direction is the inverse boost of the null
/// ray (-1, x'), and omega'(x') = omega(x) mu(x) with Lambda(-1, x) = mu(-1, x').
/// Off-grid sampling of omega is by direct harmonic synthesis.
ConformalFactor boost_cross_section(const ConformalFactor& w, const BoostSpec& b);

struct FitResult {
  SteadyStateParams params;
  double residual = 0.0;  // relative square-norm of the l >= 2 part of 1/omega
};

/// Projects 1/omega onto its l <= 1 part and reconstructs (c, a); exact on the
/// family since 1/omega is affine in x there.
FitResult fit_constant_curvature(const ConformalFactor& w);

}  // namespace lcflow::steady
