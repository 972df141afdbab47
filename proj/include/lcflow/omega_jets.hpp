#pragma once

#include "lcflow/field.hpp"
#include "lcflow/transform.hpp"

namespace lcflow {

/// Exact coordinate derivatives of a conformal factor, synthesized once from
/// its harmonic coefficients. order is the total derivative order held
/// (4 gives second-order jets of second derivatives, enough for rough
/// Laplacians of curvature tensors).
struct OmegaJets {
  const SphereGrid* grid = nullptr;
  int order = 0;
  HarmonicCoeffs coeffs;
  DerivativeSet d;

  /// Jet2 of d^a_theta d^b_phi omega at a node; requires a + b + 2 <= order.
  Jet2 jet(int a, int b, std::size_t n) const { return d.jet(a, b, n); }
  double value(std::size_t n) const { return d.get(0, 0).v[n]; }
};

inline OmegaJets make_omega_jets(const ScalarField& omega, int order, int Lmax = -1) {
  OmegaJets J;
  J.grid = omega.grid;
  J.order = order;
  J.coeffs = analyze(omega, Lmax < 0 ? omega.grid->bandlimit() : Lmax);
  J.d = synth_derivatives(J.coeffs, *omega.grid, order);
  return J;
}

inline OmegaJets make_omega_jets(const ConformalFactor& w, int order, int Lmax = -1) {
  return make_omega_jets(w.omega, order, Lmax);
}

}  // namespace lcflow
