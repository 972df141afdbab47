#pragma once

#include <array>

#include "lcflow/conformal.hpp"

namespace lcflow::cone {

/// All extrinsic/intrinsic quantities of the cross section Sigma_omega at one
/// node, as jets: gamma, the null second fundamental forms, expansions,
/// A = thb * chi, its trace-free part, H^2 = thb * th, Gauss curvature.
/// Requires omega jets of order 4 for second-derivative slots of A, chi, H2.
struct GeomPoint {
  conformal::FramePoint fr;
  Jet2 gtt, gtp, gpp;                      // gamma = omega^2 dOmega^2
  Jet2 thb, th;                            // null expansions
  Jet2 chib_tt, chib_tp, chib_pp;          // chib = gamma / omega
  Jet2 chi_tt, chi_tp, chi_pp;             // chi per the graph formula
  Jet2 A_tt, A_tp, A_pp;                   // A = thb * chi
  Jet2 Ar_tt, Ar_tp, Ar_pp;                // A - (H^2/2) gamma
  Jet2 H2, K, R;                           // H2 = thb*th, K = th/(2 omega), R = 2K
  Jet2 zeta_t, zeta_p;                     // covariant: zeta_i = -d_i omega / omega
  Jet2 grad_w_sq_g;                        // |d omega|^2_gamma
  Jet2 lap0_logw;                          // round Laplacian of log omega (rational)

  conformal::SymJet chi() const { return {chi_tt, chi_tp, chi_pp}; }
  conformal::SymJet chib() const { return {chib_tt, chib_tp, chib_pp}; }
  conformal::SymJet A() const { return {A_tt, A_tp, A_pp}; }
  conformal::SymJet Aring() const { return {Ar_tt, Ar_tp, Ar_pp}; }
  conformal::SymJet gamma() const { return {gtt, gtp, gpp}; }
};

GeomPoint geometry_at(const OmegaJets& J, int i_theta, std::size_t n);

/// Field-level bundle of the cross-section quantities.
struct LightconeQuantities {
  ScalarField thb, th;
  SymTensorField chib, chi, A, Aring;
  CovectorFieldSph zeta;
  ScalarField H2, R, K;
  double vol = 0.0;
};

LightconeQuantities lightcone_quantities(const ConformalFactor& w);

/// max over nodes of |R_intrinsic - H^2/2| with
/// R_intrinsic = 2(1 - lap0 log omega)/omega^2 computed without any extrinsic
/// quantity (the twice-contracted Gauss equation residual).
double gauss_residual(const ConformalFactor& w);

/// Minkowski four-vectors (t, x, y, z), signature (-+++).
using FourVec = std::array<double, 4>;

inline double eta_dot(const FourVec& a, const FourVec& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// Per-node embedding data of the cross section in R^{3,1}: events on the
/// past cone (t = -omega, spatial = omega x), coordinate tangents, and the
/// null frame {Lb, L} with eta(Lb, L) = 2, Lb = 2 d_u, Lb(r) = 1.
struct AmbientPoints {
  const SphereGrid* grid = nullptr;
  std::vector<FourVec> X, Vt, Vp;  // event and tangents
  std::vector<FourVec> Lb, L;      // null frame
  double min_gram_det = 0.0;       // conditioning of the per-node solve
};

AmbientPoints embed(const ConformalFactor& w);

/// Fills Lb and L. Lb = (-1, x) exactly; L is solved per node from
/// eta(L,Vt) = eta(L,Vp) = 0, eta(Lb,L) = 2, eta(L,L) = 0.
void null_frame(AmbientPoints& pts);

/// Independent finite-difference oracle for chi: second coordinate
/// derivatives of the embedding (step h) paired against L,
/// chi_ij = -eta(d_i d_j X, L). Uses spectral point evaluation of omega only.
SymTensorField extrinsic_oracle_chi(const ConformalFactor& w, double h);

}  // namespace lcflow::cone
