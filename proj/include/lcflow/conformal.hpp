#pragma once

#include "lcflow/omega_jets.hpp"

namespace lcflow::conformal {

/// Per-node context for the metric gamma = omega^2 dOmega^2: derivatives of
/// log(omega) (formed rationally, never by re-expanding the logarithm) and the
/// Christoffel symbols of gamma as jets.
struct FramePoint {
  double sin_t = 0, cos_t = 0;
  Jet2 sj, zj;       // sin(theta), cos(theta) as jets
  Jet2 s2, inv_s2;   // sin^2, 1/sin^2
  Jet2 w, inv_w2;    // omega, omega^-2
  Jet2 ut, up;       // d log(omega)
  Jet2 G0tpp, G0ptp; // round Christoffels: ^t_pp = -sin cos, ^p_tp = cot
  Jet2 Gttt, Gttp, Gtpp, Gptt, Gptp, Gppp;  // Christoffels of gamma
};

FramePoint frame_at(const OmegaJets& J, int i_theta, std::size_t n);

/// Symmetric (0,2) tensor at a node, components as jets.
struct SymJet {
  Jet2 tt, tp, pp;
};

/// nabla_i T_jk at a node; entries valid through first derivatives when T's
/// components carry second-order jets.
struct Tensor3Jet {
  Jet2 ttt, ttp, tpp;  // i = theta
  Jet2 ptt, ptp, ppp;  // i = phi
  const Jet2& at(int i, int j, int k) const;
};

Tensor3Jet cov_grad_sym2_at(const FramePoint& f, const SymJet& T);

/// gamma^{kl} nabla_k nabla_l T at a node (values only).
SymJet rough_laplacian_at(const FramePoint& f, const SymJet& T);

/// Conformal Hessian of a scalar jet: Hess0 f - u_i f_j - u_j f_i + g0_ij <du, df>_0.
SymJet hess_gamma_at(const FramePoint& f, const Jet2& fj);
Jet2 lap0_at(const FramePoint& f, const Jet2& fj);          // round Laplacian
Jet2 lap_gamma_at(const FramePoint& f, const Jet2& fj);     // omega^-2 lap0
Jet2 grad_gamma_sq_at(const FramePoint& f, const Jet2& fj); // |df|^2_gamma

/// Full contractions with gamma^{-1} (values).
double norm_gamma_sq_sym2(const FramePoint& f, const SymJet& T);
double norm_gamma_sq_tensor3(const FramePoint& f, const Tensor3Jet& D);
double norm_gamma_sq_oneform(const FramePoint& f, double ct, double cp);
double dot_gamma_sym2(const FramePoint& f, const SymJet& A, const SymJet& B);

// ---- field-level operations ----

struct ConformalScalarOps {
  ScalarField lap;      // Delta_gamma f
  ScalarField grad_sq;  // |grad f|^2_gamma
  SymTensorField hess;  // Hess_gamma f
};

ConformalScalarOps conformal_scalar_ops(const ConformalFactor& w, const ScalarField& f);

/// Symmetric tensor given by bandlimited coefficient sets per component;
/// derivative data is exact from the coefficients.
struct SymTensorSpectral {
  HarmonicCoeffs tt, tp, pp;
};

SymTensorSpectral analyze_sym2(const SymTensorField& T, int Lmax);

Tensor3Field covariant_grad_sym2(const ConformalFactor& w, const SymTensorSpectral& T);
SymTensorField rough_laplacian_sym2(const ConformalFactor& w, const SymTensorSpectral& T);

ScalarField gamma_norm2(const ConformalFactor& w, const SymTensorField& T);
ScalarField gamma_norm2(const ConformalFactor& w, const Tensor3Field& D);
/// V interpreted as the round gradient of a scalar (one-form with index
/// raised by g0): |V|^2_gamma = omega^-2 (vt^2 + sin^2 vp^2).
ScalarField gamma_norm2(const ConformalFactor& w, const VectorFieldSph& V);

}  // namespace lcflow::conformal
