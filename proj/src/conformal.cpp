#include "lcflow/conformal.hpp"

#include <stdexcept>

#include "lcflow/parallel.hpp"

namespace lcflow::conformal {

FramePoint frame_at(const OmegaJets& J, int i_theta, std::size_t n) {
  const SphereGrid& g = *J.grid;
  FramePoint f;
  f.sin_t = g.sin_theta(i_theta);
  f.cos_t = g.z(i_theta);
  // jets of the node functions sin(theta), cos(theta)
  f.sj = Jet2(f.sin_t, f.cos_t, 0.0, -f.sin_t, 0.0, 0.0);
  f.zj = Jet2(f.cos_t, -f.sin_t, 0.0, -f.cos_t, 0.0, 0.0);
  f.s2 = f.sj * f.sj;
  f.inv_s2 = f.s2.inv();
  f.w = J.jet(0, 0, n);
  const Jet2 wt = J.jet(1, 0, n), wp = J.jet(0, 1, n);
  f.inv_w2 = (f.w * f.w).inv();
  f.ut = wt / f.w;
  f.up = wp / f.w;
  f.G0tpp = -(f.sj * f.zj);
  f.G0ptp = f.zj / f.sj;
  // conformal rule: Gamma^k_ij = Gamma0^k_ij + d^k_i u_j + d^k_j u_i - g0_ij g0^kl u_l
  f.Gttt = f.ut;
  f.Gttp = f.up;
  f.Gtpp = f.G0tpp - f.s2 * f.ut;
  f.Gptt = -(f.up * f.inv_s2);
  f.Gptp = f.G0ptp + f.ut;
  f.Gppp = f.up;
  return f;
}

const Jet2& Tensor3Jet::at(int i, int j, int k) const {
  if (j > k) std::swap(j, k);  // symmetric slots
  if (i == 0) return j == 0 ? (k == 0 ? ttt : ttp) : tpp;
  return j == 0 ? (k == 0 ? ptt : ptp) : ppp;
}

Tensor3Jet cov_grad_sym2_at(const FramePoint& f, const SymJet& T) {
  Tensor3Jet D;
  D.ttt = d_theta(T.tt) - 2.0 * (f.Gttt * T.tt + f.Gptt * T.tp);
  D.ttp = d_theta(T.tp) - (f.Gttt * T.tp + f.Gptt * T.pp) - (f.Gttp * T.tt + f.Gptp * T.tp);
  D.tpp = d_theta(T.pp) - 2.0 * (f.Gttp * T.tp + f.Gptp * T.pp);
  D.ptt = d_phi(T.tt) - 2.0 * (f.Gttp * T.tt + f.Gptp * T.tp);
  D.ptp = d_phi(T.tp) - (f.Gttp * T.tp + f.Gptp * T.pp) - (f.Gtpp * T.tt + f.Gppp * T.tp);
  D.ppp = d_phi(T.pp) - 2.0 * (f.Gtpp * T.tp + f.Gppp * T.pp);
  return D;
}

namespace {
// second covariant derivative contracted with gamma^{kl}; D entries carry jet1
double second_contract(const FramePoint& f, const Tensor3Jet& D, int ja, int jb) {
  // k = l = theta
  const Jet2& Dt = D.at(0, ja, jb);
  const Jet2& Dp = D.at(1, ja, jb);
  double t1 = Dt.t;
  t1 -= f.Gttt.v * Dt.v + f.Gptt.v * Dp.v;  // -Gamma^m_tt D_m,jajb
  // -Gamma^m_{t ja} D_{t, m jb} and -Gamma^m_{t jb} D_{t, ja m}
  auto Gm = [&](int lo1, int lo2, int up) -> double {
    // Christoffel Gamma^{up}_{lo1 lo2}
    if (up == 0) {  // ^theta
      if (lo1 == 0 && lo2 == 0) return f.Gttt.v;
      if (lo1 != lo2) return f.Gttp.v;
      return f.Gtpp.v;
    }
    if (lo1 == 0 && lo2 == 0) return f.Gptt.v;
    if (lo1 != lo2) return f.Gptp.v;
    return f.Gppp.v;
  };
  t1 -= Gm(0, ja, 0) * D.at(0, 0, jb).v + Gm(0, ja, 1) * D.at(0, 1, jb).v;
  t1 -= Gm(0, jb, 0) * D.at(0, ja, 0).v + Gm(0, jb, 1) * D.at(0, ja, 1).v;
  // k = l = phi
  double t2 = Dp.p;
  t2 -= f.Gtpp.v * Dt.v + f.Gppp.v * Dp.v;
  t2 -= Gm(1, ja, 0) * D.at(1, 0, jb).v + Gm(1, ja, 1) * D.at(1, 1, jb).v;
  t2 -= Gm(1, jb, 0) * D.at(1, ja, 0).v + Gm(1, jb, 1) * D.at(1, ja, 1).v;
  return (t1 + t2 * f.inv_s2.v) * f.inv_w2.v;
}
}  // namespace

SymJet rough_laplacian_at(const FramePoint& f, const SymJet& T) {
  const Tensor3Jet D = cov_grad_sym2_at(f, T);
  SymJet out;
  out.tt = Jet2(second_contract(f, D, 0, 0));
  out.tp = Jet2(second_contract(f, D, 0, 1));
  out.pp = Jet2(second_contract(f, D, 1, 1));
  return out;
}

SymJet hess_gamma_at(const FramePoint& f, const Jet2& fj) {
  // Value-level components. Callers that differentiate a Hessian assemble it
  // from higher-order jets instead (see lightcone geometry).
  const double dot0 = f.ut.v * fj.t + f.up.v * fj.p * f.inv_s2.v;
  SymJet H;
  H.tt = Jet2(fj.tt - 2.0 * f.ut.v * fj.t + dot0);
  H.tp = Jet2(fj.tp - f.G0ptp.v * fj.p - (f.ut.v * fj.p + f.up.v * fj.t));
  H.pp = Jet2(fj.pp - f.G0tpp.v * fj.t - 2.0 * f.up.v * fj.p + f.s2.v * dot0);
  return H;
}

Jet2 lap0_at(const FramePoint& f, const Jet2& fj) {
  return Jet2(fj.tt) + f.G0ptp * Jet2(fj.t) + f.inv_s2 * Jet2(fj.pp);
}

Jet2 lap_gamma_at(const FramePoint& f, const Jet2& fj) { return lap0_at(f, fj) * f.inv_w2; }

Jet2 grad_gamma_sq_at(const FramePoint& f, const Jet2& fj) {
  return (d_theta(fj) * d_theta(fj) + d_phi(fj) * d_phi(fj) * f.inv_s2) * f.inv_w2;
}

double norm_gamma_sq_sym2(const FramePoint& f, const SymJet& T) {
  const double is2 = f.inv_s2.v;
  const double n0 = T.tt.v * T.tt.v + 2.0 * T.tp.v * T.tp.v * is2 + T.pp.v * T.pp.v * is2 * is2;
  return n0 * f.inv_w2.v * f.inv_w2.v;
}

double norm_gamma_sq_tensor3(const FramePoint& f, const Tensor3Jet& D) {
  const double is2 = f.inv_s2.v;
  double tot = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double wi = (i == 0) ? 1.0 : is2;
    for (int j = 0; j < 2; ++j) {
      const double wj = (j == 0) ? 1.0 : is2;
      for (int k = 0; k < 2; ++k) {
        const double wk = (k == 0) ? 1.0 : is2;
        const double x = D.at(i, j, k).v;
        tot += wi * wj * wk * x * x;
      }
    }
  }
  const double iw2 = f.inv_w2.v;
  return tot * iw2 * iw2 * iw2;
}

double norm_gamma_sq_oneform(const FramePoint& f, double ct, double cp) {
  return (ct * ct + cp * cp * f.inv_s2.v) * f.inv_w2.v;
}

double dot_gamma_sym2(const FramePoint& f, const SymJet& A, const SymJet& B) {
  const double is2 = f.inv_s2.v;
  const double n0 = A.tt.v * B.tt.v + 2.0 * A.tp.v * B.tp.v * is2 + A.pp.v * B.pp.v * is2 * is2;
  return n0 * f.inv_w2.v * f.inv_w2.v;
}

// ---- field-level operations ----

ConformalScalarOps conformal_scalar_ops(const ConformalFactor& w, const ScalarField& f) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 2);
  const DerivativeSet df = synth_derivatives(analyze(f, g.bandlimit()), g, 2);
  ConformalScalarOps out{ScalarField(g), ScalarField(g), SymTensorField(g, MetricTag::Conformal)};
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const FramePoint fr = frame_at(J, i, n);
      const Jet2 fj = df.jet(0, 0, n);
      out.lap.v[n] = lap_gamma_at(fr, fj).v;
      out.grad_sq.v[n] = grad_gamma_sq_at(fr, fj).v;
      const SymJet H = hess_gamma_at(fr, fj);
      out.hess.tt.v[n] = H.tt.v;
      out.hess.tp.v[n] = H.tp.v;
      out.hess.pp.v[n] = H.pp.v;
    }
  });
  return out;
}

SymTensorSpectral analyze_sym2(const SymTensorField& T, int Lmax) {
  return {analyze(T.tt, Lmax), analyze(T.tp, Lmax), analyze(T.pp, Lmax)};
}

namespace {
SymJet tensor_jet(const DerivativeSet& tt, const DerivativeSet& tp, const DerivativeSet& pp,
                  std::size_t n) {
  return {tt.jet(0, 0, n), tp.jet(0, 0, n), pp.jet(0, 0, n)};
}
}  // namespace

Tensor3Field covariant_grad_sym2(const ConformalFactor& w, const SymTensorSpectral& T) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 2);
  const DerivativeSet dtt = synth_derivatives(T.tt, g, 2);
  const DerivativeSet dtp = synth_derivatives(T.tp, g, 2);
  const DerivativeSet dpp = synth_derivatives(T.pp, g, 2);
  Tensor3Field out(g);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const FramePoint fr = frame_at(J, i, n);
      const Tensor3Jet D = cov_grad_sym2_at(fr, tensor_jet(dtt, dtp, dpp, n));
      out.ttt.v[n] = D.ttt.v;
      out.ttp.v[n] = D.ttp.v;
      out.tpp.v[n] = D.tpp.v;
      out.ptt.v[n] = D.ptt.v;
      out.ptp.v[n] = D.ptp.v;
      out.ppp.v[n] = D.ppp.v;
    }
  });
  return out;
}

SymTensorField rough_laplacian_sym2(const ConformalFactor& w, const SymTensorSpectral& T) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 3);  // Christoffel jets need one extra order
  const DerivativeSet dtt = synth_derivatives(T.tt, g, 2);
  const DerivativeSet dtp = synth_derivatives(T.tp, g, 2);
  const DerivativeSet dpp = synth_derivatives(T.pp, g, 2);
  SymTensorField out(g, MetricTag::Conformal);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const FramePoint fr = frame_at(J, i, n);
      const SymJet L = rough_laplacian_at(fr, tensor_jet(dtt, dtp, dpp, n));
      out.tt.v[n] = L.tt.v;
      out.tp.v[n] = L.tp.v;
      out.pp.v[n] = L.pp.v;
    }
  });
  return out;
}

ScalarField gamma_norm2(const ConformalFactor& w, const SymTensorField& T) {
  const SphereGrid& g = *w.omega.grid;
  ScalarField out(g);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const double iw2 = 1.0 / (w.omega.v[n] * w.omega.v[n]);
      const double n0 = T.tt.v[n] * T.tt.v[n] + 2.0 * T.tp.v[n] * T.tp.v[n] / s2 +
                        T.pp.v[n] * T.pp.v[n] / (s2 * s2);
      out.v[n] = n0 * iw2 * iw2;
    }
  });
  return out;
}

ScalarField gamma_norm2(const ConformalFactor& w, const Tensor3Field& D) {
  const SphereGrid& g = *w.omega.grid;
  ScalarField out(g);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double is2 = 1.0 / (g.sin_theta(i) * g.sin_theta(i));
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const double iw2 = 1.0 / (w.omega.v[n] * w.omega.v[n]);
      const double c[2][3] = {{D.ttt.v[n], D.ttp.v[n], D.tpp.v[n]},
                              {D.ptt.v[n], D.ptp.v[n], D.ppp.v[n]}};
      double tot = 0.0;
      for (int a = 0; a < 2; ++a) {
        const double wa = (a == 0) ? 1.0 : is2;
        tot += wa * (c[a][0] * c[a][0] + 2.0 * c[a][1] * c[a][1] * is2 +
                     c[a][2] * c[a][2] * is2 * is2);
      }
      out.v[n] = tot * iw2 * iw2 * iw2;
    }
  });
  return out;
}

ScalarField gamma_norm2(const ConformalFactor& w, const VectorFieldSph& V) {
  const SphereGrid& g = *w.omega.grid;
  ScalarField out(g);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      out.v[n] =
          (V.vt.v[n] * V.vt.v[n] + s2 * V.vp.v[n] * V.vp.v[n]) / (w.omega.v[n] * w.omega.v[n]);
    }
  });
  return out;
}

}  // namespace lcflow::conformal
