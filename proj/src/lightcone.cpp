#include "lcflow/lightcone.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lcflow/parallel.hpp"

namespace lcflow::cone {

GeomPoint geometry_at(const OmegaJets& J, int i_theta, std::size_t n) {
  GeomPoint q;
  q.fr = conformal::frame_at(J, i_theta, n);
  const conformal::FramePoint& f = q.fr;
  const Jet2 w = f.w;
  const Jet2 wt = J.jet(1, 0, n), wp = J.jet(0, 1, n);
  const Jet2 wtt = J.jet(2, 0, n), wtp = J.jet(1, 1, n), wpp = J.jet(0, 2, n);

  q.gtt = w * w;
  q.gtp = Jet2(0.0);
  q.gpp = w * w * f.s2;

  const Jet2 inv_w = w.inv();
  q.thb = 2.0 * inv_w;
  q.chib_tt = inv_w * q.gtt;
  q.chib_tp = Jet2(0.0);
  q.chib_pp = inv_w * q.gpp;

  // round Hessian of omega (full jets from order-4 data)
  const Jet2 H0tt = wtt;
  const Jet2 H0tp = wtp - f.G0ptp * wp;
  const Jet2 H0pp = wpp - f.G0tpp * wt;
  // conformal correction with u = log omega
  const Jet2 dot0 = f.ut * wt + f.up * wp * f.inv_s2;
  const Jet2 Htt = H0tt - 2.0 * (f.ut * wt) + dot0;
  const Jet2 Htp = H0tp - (f.ut * wp + f.up * wt);
  const Jet2 Hpp = H0pp - 2.0 * (f.up * wp) + f.s2 * dot0;

  const Jet2 lap0_w = wtt + f.G0ptp * wt + wpp * f.inv_s2;
  q.grad_w_sq_g = (wt * wt + wp * wp * f.inv_s2) * f.inv_w2;
  const Jet2 lapg_w = lap0_w * f.inv_w2;

  q.th = 2.0 * (inv_w + q.grad_w_sq_g * inv_w - lapg_w);
  const Jet2 pref = (1.0 + q.grad_w_sq_g) * inv_w;
  q.chi_tt = pref * q.gtt - 2.0 * Htt;
  q.chi_tp = pref * q.gtp - 2.0 * Htp;
  q.chi_pp = pref * q.gpp - 2.0 * Hpp;

  q.A_tt = q.thb * q.chi_tt;
  q.A_tp = q.thb * q.chi_tp;
  q.A_pp = q.thb * q.chi_pp;
  q.H2 = q.thb * q.th;
  q.Ar_tt = q.A_tt - 0.5 * q.H2 * q.gtt;
  q.Ar_tp = q.A_tp - 0.5 * q.H2 * q.gtp;
  q.Ar_pp = q.A_pp - 0.5 * q.H2 * q.gpp;

  q.K = q.th * inv_w * 0.5;
  q.R = 2.0 * q.K;
  q.zeta_t = -f.ut;
  q.zeta_p = -f.up;
  // lap0 log(omega) assembled from jets of u-derivatives (rational in omega)
  q.lap0_logw = Jet2(f.ut.t) + f.G0ptp * Jet2(f.ut.v) + Jet2(f.up.p) * f.inv_s2;
  return q;
}

LightconeQuantities lightcone_quantities(const ConformalFactor& w) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 4);
  LightconeQuantities out{ScalarField(g),
                          ScalarField(g),
                          SymTensorField(g, MetricTag::Conformal),
                          SymTensorField(g, MetricTag::Conformal),
                          SymTensorField(g, MetricTag::Conformal),
                          SymTensorField(g, MetricTag::Conformal),
                          CovectorFieldSph(g),
                          ScalarField(g),
                          ScalarField(g),
                          ScalarField(g),
                          0.0};
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const GeomPoint q = geometry_at(J, i, n);
      out.thb.v[n] = q.thb.v;
      out.th.v[n] = q.th.v;
      out.chib.tt.v[n] = q.chib_tt.v;
      out.chib.tp.v[n] = q.chib_tp.v;
      out.chib.pp.v[n] = q.chib_pp.v;
      out.chi.tt.v[n] = q.chi_tt.v;
      out.chi.tp.v[n] = q.chi_tp.v;
      out.chi.pp.v[n] = q.chi_pp.v;
      out.A.tt.v[n] = q.A_tt.v;
      out.A.tp.v[n] = q.A_tp.v;
      out.A.pp.v[n] = q.A_pp.v;
      out.Aring.tt.v[n] = q.Ar_tt.v;
      out.Aring.tp.v[n] = q.Ar_tp.v;
      out.Aring.pp.v[n] = q.Ar_pp.v;
      out.zeta.ct.v[n] = q.zeta_t.v;
      out.zeta.cp.v[n] = q.zeta_p.v;
      out.H2.v[n] = q.H2.v;
      out.K.v[n] = q.K.v;
      out.R.v[n] = q.R.v;
    }
  });
  ScalarField w2(g);
  for (std::size_t n = 0; n < g.n_nodes(); ++n) w2.v[n] = w.omega.v[n] * w.omega.v[n];
  out.vol = integrate(w2);
  return out;
}

double gauss_residual(const ConformalFactor& w) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 4);
  std::vector<double> row_max(g.n_theta(), 0.0);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    double m = 0.0;
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const GeomPoint q = geometry_at(J, i, n);
      const double r_intrinsic = 2.0 * (1.0 - q.lap0_logw.v) * q.fr.inv_w2.v;
      m = std::max(m, std::abs(r_intrinsic - 0.5 * q.H2.v));
    }
    row_max[i] = m;
  });
  double m = 0.0;
  for (double x : row_max) m = std::max(m, x);
  return m;
}

AmbientPoints embed(const ConformalFactor& w) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 1);
  AmbientPoints pts;
  pts.grid = &g;
  pts.X.resize(g.n_nodes());
  pts.Vt.resize(g.n_nodes());
  pts.Vp.resize(g.n_nodes());
  pts.Lb.resize(g.n_nodes());
  pts.L.resize(g.n_nodes());
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double s = g.sin_theta(i), z = g.z(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const double cp = g.cos_mphi(1, j), sp = g.sin_mphi(1, j);
      const double x[3] = {s * cp, s * sp, z};
      const double xt[3] = {z * cp, z * sp, -s};   // d x / d theta
      const double xp[3] = {-s * sp, s * cp, 0.0}; // d x / d phi
      const double om = J.value(n);
      const double ot = J.d.get(1, 0).v[n], op = J.d.get(0, 1).v[n];
      pts.X[n] = {-om, om * x[0], om * x[1], om * x[2]};
      pts.Vt[n] = {-ot, ot * x[0] + om * xt[0], ot * x[1] + om * xt[1], ot * x[2] + om * xt[2]};
      pts.Vp[n] = {-op, op * x[0] + om * xp[0], op * x[1] + om * xp[1], op * x[2] + om * xp[2]};
    }
  });
  return pts;
}

void null_frame(AmbientPoints& pts) {
  const SphereGrid& g = *pts.grid;
  std::vector<double> row_det(g.n_theta(), 0.0);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    double dmin = std::numeric_limits<double>::max();
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const FourVec& X = pts.X[n];
      const double r = std::sqrt(X[1] * X[1] + X[2] * X[2] + X[3] * X[3]);
      pts.Lb[n] = {-1.0, X[1] / r, X[2] / r, X[3] / r};  // 2 d_u, past-pointing, Lb(r) = 1
      const FourVec E = {1.0, X[1] / r, X[2] / r, X[3] / r};
      // Particular solution L0 = a Vt + b Vp + E in the affine space
      // {eta(.,Vt) = eta(.,Vp) = 0, eta(Lb,.) = 2}; then slide along Lb to
      // reach the null cone.
      const double gtt = eta_dot(pts.Vt[n], pts.Vt[n]);
      const double gtp = eta_dot(pts.Vt[n], pts.Vp[n]);
      const double gpp = eta_dot(pts.Vp[n], pts.Vp[n]);
      const double rt = -eta_dot(E, pts.Vt[n]);
      const double rp = -eta_dot(E, pts.Vp[n]);
      const double det = gtt * gpp - gtp * gtp;
      dmin = std::min(dmin, std::abs(det) / (std::abs(gtt) + std::abs(gpp)));
      const double a = (rt * gpp - rp * gtp) / det;
      const double b = (gtt * rp - gtp * rt) / det;
      FourVec L0;
      for (int k = 0; k < 4; ++k) L0[k] = a * pts.Vt[n][k] + b * pts.Vp[n][k] + E[k];
      const double slide = -eta_dot(L0, L0) / 4.0;  // eta(L0 + s Lb, ...) = 0
      for (int k = 0; k < 4; ++k) pts.L[n][k] = L0[k] + slide * pts.Lb[n][k];
    }
    row_det[i] = dmin;
  });
  double dmin = std::numeric_limits<double>::max();
  for (double d : row_det) dmin = std::min(dmin, d);
  pts.min_gram_det = dmin;
  if (!(dmin > 1e-12))
    throw std::runtime_error("null_frame: near-singular tangent Gram matrix");
}

SymTensorField extrinsic_oracle_chi(const ConformalFactor& w, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("oracle step must be positive");
  const SphereGrid& g = *w.omega.grid;
  const HarmonicCoeffs c = analyze(w.omega, g.bandlimit());
  AmbientPoints pts = embed(w);
  null_frame(pts);

  // embedding evaluated at arbitrary coordinates via point synthesis
  const auto Xat = [&](double theta, double phi) -> FourVec {
    const double z = std::cos(theta), s = std::sin(theta);
    const double om = evaluate_at(c, z, phi);
    return {-om, om * s * std::cos(phi), om * s * std::sin(phi), om * z};
  };

  SymTensorField out(g, MetricTag::Conformal);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double th = g.theta(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const double ph = g.phi(j);
      const FourVec X0 = pts.X[n];
      FourVec Xtt, Xtp, Xpp;
      const FourVec Xp_t = Xat(th + h, ph), Xm_t = Xat(th - h, ph);
      const FourVec Xp_p = Xat(th, ph + h), Xm_p = Xat(th, ph - h);
      const FourVec Xpp_ = Xat(th + h, ph + h), Xpm = Xat(th + h, ph - h);
      const FourVec Xmp = Xat(th - h, ph + h), Xmm = Xat(th - h, ph - h);
      for (int k = 0; k < 4; ++k) {
        Xtt[k] = (Xp_t[k] - 2.0 * X0[k] + Xm_t[k]) / (h * h);
        Xpp[k] = (Xp_p[k] - 2.0 * X0[k] + Xm_p[k]) / (h * h);
        Xtp[k] = (Xpp_[k] - Xpm[k] - Xmp[k] + Xmm[k]) / (4.0 * h * h);
      }
      out.tt.v[n] = -eta_dot(Xtt, pts.L[n]);
      out.tp.v[n] = -eta_dot(Xtp, pts.L[n]);
      out.pp.v[n] = -eta_dot(Xpp, pts.L[n]);
    }
  });
  return out;
}

}  // namespace lcflow::cone
