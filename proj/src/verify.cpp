#include "lcflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lcflow/lightcone.hpp"
#include "lcflow/parallel.hpp"

namespace lcflow::verify {

using conformal::FramePoint;
using conformal::SymJet;
using conformal::Tensor3Jet;
using cone::GeomPoint;
using lcflow::flow::Snapshot;

namespace {

double row_fold_max(const std::vector<double>& rows) {
  double m = -std::numeric_limits<double>::max();
  for (double x : rows) m = std::max(m, x);
  return m;
}

/// gamma-norm^2 of the Codazzi antisymmetrization B_k = D(t,p,k) - D(p,t,k).
double codazzi_norm_sq(const FramePoint& f, double Bt, double Bp) {
  const double is2 = f.inv_s2.v, iw2 = f.inv_w2.v;
  return 2.0 * iw2 * iw2 * is2 * (Bt * Bt + Bp * Bp * is2) * iw2;
}

struct LsqFit {
  double slope = 0, intercept = 0, r2 = 0;
};

LsqFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& y) {
  LsqFit out;
  const std::size_t n = t.size();
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < n; ++k) {
    st += t[k];
    sy += y[k];
    stt += t[k] * t[k];
    sty += t[k] * y[k];
  }
  const double det = n * stt - st * st;
  out.slope = (n * sty - st * sy) / det;
  out.intercept = (sy * stt - st * sty) / det;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t k = 0; k < n; ++k) {
    const double yhat = out.slope * t[k] + out.intercept;
    ss_res += (y[k] - yhat) * (y[k] - yhat);
    ss_tot += (y[k] - mean) * (y[k] - mean);
  }
  out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace

ResidualReport check_codazzi(const ConformalFactor& w, double tol) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 4);
  std::vector<double> rows(g.n_theta(), 0.0), scales(g.n_theta(), 0.0);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    double m = 0.0, sc = 0.0;
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const GeomPoint q = cone::geometry_at(J, i, n);
      // A form: nabla_i A_jk - nabla_j A_ik = 0
      const Tensor3Jet dA = conformal::cov_grad_sym2_at(q.fr, q.A());
      const double r1 = codazzi_norm_sq(q.fr, dA.ttp.v - dA.ptt.v, dA.tpp.v - dA.ptp.v);
      // chi form: nabla_i chi_jk - nabla_j chi_ik = zeta_j chi_ik - zeta_i chi_jk
      const Tensor3Jet dX = conformal::cov_grad_sym2_at(q.fr, q.chi());
      const double zt = q.zeta_t.v, zp = q.zeta_p.v;
      const double r2t = dX.ttp.v - dX.ptt.v - zp * q.chi_tt.v + zt * q.chi_tp.v;
      const double r2p = dX.tpp.v - dX.ptp.v - zp * q.chi_tp.v + zt * q.chi_pp.v;
      const double r2 = codazzi_norm_sq(q.fr, r2t, r2p);
      m = std::max(m, std::max(r1, r2));
      sc = std::max(sc, conformal::norm_gamma_sq_tensor3(q.fr, dA));
    }
    rows[i] = std::sqrt(m);
    scales[i] = std::sqrt(sc);
  });
  ResidualReport rep;
  rep.name = "codazzi";
  rep.grid_L = g.bandlimit();
  rep.max_residual = row_fold_max(rows);
  rep.scale = row_fold_max(scales);
  rep.tolerance = tol;
  rep.pass = rep.max_residual < tol;
  return rep;
}

ResidualReport check_simons(const ConformalFactor& w, double tol) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 4);
  std::vector<double> rows(g.n_theta(), 0.0), scales(g.n_theta(), 0.0);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    double m = 0.0, sc = 0.0;
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const GeomPoint q = cone::geometry_at(J, i, n);
      const SymJet lapA = conformal::rough_laplacian_at(q.fr, q.A());
      const SymJet hessH2 = conformal::hess_gamma_at(q.fr, q.H2);
      SymJet res;
      res.tt = Jet2(lapA.tt.v - hessH2.tt.v - 0.5 * q.H2.v * q.Ar_tt.v);
      res.tp = Jet2(lapA.tp.v - hessH2.tp.v - 0.5 * q.H2.v * q.Ar_tp.v);
      res.pp = Jet2(lapA.pp.v - hessH2.pp.v - 0.5 * q.H2.v * q.Ar_pp.v);
      m = std::max(m, conformal::norm_gamma_sq_sym2(q.fr, res));
      sc = std::max(sc, std::sqrt(conformal::norm_gamma_sq_sym2(q.fr, lapA)) +
                            std::sqrt(conformal::norm_gamma_sq_sym2(q.fr, hessH2)));
    }
    rows[i] = std::sqrt(m);
    scales[i] = sc;
  });
  ResidualReport rep;
  rep.name = "simons";
  rep.grid_L = g.bandlimit();
  rep.max_residual = row_fold_max(rows);
  rep.scale = std::max(row_fold_max(scales), 1e-300);
  rep.tolerance = tol;
  rep.pass = rep.max_residual / rep.scale < tol || rep.max_residual < tol * 1e-3;
  return rep;
}

ResidualReport check_gradient_inequality(const ConformalFactor& w, double tol) {
  const flow::DiagnosticsRecord rec = flow::diagnostics(w, {}, 1.0);
  ResidualReport rep;
  rep.name = "gradient_inequality";
  rep.grid_L = w.omega.grid->bandlimit();
  rep.max_residual = std::max(0.0, -rec.grad_ineq_slack_min);  // violation depth
  rep.scale = rec.grad_h2_sq_max;
  rep.tolerance = tol;
  rep.pass = rec.grad_ineq_slack_min >= -tol;
  rep.extras.emplace_back("min_slack", rec.grad_ineq_slack_min);
  return rep;
}

VariationResiduals variation_residuals(const ConformalFactor& w, const ScalarField& phi,
                                       double eps) {
  const SphereGrid& g = *w.omega.grid;
  ScalarField wp(g), wm(g);
  for (std::size_t n = 0; n < g.n_nodes(); ++n) {
    wp.v[n] = w.omega.v[n] + eps * phi.v[n];
    wm.v[n] = w.omega.v[n] - eps * phi.v[n];
  }
  if (wp.min() <= 0.0 || wm.min() <= 0.0)
    throw std::invalid_argument("variation probe violates positivity of omega");
  const OmegaJets Jp = make_omega_jets(wp, 2);
  const OmegaJets Jm = make_omega_jets(wm, 2);
  const OmegaJets J = make_omega_jets(w.omega, 4);
  const DerivativeSet dphi_set = synth_derivatives(analyze(phi, g.bandlimit()), g, 2);

  VariationResiduals out;
  std::vector<VariationResiduals> rows(g.n_theta());
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    VariationResiduals r;
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const GeomPoint qp = cone::geometry_at(Jp, i, n);
      const GeomPoint qm = cone::geometry_at(Jm, i, n);
      const GeomPoint q = cone::geometry_at(J, i, n);
      const FramePoint& f = q.fr;
      const Jet2 ph = dphi_set.jet(0, 0, n);
      const double inv2e = 1.0 / (2.0 * eps);

      // d gamma = 2 phi chib
      {
        SymJet fd{Jet2((qp.gtt.v - qm.gtt.v) * inv2e - 2.0 * ph.v * q.chib_tt.v),
                  Jet2((qp.gtp.v - qm.gtp.v) * inv2e - 2.0 * ph.v * q.chib_tp.v),
                  Jet2((qp.gpp.v - qm.gpp.v) * inv2e - 2.0 * ph.v * q.chib_pp.v)};
        r.d_gamma = std::max(r.d_gamma, std::sqrt(conformal::norm_gamma_sq_sym2(f, fd)));
        const double an_norm = std::sqrt(conformal::norm_gamma_sq_sym2(
            f, SymJet{Jet2(2.0 * ph.v * q.chib_tt.v), Jet2(2.0 * ph.v * q.chib_tp.v),
                      Jet2(2.0 * ph.v * q.chib_pp.v)}));
        const double gam_norm = std::sqrt(conformal::norm_gamma_sq_sym2(f, q.gamma()));
        r.scale_gamma = std::max(r.scale_gamma, an_norm + gam_norm);
      }
      // d thb = -phi |chib|^2
      {
        const double chib_sq = conformal::dot_gamma_sym2(f, q.chib(), q.chib());
        const double an = -ph.v * chib_sq;
        r.d_thb = std::max(r.d_thb, std::abs((qp.thb.v - qm.thb.v) * inv2e - an));
        r.scale_thb = std::max(r.scale_thb, std::abs(an) + std::abs(q.thb.v));
      }
      // d theta = -2 lap_g phi - 4 gamma(grad phi, zeta)
      //           - phi (|II|^2 + 2 div_g zeta + 2 |zeta|^2_g)
      {
        const double lapg_phi = conformal::lap_gamma_at(f, ph).v;
        const double grad_dot =
            (ph.t * q.zeta_t.v + ph.p * q.zeta_p.v * f.inv_s2.v) * f.inv_w2.v;
        const double II_sq = conformal::dot_gamma_sym2(f, q.chi(), q.chib());
        // div_gamma of a one-form in 2d conformal: omega^-2 div_0
        const double div0_zeta =
            q.zeta_t.t + f.G0ptp.v * q.zeta_t.v + q.zeta_p.p * f.inv_s2.v;
        const double divg_zeta = div0_zeta * f.inv_w2.v;
        const double zeta_sq =
            (q.zeta_t.v * q.zeta_t.v + q.zeta_p.v * q.zeta_p.v * f.inv_s2.v) * f.inv_w2.v;
        const double an =
            -2.0 * lapg_phi - 4.0 * grad_dot - ph.v * (II_sq + 2.0 * divg_zeta + 2.0 * zeta_sq);
        r.d_theta = std::max(r.d_theta, std::abs((qp.th.v - qm.th.v) * inv2e - an));
        r.scale_theta = std::max(r.scale_theta, std::abs(an) + std::abs(q.th.v));
      }
      // d A = -2 Hess_gamma(thb phi), d H2 = -2 lap_gamma(thb phi) - (thb phi) H2
      {
        const Jet2 fj = q.thb * ph;
        const SymJet H = conformal::hess_gamma_at(f, fj);
        SymJet fd{Jet2((qp.A_tt.v - qm.A_tt.v) * inv2e + 2.0 * H.tt.v),
                  Jet2((qp.A_tp.v - qm.A_tp.v) * inv2e + 2.0 * H.tp.v),
                  Jet2((qp.A_pp.v - qm.A_pp.v) * inv2e + 2.0 * H.pp.v)};
        r.d_A = std::max(r.d_A, std::sqrt(conformal::norm_gamma_sq_sym2(f, fd)));
        r.scale_A =
            std::max(r.scale_A, 2.0 * std::sqrt(conformal::norm_gamma_sq_sym2(f, H)) +
                                    std::sqrt(conformal::norm_gamma_sq_sym2(f, q.A())));
        const double an = -2.0 * conformal::lap_gamma_at(f, fj).v - fj.v * q.H2.v;
        r.d_H2 = std::max(r.d_H2, std::abs((qp.H2.v - qm.H2.v) * inv2e - an));
        r.scale_H2 = std::max(r.scale_H2, std::abs(an) + std::abs(q.H2.v));
      }
    }
    rows[i] = r;
  });
  for (const VariationResiduals& r : rows) {
    out.d_gamma = std::max(out.d_gamma, r.d_gamma);
    out.d_thb = std::max(out.d_thb, r.d_thb);
    out.d_theta = std::max(out.d_theta, r.d_theta);
    out.d_A = std::max(out.d_A, r.d_A);
    out.d_H2 = std::max(out.d_H2, r.d_H2);
    out.scale_gamma = std::max(out.scale_gamma, r.scale_gamma);
    out.scale_thb = std::max(out.scale_thb, r.scale_thb);
    out.scale_theta = std::max(out.scale_theta, r.scale_theta);
    out.scale_A = std::max(out.scale_A, r.scale_A);
    out.scale_H2 = std::max(out.scale_H2, r.scale_H2);
  }
  return out;
}

double VariationResiduals::max_relative() const {
  double m = 0.0;
  m = std::max(m, d_gamma / std::max(scale_gamma, 1e-300));
  m = std::max(m, d_thb / std::max(scale_thb, 1e-300));
  m = std::max(m, d_theta / std::max(scale_theta, 1e-300));
  m = std::max(m, d_A / std::max(scale_A, 1e-300));
  m = std::max(m, d_H2 / std::max(scale_H2, 1e-300));
  return m;
}

ResidualReport check_variation(const ConformalFactor& w, const ScalarField& phi, double eps,
                               double tol) {
  const VariationResiduals r1 = variation_residuals(w, phi, eps);
  const VariationResiduals r2 = variation_residuals(w, phi, 0.5 * eps);
  ResidualReport rep;
  rep.name = "variation";
  rep.grid_L = w.omega.grid->bandlimit();
  rep.tolerance = tol;
  rep.max_residual = std::max({r2.d_gamma, r2.d_thb, r2.d_theta, r2.d_A, r2.d_H2});
  rep.scale = std::max({r2.scale_gamma, r2.scale_thb, r2.scale_theta, r2.scale_A, r2.scale_H2});
  bool pass = r2.max_relative() < tol;
  const double pairs[5][3] = {{r1.d_gamma, r2.d_gamma, r1.scale_gamma},
                              {r1.d_thb, r2.d_thb, r1.scale_thb},
                              {r1.d_theta, r2.d_theta, r1.scale_theta},
                              {r1.d_A, r2.d_A, r1.scale_A},
                              {r1.d_H2, r2.d_H2, r1.scale_H2}};
  const char* names[5] = {"gamma", "thb", "theta", "A", "H2"};
  for (int k = 0; k < 5; ++k) {
    const double floor = 1e-12 * std::max(pairs[k][2], 1.0);
    if (pairs[k][0] > 100.0 * floor) {  // measurable above round-off
      const double order = std::log2(pairs[k][0] / std::max(pairs[k][1], 1e-300));
      rep.extras.emplace_back(std::string("order_") + names[k], order);
      if (order < 1.9) pass = false;
    }
  }
  rep.pass = pass;
  return rep;
}

ResidualReport check_evolution(const TrajectoryLog& traj, double tol) {
  const auto& snaps = traj.snapshots;
  ResidualReport rep;
  rep.name = "evolution";
  rep.tolerance = tol;
  if (snaps.size() < 3) throw std::runtime_error("check_evolution: need >= 3 snapshots");
  const SphereGrid& g = *snaps.front().omega.grid;
  rep.grid_L = g.bandlimit();
  // uniform stride required
  const double dt = snaps[1].t - snaps[0].t;
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    if (std::abs((snaps[k].t - snaps[k - 1].t) - dt) > 1e-10 * std::max(1.0, dt))
      throw std::runtime_error("check_evolution: snapshots not at uniform stride");
  }

  double max_rel = 0.0;
  // rolling window of jets so each snapshot is analyzed once
  std::vector<OmegaJets> window;
  window.push_back(make_omega_jets(snaps[0].omega, 4));
  window.push_back(make_omega_jets(snaps[1].omega, 4));
  for (std::size_t k = 1; k + 1 < snaps.size(); ++k) {
    window.push_back(make_omega_jets(snaps[k + 1].omega, 4));
    const OmegaJets& Jm = window[0];
    const OmegaJets& J0 = window[1];
    const OmegaJets& Jp = window[2];
    std::vector<double> rows(g.n_theta(), 0.0);
    parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
      const int i = static_cast<int>(ii);
      double m = 0.0;
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        const GeomPoint qm = cone::geometry_at(Jm, i, n);
        const GeomPoint q0 = cone::geometry_at(J0, i, n);
        const GeomPoint qp = cone::geometry_at(Jp, i, n);
        const double inv2dt = 1.0 / (2.0 * dt);
        // dH2/dt = lap_gamma H2 + (H2)^2/2
        const double lhs1 = (qp.H2.v - qm.H2.v) * inv2dt;
        const double rhs1 =
            conformal::lap_gamma_at(q0.fr, q0.H2).v + 0.5 * q0.H2.v * q0.H2.v;
        const double sc1 = std::abs(rhs1) + q0.H2.v * q0.H2.v + 1e-300;
        m = std::max(m, std::abs(lhs1 - rhs1) / sc1);
        // d|A|^2/dt = lap |A|^2 - 2|grad A|^2 + (H2)^3/2
        const auto a_sq = [&](const GeomPoint& q) {
          return conformal::dot_gamma_sym2(q.fr, q.A(), q.A());
        };
        const double lhs2 = (a_sq(qp) - a_sq(qm)) * inv2dt;
        // |A|^2 as a jet for its Laplacian: full contraction with jets
        const Jet2 asq_jet = [&] {
          const Jet2 is2 = q0.fr.inv_s2;
          const Jet2 iw2 = q0.fr.inv_w2;
          return (q0.A_tt * q0.A_tt + 2.0 * q0.A_tp * q0.A_tp * is2 +
                  q0.A_pp * q0.A_pp * is2 * is2) *
                 iw2 * iw2;
        }();
        const conformal::Tensor3Jet dA = conformal::cov_grad_sym2_at(q0.fr, q0.A());
        const double gradA_sq = conformal::norm_gamma_sq_tensor3(q0.fr, dA);
        const double rhs2 = conformal::lap_gamma_at(q0.fr, asq_jet).v - 2.0 * gradA_sq +
                            0.5 * q0.H2.v * q0.H2.v * q0.H2.v;
        const double sc2 = std::abs(rhs2) + std::abs(q0.H2.v * q0.H2.v * q0.H2.v) + 1e-300;
        m = std::max(m, std::abs(lhs2 - rhs2) / sc2);
      }
      rows[i] = m;
    });
    max_rel = std::max(max_rel, row_fold_max(rows));
    window.erase(window.begin());
  }
  rep.max_residual = max_rel;
  rep.scale = 1.0;
  bool pass = max_rel < tol;

  // monotonicity audit of max |A|^2/(H2)^2 = f_0 + 1/2 from the records
  const auto& sig = traj.meta.opts.sigma_list;
  std::size_t s0 = sig.size();
  for (std::size_t si = 0; si < sig.size(); ++si)
    if (sig[si] == 0.0) s0 = si;
  if (s0 < sig.size()) {
    double worst = 0.0;
    for (std::size_t k = 1; k < traj.records.size(); ++k) {
      const double prev = traj.records[k - 1].f_sigma_max[s0];
      const double cur = traj.records[k].f_sigma_max[s0];
      worst = std::max(worst, cur - prev);
    }
    rep.extras.emplace_back("max_ratio_increase_per_step", worst);
    if (worst > 1e-8) pass = false;
  }
  rep.pass = pass;
  return rep;
}

ResidualReport check_monotonicity_decay(const TrajectoryLog& traj, double min_r2) {
  const auto& rec = traj.records;
  ResidualReport rep;
  rep.name = "monotonicity_decay";
  rep.grid_L = traj.meta.L;
  if (rec.size() < 20) throw std::runtime_error("check_monotonicity_decay: run too short to fit");
  bool pass = true;

  // (a) max f_sigma(t) <= max f_sigma(0) + tol, and stepwise nonincrease
  const auto& sig = traj.meta.opts.sigma_list;
  for (std::size_t si = 0; si < sig.size(); ++si) {
    const double f0 = rec.front().f_sigma_max[si];
    double worst_exceed = 0.0, worst_step = 0.0;
    for (std::size_t k = 1; k < rec.size(); ++k) {
      worst_exceed = std::max(worst_exceed, rec[k].f_sigma_max[si] - f0);
      const double dt = std::max(rec[k].t - rec[k - 1].t, 1e-300);
      worst_step =
          std::max(worst_step, (rec[k].f_sigma_max[si] - rec[k - 1].f_sigma_max[si]) / dt);
    }
    rep.extras.emplace_back("f_sigma_exceed_" + std::to_string(sig[si]), worst_exceed);
    if (worst_exceed > 1e-8) pass = false;
    rep.max_residual = std::max(rep.max_residual, worst_exceed);
  }

  // (b) fitted decay slopes over the final two-thirds (by time)
  const double t_end = rec.back().t;
  const double t_cut = t_end / 3.0;
  std::vector<double> ts, y_ar, y_gh, y_osc;
  for (const auto& r : rec) {
    if (r.t < t_cut) continue;
    if (r.a_ring_sq_max <= 0 || r.grad_h2_sq_max <= 0 || r.h2_max - r.h2_min <= 0) continue;
    ts.push_back(r.t);
    y_ar.push_back(std::log(r.a_ring_sq_max));
    y_gh.push_back(std::log(r.grad_h2_sq_max));
    y_osc.push_back(std::log(r.h2_max - r.h2_min));
  }
  if (ts.size() < 20)
    throw std::runtime_error("check_monotonicity_decay: too few records past the transient");
  const char* names[3] = {"slope_aring_sq", "slope_grad_h2_sq", "slope_h2_osc"};
  const std::vector<double>* ys[3] = {&y_ar, &y_gh, &y_osc};
  for (int q = 0; q < 3; ++q) {
    const LsqFit f = fit_log_linear(ts, *ys[q]);
    rep.extras.emplace_back(names[q], f.slope);
    rep.extras.emplace_back(std::string(names[q]) + "_r2", f.r2);
    if (!(f.slope < 0.0) || f.r2 < min_r2) pass = false;
  }

  // spectral norms of H2 from snapshots: sum_l l^{2k} sum_m c_lm^2, k = 2, 3
  if (traj.snapshots.size() >= 5) {
    std::vector<double> st, s2, s3;
    for (const auto& sn : traj.snapshots) {
      if (sn.t < t_cut) continue;
      ConformalFactor w(sn.omega);
      const SphereGrid& g = *sn.omega.grid;
      const OmegaJets J = make_omega_jets(w, 2);
      ScalarField h2(g);
      for (int i = 0; i < g.n_theta(); ++i) {
        for (int j = 0; j < g.n_phi(); ++j) {
          const std::size_t n = g.node(i, j);
          const FramePoint fr = conformal::frame_at(J, i, n);
          const Jet2 wj = J.jet(0, 0, n);
          const double lap0 =
              wj.tt + fr.G0ptp.v * wj.t + wj.pp * fr.inv_s2.v;
          const double iw = 1.0 / wj.v;
          const double grad0 = wj.t * wj.t + wj.p * wj.p * fr.inv_s2.v;
          const double minus_half_theta = lap0 * iw * iw - iw - grad0 * iw * iw * iw;
          h2.v[n] = 2.0 * iw * (-2.0 * minus_half_theta);  // thb * theta
        }
      }
      const HarmonicCoeffs c = analyze(h2, g.bandlimit());
      double n2 = 0, n3 = 0;
      for (int l = 1; l <= c.L; ++l) {
        double pl = 0;
        for (int m = -l; m <= l; ++m) pl += c(l, m) * c(l, m);
        n2 += std::pow(static_cast<double>(l), 4) * pl;
        n3 += std::pow(static_cast<double>(l), 6) * pl;
      }
      if (n2 > 0 && n3 > 0) {
        st.push_back(sn.t);
        s2.push_back(std::log(n2));
        s3.push_back(std::log(n3));
      }
    }
    if (st.size() >= 5) {
      const LsqFit f2 = fit_log_linear(st, s2);
      const LsqFit f3 = fit_log_linear(st, s3);
      rep.extras.emplace_back("slope_spectral_k2", f2.slope);
      rep.extras.emplace_back("slope_spectral_k3", f3.slope);
      if (!(f2.slope < 0.0) || !(f3.slope < 0.0)) pass = false;
    }
  }
  rep.pass = pass;
  rep.scale = 1.0;
  return rep;
}

ResidualReport check_gradient_estimate(const TrajectoryLog& traj) {
  const auto& snaps = traj.snapshots;
  ResidualReport rep;
  rep.name = "gradient_estimate";
  if (snaps.size() < 8) throw std::runtime_error("check_gradient_estimate: insufficient snapshots");
  const SphereGrid& g = *snaps.front().omega.grid;
  rep.grid_L = g.bandlimit();
  const double etas[2] = {0.5, 0.25};
  bool pass = true;
  for (double eta : etas) {
    std::vector<double> C(snaps.size());
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      ConformalFactor w(snaps[k].omega);
      const OmegaJets J = make_omega_jets(w, 4);
      std::vector<double> rows(g.n_theta(), -std::numeric_limits<double>::max());
      parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
        const int i = static_cast<int>(ii);
        double m = -std::numeric_limits<double>::max();
        for (int j = 0; j < g.n_phi(); ++j) {
          const std::size_t n = g.node(i, j);
          const GeomPoint q = cone::geometry_at(J, i, n);
          const double R = 0.5 * q.H2.v;  // Gauss identity
          // |grad R|_gamma = |grad H2|/2
          const double gradR =
              0.5 * std::sqrt((q.H2.t * q.H2.t + q.H2.p * q.H2.p * q.fr.inv_s2.v) *
                              q.fr.inv_w2.v);
          const double r32 = R > 0 ? std::pow(R, 1.5) : 0.0;
          m = std::max(m, gradR - eta * eta * r32);
        }
        rows[i] = m;
      });
      C[k] = row_fold_max(rows);
    }
    // early-time maximum: first quarter of the time interval
    const double t_cut = snaps.front().t + 0.25 * (snaps.back().t - snaps.front().t);
    double early = -std::numeric_limits<double>::max(), all = -std::numeric_limits<double>::max();
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      if (snaps[k].t <= t_cut) early = std::max(early, C[k]);
      all = std::max(all, C[k]);
    }
    const double bound = 2.0 * std::max(early, 0.0) + 1e-12;
    rep.extras.emplace_back("C_eta_" + std::to_string(eta), all);
    rep.extras.emplace_back("C_eta_early_" + std::to_string(eta), early);
    if (all > bound) pass = false;
    rep.max_residual = std::max(rep.max_residual, all);
    rep.scale = std::max(rep.scale, std::max(early, 0.0));
  }
  rep.pass = pass;
  return rep;
}

double g_epsilon_min(const TrajectoryLog& traj, double eps) {
  const auto& snaps = traj.snapshots;
  if (snaps.empty()) throw std::runtime_error("g_epsilon_min: no snapshots");
  const SphereGrid& g = *snaps.front().omega.grid;

  const auto fields_min_max = [&](const Snapshot& sn, double c_eps, bool compute_c) {
    ConformalFactor w(sn.omega);
    const OmegaJets J = make_omega_jets(w, 4);
    std::vector<double> rows(g.n_theta(),
                             compute_c ? -std::numeric_limits<double>::max()
                                       : std::numeric_limits<double>::max());
    parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
      const int i = static_cast<int>(ii);
      double acc = rows[i];
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        const GeomPoint q = cone::geometry_at(J, i, n);
        const double ar2 = conformal::norm_gamma_sq_sym2(q.fr, q.Aring());
        const double h4 = q.H2.v * q.H2.v;
        if (compute_c)
          acc = std::max(acc, ar2 - eps * h4);  // C_eps candidate
        else
          acc = std::min(acc, 2.0 * c_eps + eps * h4 - ar2);  // G_eps
      }
      rows[i] = acc;
    });
    double out = rows[0];
    for (double x : rows) out = compute_c ? std::max(out, x) : std::min(out, x);
    return out;
  };

  // C_eps from initial data, floored positive
  const flow::DiagnosticsRecord r0 = flow::diagnostics(ConformalFactor(snaps.front().omega),
                                                       {}, 1.0);
  const double floor = 1e-12 * r0.h2_max * r0.h2_max;
  const double c_eps = std::max(fields_min_max(snaps.front(), 0.0, true), floor);
  double gmin = std::numeric_limits<double>::max();
  for (const Snapshot& sn : snaps) gmin = std::min(gmin, fields_min_max(sn, c_eps, false));
  return gmin;
}

}  // namespace lcflow::verify
