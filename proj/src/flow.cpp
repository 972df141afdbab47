#include "lcflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "lcflow/lightcone.hpp"
#include "lcflow/parallel.hpp"

namespace lcflow::flow {

namespace {

constexpr double kEightPi = 8.0 * std::numbers::pi;

struct RhsFields {
  ScalarField rhs;
  double dual_residual = 0.0;
};

RhsFields rhs_impl(const ScalarField& omega, Mode mode) {
  const SphereGrid& g = *omega.grid;
  const OmegaJets J = make_omega_jets(omega, 2);
  RhsFields out{ScalarField(g), 0.0};
  std::vector<double> row_res(g.n_theta(), 0.0);
  double r_mean = 0.0;
  if (mode == Mode::Normalized) {
    ScalarField w2(g);
    for (std::size_t n = 0; n < g.n_nodes(); ++n) w2.v[n] = omega.v[n] * omega.v[n];
    r_mean = kEightPi / integrate(w2);
  }
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double z = g.z(i), s = g.sin_theta(i);
    const double cot = z / s, inv_s2 = 1.0 / (s * s);
    double res = 0.0;
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const Jet2 w = J.jet(0, 0, n);
      const Jet2 wt = J.jet(1, 0, n), wp = J.jet(0, 1, n);
      const double lap0 = w.tt + cot * w.t + w.pp * inv_s2;
      const double iw = 1.0 / w.v;
      const double grad0 = w.t * w.t + w.p * w.p * inv_s2;
      const double minus_half_theta = lap0 * iw * iw - iw - grad0 * iw * iw * iw;
      // second route: -omega K with K = (1 - lap0 log omega)/omega^2
      const Jet2 ut = wt / w, up = wp / w;
      const double lap0_u = ut.t + cot * ut.v + up.p * inv_s2;
      const double minus_omega_k = -(1.0 - lap0_u) * iw;
      res = std::max(res, std::abs(minus_half_theta - minus_omega_k));
      if (mode == Mode::Unnormalized) {
        out.rhs.v[n] = minus_half_theta;
      } else {
        const double R = -2.0 * minus_half_theta * iw;  // R = theta/omega
        out.rhs.v[n] = 0.5 * (r_mean - R) * w.v;
      }
    }
    row_res[i] = res;
  });
  for (double r : row_res) out.dual_residual = std::max(out.dual_residual, r);
  return out;
}

const double DP_A[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
const double DP_B5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                         -2187.0 / 6784, 11.0 / 84, 0.0};
const double DP_B4[7] = {5179.0 / 57600, 0.0,          7571.0 / 16695, 393.0 / 640,
                         -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct TrialStep {
  ScalarField y5;
  double err = 0.0;
  bool positive = true;
};

TrialStep dp_trial(const FlowState& s, Mode mode, double dt, double positivity_floor) {
  const SphereGrid& g = *s.omega.grid;
  std::vector<ScalarField> k;
  k.reserve(7);
  ScalarField stage(g);
  for (int st = 0; st < 7; ++st) {
    for (std::size_t n = 0; n < g.n_nodes(); ++n) {
      double y = s.omega.v[n];
      for (int j = 0; j < st; ++j)
        if (DP_A[st][j] != 0.0) y += dt * DP_A[st][j] * k[j].v[n];
      stage.v[n] = y;
    }
    if (stage.min() <= 0.0) {
      // stage itself left the admissible cone; treat as a failed (rejected) trial
      TrialStep t{ScalarField(g), std::numeric_limits<double>::infinity(), false};
      return t;
    }
    k.push_back(rhs_impl(stage, mode).rhs);
  }
  TrialStep out{ScalarField(g), 0.0, true};
  double err = 0.0;
  for (std::size_t n = 0; n < g.n_nodes(); ++n) {
    double y5 = s.omega.v[n], y4 = s.omega.v[n];
    for (int j = 0; j < 7; ++j) {
      if (DP_B5[j] != 0.0) y5 += dt * DP_B5[j] * k[j].v[n];
      if (DP_B4[j] != 0.0) y4 += dt * DP_B4[j] * k[j].v[n];
    }
    out.y5.v[n] = y5;
    err = std::max(err, std::abs(y5 - y4));
  }
  out.err = err;
  if (out.y5.min() < positivity_floor) out.positive = false;
  return out;
}

}  // namespace

ScalarField rhs(const ConformalFactor& w, Mode mode) {
  RhsFields r = rhs_impl(w.omega, mode);
  const double scale = std::max(1.0, r.rhs.max_abs());
  if (r.dual_residual > 1e-8 * scale)
    throw std::runtime_error("rhs: -theta/2 and -omega K routes disagree beyond tolerance");
  return std::move(r.rhs);
}

double rhs_dual_route_residual(const ConformalFactor& w) {
  return rhs_impl(w.omega, Mode::Unnormalized).dual_residual;
}

FlowState step_fixed(const FlowState& s, Mode mode, double dt) {
  TrialStep t = dp_trial(s, mode, dt, 0.0);
  return {s.t + dt, std::move(t.y5)};
}

StepResult step_adaptive(const FlowState& s, const FlowOptions& opts, double dt) {
  // dt_min floors only the controller's own rejections; a caller-forced small
  // landing step (snapshot or t_final) is taken as requested
  dt = std::min(dt, opts.dt_max);
  StepResult out;
  for (;;) {
    const TrialStep trial = dp_trial(s, opts.mode, dt, 0.5 * opts.eps_ext);
    if (trial.positive && trial.err <= opts.rk_tolerance) {
      out.state = {s.t + dt, trial.y5};
      out.dt_taken = dt;
      const double fac =
          0.9 * std::pow(opts.rk_tolerance / std::max(trial.err, 1e-300), 0.2);
      out.dt_next = std::clamp(dt * std::clamp(fac, 0.2, 5.0), opts.dt_min, opts.dt_max);
      return out;
    }
    ++out.rejected;
    double next = dt;
    if (!trial.positive) {
      next = 0.5 * dt;  // positivity rejection: halve
    } else {
      const double fac = 0.9 * std::pow(opts.rk_tolerance / trial.err, 0.2);
      next = dt * std::clamp(fac, 0.2, 0.9);
    }
    if (next < opts.dt_min || !(next > 0.0)) {
      throw StiffFailure("step_adaptive: dt underflow (stiff failure)", FlowState{s.t, s.omega});
    }
    dt = next;
  }
}

DiagnosticsRecord diagnostics(const ConformalFactor& w, const std::vector<double>& sigma_list,
                              double psi_k0) {
  const SphereGrid& g = *w.omega.grid;
  const OmegaJets J = make_omega_jets(w, 4);

  struct RowStats {
    double h2_min = std::numeric_limits<double>::max();
    double h2_max = -std::numeric_limits<double>::max();
    double ar_max = 0, gh2_max = 0, psi_max = -std::numeric_limits<double>::max();
    double gauss = 0;
    double slack_min = std::numeric_limits<double>::max();
    std::vector<double> fs_max;
    bool h2_nonpos = false;
  };
  std::vector<RowStats> rows(g.n_theta());
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    RowStats rs;
    rs.fs_max.assign(sigma_list.size(), -std::numeric_limits<double>::max());
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const cone::GeomPoint q = cone::geometry_at(J, i, n);
      const double h2 = q.H2.v;
      rs.h2_min = std::min(rs.h2_min, h2);
      rs.h2_max = std::max(rs.h2_max, h2);
      const double ar2 = conformal::norm_gamma_sq_sym2(q.fr, q.Aring());
      rs.ar_max = std::max(rs.ar_max, ar2);
      const double gh2 =
          (q.H2.t * q.H2.t + q.H2.p * q.H2.p * q.fr.inv_s2.v) * q.fr.inv_w2.v;
      rs.gh2_max = std::max(rs.gh2_max, gh2);
      const double r_int = 2.0 * (1.0 - q.lap0_logw.v) * q.fr.inv_w2.v;
      rs.gauss = std::max(rs.gauss, std::abs(r_int - 0.5 * h2));
      const conformal::Tensor3Jet dA = conformal::cov_grad_sym2_at(q.fr, q.A());
      const double gA = conformal::norm_gamma_sq_tensor3(q.fr, dA);
      rs.slack_min = std::min(rs.slack_min, gA - 0.75 * gh2);
      if (h2 <= 0.0) {
        rs.h2_nonpos = true;
      } else {
        for (std::size_t si = 0; si < sigma_list.size(); ++si) {
          const double fs = std::pow(h2, sigma_list[si]) * ar2 / (h2 * h2);
          rs.fs_max[si] = std::max(rs.fs_max[si], fs);
        }
        rs.psi_max = std::max(rs.psi_max, gh2 / h2 + psi_k0 * ar2);
      }
    }
    rows[i] = rs;
  });

  DiagnosticsRecord rec;
  rec.f_sigma_max.assign(sigma_list.size(), -std::numeric_limits<double>::max());
  rec.h2_min = std::numeric_limits<double>::max();
  rec.h2_max = -std::numeric_limits<double>::max();
  rec.grad_ineq_slack_min = std::numeric_limits<double>::max();
  rec.psi_max = -std::numeric_limits<double>::max();
  for (const RowStats& rs : rows) {
    rec.h2_min = std::min(rec.h2_min, rs.h2_min);
    rec.h2_max = std::max(rec.h2_max, rs.h2_max);
    rec.a_ring_sq_max = std::max(rec.a_ring_sq_max, rs.ar_max);
    rec.grad_h2_sq_max = std::max(rec.grad_h2_sq_max, rs.gh2_max);
    rec.gauss_residual = std::max(rec.gauss_residual, rs.gauss);
    rec.grad_ineq_slack_min = std::min(rec.grad_ineq_slack_min, rs.slack_min);
    rec.psi_max = std::max(rec.psi_max, rs.psi_max);
    rec.h2_nonpositive = rec.h2_nonpositive || rs.h2_nonpos;
    for (std::size_t si = 0; si < sigma_list.size(); ++si)
      rec.f_sigma_max[si] = std::max(rec.f_sigma_max[si], rs.fs_max[si]);
  }
  // R = H2/2 by the Gauss identity; report the H2-derived range
  rec.r_min = 0.5 * rec.h2_min;
  rec.r_max = 0.5 * rec.h2_max;
  if (rec.h2_nonpositive) {
    for (double& f : rec.f_sigma_max) f = std::numeric_limits<double>::quiet_NaN();
    rec.psi_max = std::numeric_limits<double>::quiet_NaN();
  }
  ScalarField w2(g);
  for (std::size_t n = 0; n < g.n_nodes(); ++n) w2.v[n] = w.omega.v[n] * w.omega.v[n];
  rec.vol = integrate(w2);
  rec.diam_lo = std::numbers::pi * w.omega.min();
  rec.diam_hi = std::numbers::pi * w.omega.max();
  return rec;
}

TrajectoryLog run_flow(const ConformalFactor& w0, const FlowOptions& opts) {
  const SphereGrid& g = *w0.omega.grid;
  TrajectoryLog log;
  log.meta.L = g.bandlimit();
  log.meta.oversample = g.oversample();
  log.meta.opts = opts;

  {
    DiagnosticsRecord r0 = diagnostics(w0, opts.sigma_list, opts.psi_k0);
    if (r0.h2_min <= 0.0)
      std::cerr << "[run_flow] warning: initial scalar curvature is not strictly positive "
                   "(min H^2 = "
                << r0.h2_min << "); the paper's hypotheses do not hold, proceeding anyway\n";
    log.records.push_back(r0);
  }
  log.snapshots.push_back({0.0, w0.omega});
  const double vol0 = log.records.front().vol;

  FlowState s{0.0, w0.omega};
  double dt = std::clamp(opts.dt_initial, opts.dt_min, opts.dt_max);
  double next_snap = opts.snapshot_every > 0 ? opts.snapshot_every
                                             : std::numeric_limits<double>::infinity();
  const double t_end = (opts.stop == StopRule::TFinal) ? opts.t_final
                                                       : std::numeric_limits<double>::infinity();
  bool done = false;
  while (!done) {
    double dt_try = dt;
    bool hit_snap = false, hit_end = false;
    if (s.t + dt_try >= next_snap - 1e-14) {
      dt_try = next_snap - s.t;
      hit_snap = true;
    }
    if (s.t + dt_try >= t_end - 1e-14) {
      dt_try = t_end - s.t;
      hit_end = true;
      hit_snap = false;
    }
    if (dt_try <= 0.0) break;
    // do not let the forced landing inflate the proposal beyond the controller
    dt_try = std::min(dt_try, opts.dt_max);

    StepResult st = step_adaptive(s, opts, dt_try);
    const bool landed = std::abs(st.dt_taken - dt_try) < 1e-14 * std::max(1.0, dt_try);
    s = std::move(st.state);
    dt = st.dt_next;

    ConformalFactor w(s.omega);
    DiagnosticsRecord rec = diagnostics(w, opts.sigma_list, opts.psi_k0);
    rec.t = s.t;
    rec.dt = st.dt_taken;
    log.records.push_back(rec);

    if (opts.mode == Mode::Normalized) {
      const double drift = std::abs(rec.vol - vol0) / vol0;
      if (drift > 1e-8 * std::max(1.0, s.t))
        throw std::runtime_error("run_flow: normalized-mode volume drift exceeds tolerance");
    }

    if (hit_snap && landed) {
      log.snapshots.push_back({s.t, s.omega});
      next_snap += opts.snapshot_every;
    }
    switch (opts.stop) {
      case StopRule::Extinction:
        if (s.omega.min() < opts.eps_ext) {
          log.meta.stop_reason = "extinction";
          done = true;
        }
        break;
      case StopRule::Convergence:
        if (rec.a_ring_sq_max < opts.eps_conv) {
          log.meta.stop_reason = "convergence";
          done = true;
        }
        break;
      case StopRule::TFinal:
        if (hit_end && landed) {
          log.meta.stop_reason = "t_final";
          done = true;
        }
        break;
    }
  }
  if (log.snapshots.back().t != s.t) log.snapshots.push_back({s.t, s.omega});
  if (log.meta.stop_reason.empty()) log.meta.stop_reason = "t_final";
  return log;
}

TrajectoryLog renormalize_trajectory(const TrajectoryLog& traj) {
  const auto& rec = traj.records;
  if (rec.size() < 3)
    throw std::runtime_error("renormalize_trajectory: too few records for quadrature");
  const std::size_t n = rec.size();
  std::vector<double> r(n), c(n), tt(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = kEightPi / rec[k].vol;
  for (std::size_t k = 1; k < n; ++k) {
    const double dt = rec[k].t - rec[k - 1].t;
    if (!(dt > 0.0)) throw std::runtime_error("renormalize_trajectory: non-increasing times");
    if (r[k] > 2.0 * r[k - 1] || r[k - 1] > 2.0 * r[k])
      throw std::runtime_error(
          "renormalize_trajectory: records too sparse for stable quadrature of r(t)");
  }
  // c = exp(int r dtau) and t~ = int c dtau from the logged r(t) = 8pi/Vol(t).
  // d(ln Vol)/dt = -r exactly (Gauss-Bonnet), so between records the integrand
  // is 8pi over a linear-in-t volume; both integrals then reduce to logs of
  // logged volume ratios, with no stencil truncation error.
  const double vol0 = rec[0].vol;
  c[0] = 1.0;
  tt[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    c[k] = vol0 / rec[k].vol;
    tt[k] = tt[k - 1] + (vol0 / kEightPi) * std::log(rec[k - 1].vol / rec[k].vol);
  }

  TrajectoryLog out;
  out.meta = traj.meta;
  out.meta.stop_reason = traj.meta.stop_reason + " (renormalized)";
  out.records.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const DiagnosticsRecord& a = rec[k];
    DiagnosticsRecord b = a;
    const double ck = c[k];
    b.t = tt[k];
    b.dt = (k > 0) ? tt[k] - tt[k - 1] : 0.0;
    b.vol = a.vol * ck;                    // degree +1 in gamma
    b.h2_min = a.h2_min / ck;              // degree -1
    b.h2_max = a.h2_max / ck;
    b.r_min = a.r_min / ck;
    b.r_max = a.r_max / ck;
    b.a_ring_sq_max = a.a_ring_sq_max / (ck * ck);
    b.grad_h2_sq_max = a.grad_h2_sq_max / (ck * ck * ck);
    b.psi_max = a.psi_max / (ck * ck);
    b.gauss_residual = a.gauss_residual / ck;
    b.diam_lo = a.diam_lo * std::sqrt(ck);
    b.diam_hi = a.diam_hi * std::sqrt(ck);
    b.grad_ineq_slack_min = a.grad_ineq_slack_min / (ck * ck * ck);
    // f_sigma = (H2)^sigma |Ar|^2/(H2)^2 has degree -sigma
    for (std::size_t si = 0; si < b.f_sigma_max.size(); ++si)
      b.f_sigma_max[si] = a.f_sigma_max[si] * std::pow(ck, -traj.meta.opts.sigma_list[si]);
    out.records[k] = b;
  }
  out.snapshots.reserve(traj.snapshots.size());
  for (const Snapshot& s : traj.snapshots) {
    // locate the record time (snapshots are taken at accepted record times)
    const auto it = std::lower_bound(
        rec.begin(), rec.end(), s.t,
        [](const DiagnosticsRecord& a, double t) { return a.t < t - 1e-14; });
    if (it == rec.end()) continue;
    const std::size_t k = static_cast<std::size_t>(it - rec.begin());
    const double sc = std::sqrt(c[k]);
    Snapshot sn{tt[k], s.omega};
    for (double& x : sn.omega.v) x *= sc;
    out.snapshots.push_back(std::move(sn));
  }
  return out;
}

ConformalFactor random_admissible_omega(const SphereGrid& g, std::uint64_t seed, double c0,
                                        double amplitude, int l_max) {
  // splitmix64 stream: portable and deterministic
  std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL;
  const auto next_u01 = [&]() {
    std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  };
  for (int attempt = 0; attempt < 64; ++attempt) {
    HarmonicCoeffs c(g.bandlimit());
    c(0, 0) = std::sqrt(4.0 * std::numbers::pi);
    for (int l = 2; l <= std::min(l_max, g.bandlimit()); ++l) {
      const double scale = amplitude / (static_cast<double>(l) * (l + 1) / 2.0);
      for (int m = -l; m <= l; ++m) c(l, m) = scale * (2.0 * next_u01() - 1.0);
    }
    ScalarField w = synthesize(c, g);
    for (double& x : w.v) x *= c0;
    if (w.min() <= 0.0) continue;
    ConformalFactor cf(std::move(w));
    const DiagnosticsRecord rec = diagnostics(cf, {}, 1.0);
    if (rec.h2_min > 0.0) return cf;  // R = H2/2 > 0 everywhere
  }
  throw std::runtime_error("random_admissible_omega: could not sample R > 0 initial data");
}

}  // namespace lcflow::flow
