#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>

#include "lcflow/conformal.hpp"
#include "lcflow/lightcone.hpp"
#include "lcflow/sphere_ops.hpp"
#include "test_helpers.hpp"

using namespace lcflow;
using namespace lcflow::testing;

namespace {

using Fn = std::function<double(double, double)>;  // (theta, phi) -> value

/// Brute-force oracle: coordinate Christoffels of gamma = w^2 g0 assembled
/// explicitly from centered finite differences of the metric components.
struct FdChristoffel {
  Fn w;
  double h = 1e-4;

  std::array<double, 3> metric(double th, double ph) const {  // gtt, gtp, gpp
    const double s = std::sin(th), om = w(th, ph);
    return {om * om, 0.0, om * om * s * s};
  }

  // Gamma^k_{ij}: indices 0 = theta, 1 = phi
  double gamma(int k, int i, int j, double th, double ph) const {
    const auto comp = [&](double t, double p, int a, int b) {
      const auto m = metric(t, p);
      if (a == 0 && b == 0) return m[0];
      if (a == 1 && b == 1) return m[2];
      return m[1];
    };
    const auto d = [&](int dir, int a, int b) {
      if (dir == 0) return (comp(th + h, ph, a, b) - comp(th - h, ph, a, b)) / (2 * h);
      return (comp(th, ph + h, a, b) - comp(th, ph - h, a, b)) / (2 * h);
    };
    const auto m = metric(th, ph);
    const double det = m[0] * m[2] - m[1] * m[1];
    const double inv[2][2] = {{m[2] / det, -m[1] / det}, {-m[1] / det, m[0] / det}};
    double out = 0.0;
    for (int l = 0; l < 2; ++l) out += 0.5 * inv[k][l] * (d(i, l, j) + d(j, l, i) - d(l, i, j));
    return out;
  }

  // covariant Hessian of a scalar closure by FD
  double hess(const Fn& f, int i, int j, double th, double ph) const {
    const auto d2 = [&](int a, int b) {
      if (a == 0 && b == 0) return (f(th + h, ph) - 2 * f(th, ph) + f(th - h, ph)) / (h * h);
      if (a == 1 && b == 1) return (f(th, ph + h) - 2 * f(th, ph) + f(th, ph - h)) / (h * h);
      return (f(th + h, ph + h) - f(th + h, ph - h) - f(th - h, ph + h) + f(th - h, ph - h)) /
             (4 * h * h);
    };
    const double ft = (f(th + h, ph) - f(th - h, ph)) / (2 * h);
    const double fp = (f(th, ph + h) - f(th, ph - h)) / (2 * h);
    return d2(i, j) - gamma(0, i, j, th, ph) * ft - gamma(1, i, j, th, ph) * fp;
  }

  // nabla_i T_jk for symmetric tensor component closures (Ttt, Ttp, Tpp)
  double cov_grad(const std::array<Fn, 3>& T, int i, int j, int k, double th, double ph) const {
    const auto comp = [&](double t, double p, int a, int b) {
      if (a == 0 && b == 0) return T[0](t, p);
      if (a == 1 && b == 1) return T[2](t, p);
      return T[1](t, p);
    };
    const double dT = (i == 0) ? (comp(th + h, ph, j, k) - comp(th - h, ph, j, k)) / (2 * h)
                               : (comp(th, ph + h, j, k) - comp(th, ph - h, j, k)) / (2 * h);
    double out = dT;
    for (int l = 0; l < 2; ++l) {
      out -= gamma(l, i, j, th, ph) * comp(th, ph, l, k);
      out -= gamma(l, i, k, th, ph) * comp(th, ph, j, l);
    }
    return out;
  }
};

Fn closure_of(const HarmonicCoeffs& c) {
  return [c](double th, double ph) { return evaluate_at(c, std::cos(th), ph); };
}

}  // namespace

TEST_CASE("conformal_scalar_ops reduces to round operators at omega == 1") {
  const SphereGrid g = SphereGrid::build(12);
  const ConformalFactor one(constant_field(g, 1.0));
  const ScalarField f = random_bandlimited(g, 10, 1.0, 5);
  const auto ops = conformal::conformal_scalar_ops(one, f);
  const ScalarField lap = spectral::laplacian0(f);
  const SymTensorField h0 = spectral::hessian0(f);
  const ScalarField gr2 = spectral::norm0_sq(spectral::gradient0(f));
  double worst = 0.0;
  for (std::size_t n = 0; n < f.v.size(); ++n) {
    worst = std::max(worst, std::abs(ops.lap.v[n] - lap.v[n]));
    worst = std::max(worst, std::abs(ops.grad_sq.v[n] - gr2.v[n]));
    worst = std::max(worst, std::abs(ops.hess.tt.v[n] - h0.tt.v[n]));
    worst = std::max(worst, std::abs(ops.hess.tp.v[n] - h0.tp.v[n]));
    worst = std::max(worst, std::abs(ops.hess.pp.v[n] - h0.pp.v[n]));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("constant conformal factor scales the Laplacian by omega^-2") {
  const SphereGrid g = SphereGrid::build(12);
  const ConformalFactor two(constant_field(g, 2.0));
  const ScalarField f = ylm_field(g, 2, 0);
  const auto ops = conformal::conformal_scalar_ops(two, f);
  const ScalarField lap = spectral::laplacian0(f);
  double worst = 0.0;
  for (std::size_t n = 0; n < f.v.size(); ++n)
    worst = std::max(worst, std::abs(ops.lap.v[n] - 0.25 * lap.v[n]));
  CHECK(worst < 1e-13);
}

TEST_CASE("conformal Hessian matches the FD Christoffel oracle") {
  const SphereGrid g = SphereGrid::build(16);
  const ConformalFactor w = omega_zonal(g);
  const ScalarField f = ylm_field(g, 1, 1);
  const auto ops = conformal::conformal_scalar_ops(w, f);

  const FdChristoffel oracle{[](double th, double) { return 1.0 + 0.1 * std::cos(th); }};
  const Fn fc = closure_of(analyze(f, g.bandlimit()));
  double worst = 0.0;
  for (int i = 0; i < g.n_theta(); i += 5) {
    for (int j = 0; j < g.n_phi(); j += 7) {
      const double th = g.theta(i), ph = g.phi(j);
      const std::size_t n = g.node(i, j);
      worst = std::max(worst, std::abs(ops.hess.tt.v[n] - oracle.hess(fc, 0, 0, th, ph)));
      worst = std::max(worst, std::abs(ops.hess.tp.v[n] - oracle.hess(fc, 0, 1, th, ph)));
      worst = std::max(worst, std::abs(ops.hess.pp.v[n] - oracle.hess(fc, 1, 1, th, ph)));
    }
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("covariant_grad_sym2: metric compatibility and product rule") {
  const SphereGrid g = SphereGrid::build(16);
  const ConformalFactor w = omega_generic(g);
  SUBCASE("nabla gamma = 0") {
    SymTensorField gam(g);
    for (int i = 0; i < g.n_theta(); ++i) {
      const double s2 = g.sin_theta(i) * g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        const double w2 = w.omega.v[n] * w.omega.v[n];
        gam.tt.v[n] = w2;
        gam.pp.v[n] = w2 * s2;
      }
    }
    const auto T = conformal::analyze_sym2(gam, g.max_bandlimit());
    const Tensor3Field D = conformal::covariant_grad_sym2(w, T);
    for (const ScalarField* c : {&D.ttt, &D.ttp, &D.tpp, &D.ptt, &D.ptp, &D.ppp})
      CHECK(c->max_abs() < 1e-9);
  }
  SUBCASE("T = f gamma: nabla T = df tensor gamma") {
    const ScalarField f = ylm_field(g, 2, 0);
    const DerivativeSet df = synth_derivatives(analyze(f, g.bandlimit()), g, 1);
    SymTensorField T(g);
    for (int i = 0; i < g.n_theta(); ++i) {
      const double s2 = g.sin_theta(i) * g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        const double w2 = w.omega.v[n] * w.omega.v[n];
        T.tt.v[n] = f.v[n] * w2;
        T.pp.v[n] = f.v[n] * w2 * s2;
      }
    }
    const Tensor3Field D =
        conformal::covariant_grad_sym2(w, conformal::analyze_sym2(T, g.max_bandlimit()));
    double worst = 0.0;
    for (int i = 0; i < g.n_theta(); ++i) {
      const double s2 = g.sin_theta(i) * g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        const double w2 = w.omega.v[n] * w.omega.v[n];
        worst = std::max(worst, std::abs(D.ttt.v[n] - df.get(1, 0).v[n] * w2));
        worst = std::max(worst, std::abs(D.tpp.v[n] - df.get(1, 0).v[n] * w2 * s2));
        worst = std::max(worst, std::abs(D.ptt.v[n] - df.get(0, 1).v[n] * w2));
        worst = std::max(worst, std::abs(D.ppp.v[n] - df.get(0, 1).v[n] * w2 * s2));
        worst = std::max(worst, std::abs(D.ttp.v[n]));
        worst = std::max(worst, std::abs(D.ptp.v[n]));
      }
    }
    CHECK(worst < 1e-9);
  }
  SUBCASE("random bandlimited T vs FD oracle") {
    const ConformalFactor wz = omega_zonal(g);
    conformal::SymTensorSpectral T{analyze(random_bandlimited(g, 6, 1.0, 11), 16),
                                   analyze(random_bandlimited(g, 6, 1.0, 12), 16),
                                   analyze(random_bandlimited(g, 6, 1.0, 13), 16)};
    const Tensor3Field D = conformal::covariant_grad_sym2(wz, T);
    const FdChristoffel oracle{[](double th, double) { return 1.0 + 0.1 * std::cos(th); }};
    const std::array<Fn, 3> Tc = {closure_of(T.tt), closure_of(T.tp), closure_of(T.pp)};
    double worst = 0.0;
    for (int i = 2; i < g.n_theta(); i += 7) {
      for (int j = 0; j < g.n_phi(); j += 11) {
        const double th = g.theta(i), ph = g.phi(j);
        const std::size_t n = g.node(i, j);
        worst = std::max(worst, std::abs(D.ttt.v[n] - oracle.cov_grad(Tc, 0, 0, 0, th, ph)));
        worst = std::max(worst, std::abs(D.ttp.v[n] - oracle.cov_grad(Tc, 0, 0, 1, th, ph)));
        worst = std::max(worst, std::abs(D.tpp.v[n] - oracle.cov_grad(Tc, 0, 1, 1, th, ph)));
        worst = std::max(worst, std::abs(D.ptt.v[n] - oracle.cov_grad(Tc, 1, 0, 0, th, ph)));
        worst = std::max(worst, std::abs(D.ptp.v[n] - oracle.cov_grad(Tc, 1, 0, 1, th, ph)));
        worst = std::max(worst, std::abs(D.ppp.v[n] - oracle.cov_grad(Tc, 1, 1, 1, th, ph)));
      }
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("rough_laplacian_sym2 on f gamma equals (lap f) gamma") {
  const SphereGrid g = SphereGrid::build(16);
  const ConformalFactor w = omega_zonal(g);
  const ScalarField f = ylm_field(g, 2, 1);
  SymTensorField T(g);
  for (int i = 0; i < g.n_theta(); ++i) {
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const double w2 = w.omega.v[n] * w.omega.v[n];
      T.tt.v[n] = f.v[n] * w2;
      T.pp.v[n] = f.v[n] * w2 * s2;
    }
  }
  const SymTensorField L =
      conformal::rough_laplacian_sym2(w, conformal::analyze_sym2(T, g.max_bandlimit()));
  const auto ops = conformal::conformal_scalar_ops(w, f);
  double worst = 0.0;
  for (int i = 0; i < g.n_theta(); ++i) {
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const double w2 = w.omega.v[n] * w.omega.v[n];
      worst = std::max(worst, std::abs(L.tt.v[n] - ops.lap.v[n] * w2));
      worst = std::max(worst, std::abs(L.tp.v[n]));
      worst = std::max(worst, std::abs(L.pp.v[n] - ops.lap.v[n] * w2 * s2));
    }
  }
  CHECK(worst < 1e-6);

  conformal::SymTensorSpectral Z{HarmonicCoeffs(8), HarmonicCoeffs(8), HarmonicCoeffs(8)};
  const SymTensorField L0 = conformal::rough_laplacian_sym2(w, Z);
  CHECK(L0.tt.max_abs() == 0.0);
}

TEST_CASE("gamma_norm2: trace identity and the trace-free Hessian identity") {
  const SphereGrid g = SphereGrid::build(24);
  const ConformalFactor w = omega_generic(g);
  SUBCASE("|gamma|^2 = 2") {
    SymTensorField gam(g);
    for (int i = 0; i < g.n_theta(); ++i) {
      const double s2 = g.sin_theta(i) * g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        const double w2 = w.omega.v[n] * w.omega.v[n];
        gam.tt.v[n] = w2;
        gam.pp.v[n] = w2 * s2;
      }
    }
    const ScalarField n2 = conformal::gamma_norm2(w, gam);
    double worst = 0.0;
    for (double x : n2.v) worst = std::max(worst, std::abs(x - 2.0));
    CHECK(worst < 1e-12);
  }
  SUBCASE("|Aring|^2_gamma = 16 w^-2 |tracefree Hess0(1/w)|^2_0") {
    const auto q = cone::lightcone_quantities(w);
    const ScalarField lhs = conformal::gamma_norm2(w, q.Aring);
    ScalarField inv(g);
    for (std::size_t n = 0; n < inv.v.size(); ++n) inv.v[n] = 1.0 / w.omega.v[n];
    const SymTensorField H = spectral::hessian0(inv);
    const ScalarField lap = spectral::laplacian0(inv);
    double worst = 0.0;
    for (int i = 0; i < g.n_theta(); ++i) {
      const double s2 = g.sin_theta(i) * g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        const double htt = H.tt.v[n] - 0.5 * lap.v[n];
        const double hpp = H.pp.v[n] - 0.5 * lap.v[n] * s2;
        const double htp = H.tp.v[n];
        const double n0 = htt * htt + 2.0 * htp * htp / s2 + hpp * hpp / (s2 * s2);
        const double rhs = 16.0 / (w.omega.v[n] * w.omega.v[n]) * n0;
        worst = std::max(worst, std::abs(lhs.v[n] - rhs));
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("trace of the conformal Hessian is the conformal Laplacian") {
  const SphereGrid g = SphereGrid::build(16);
  const ConformalFactor w = omega_generic(g);
  const ScalarField f = random_bandlimited(g, 12, 1.0, 21);
  const auto ops = conformal::conformal_scalar_ops(w, f);
  double worst = 0.0;
  for (int i = 0; i < g.n_theta(); ++i) {
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      const double iw2 = 1.0 / (w.omega.v[n] * w.omega.v[n]);
      const double tr = (ops.hess.tt.v[n] + ops.hess.pp.v[n] / s2) * iw2;
      worst = std::max(worst, std::abs(tr - ops.lap.v[n]));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("conformal scaling laws are exact") {
  const SphereGrid g = SphereGrid::build(12);
  const ConformalFactor w = omega_zonal(g);
  ScalarField w3v = w.omega;
  for (double& x : w3v.v) x *= 3.0;
  const ConformalFactor w3(w3v);
  const ScalarField f = ylm_field(g, 3, 2);
  const auto a = conformal::conformal_scalar_ops(w, f);
  const auto b = conformal::conformal_scalar_ops(w3, f);
  double worst = 0.0;
  for (std::size_t n = 0; n < f.v.size(); ++n)
    worst = std::max(worst, std::abs(b.lap.v[n] - a.lap.v[n] / 9.0));
  CHECK(worst < 1e-13);

  SymTensorField T(g);
  T.tt = ylm_field(g, 2, 0);
  T.tp = ylm_field(g, 2, 1);
  T.pp = ylm_field(g, 1, 0);
  const ScalarField na = conformal::gamma_norm2(w, T);
  const ScalarField nb = conformal::gamma_norm2(w3, T);
  worst = 0.0;
  for (std::size_t n = 0; n < na.v.size(); ++n)
    worst = std::max(worst, std::abs(nb.v[n] - na.v[n] / 81.0));
  CHECK(worst < 1e-13);
}

TEST_CASE("FD oracle residual decays at second order in the step") {
  const SphereGrid g = SphereGrid::build(12);
  const ConformalFactor w = omega_zonal(g);
  const ScalarField f = ylm_field(g, 1, 1);
  const auto ops = conformal::conformal_scalar_ops(w, f);
  const Fn fc = closure_of(analyze(f, g.bandlimit()));
  const int i = g.n_theta() / 2, j = 3;
  const double th = g.theta(i), ph = g.phi(j);
  const std::size_t n = g.node(i, j);
  double err[2];
  int k = 0;
  for (double h : {2e-3, 1e-3}) {
    const FdChristoffel oracle{[](double t, double) { return 1.0 + 0.1 * std::cos(t); }, h};
    err[k++] = std::abs(ops.hess.tt.v[n] - oracle.hess(fc, 0, 0, th, ph));
  }
  CHECK(err[0] / err[1] > 3.5);  // ~4 for clean O(h^2)
}

TEST_CASE("rough laplacian matches a nested FD oracle on the round sphere") {
  // omega == s0 constant: Christoffels of gamma are the round ones and the
  // oracle needs no metric differencing; T = Hess0(Y20)
  const double s0 = 1.3;
  const SphereGrid g = SphereGrid::build(16);
  const ConformalFactor w(constant_field(g, s0));
  const SymTensorField T = spectral::hessian0(ylm_field(g, 2, 0));
  const auto Tspec = conformal::analyze_sym2(T, g.max_bandlimit());
  const SymTensorField L = conformal::rough_laplacian_sym2(w, Tspec);

  const std::array<Fn, 3> Tc = {closure_of(Tspec.tt), closure_of(Tspec.tp),
                                closure_of(Tspec.pp)};
  double h = 1e-3;  // captured by reference; Richardson-extrapolated below
  // round Christoffels in closed form
  const auto G = [](int k, int i, int j, double th) {
    if (k == 0) return (i == 1 && j == 1) ? -std::sin(th) * std::cos(th) : 0.0;
    return (i != j) ? std::cos(th) / std::sin(th) : 0.0;
  };
  const auto comp = [&](double t, double p, int a, int b) {
    if (a == 0 && b == 0) return Tc[0](t, p);
    if (a == 1 && b == 1) return Tc[2](t, p);
    return Tc[1](t, p);
  };
  // first covariant derivative as a closure
  const auto D = [&](int i, int j, int k, double th, double ph) {
    const double dT = (i == 0) ? (comp(th + h, ph, j, k) - comp(th - h, ph, j, k)) / (2 * h)
                               : (comp(th, ph + h, j, k) - comp(th, ph - h, j, k)) / (2 * h);
    double out = dT;
    for (int l = 0; l < 2; ++l) {
      out -= G(l, i, j, th) * comp(th, ph, l, k);
      out -= G(l, i, k, th) * comp(th, ph, j, l);
    }
    return out;
  };
  // second covariant derivative, contracted with gamma^{kl} (diagonal)
  const auto lap_oracle = [&](int ja, int jb, double th, double ph) {
    double tot = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double dD = (k == 0)
                            ? (D(k, ja, jb, th + h, ph) - D(k, ja, jb, th - h, ph)) / (2 * h)
                            : (D(k, ja, jb, th, ph + h) - D(k, ja, jb, th, ph - h)) / (2 * h);
      double t2 = dD;
      for (int m = 0; m < 2; ++m) {
        t2 -= G(m, k, k, th) * D(m, ja, jb, th, ph);
        t2 -= G(m, k, ja, th) * D(k, m, jb, th, ph);
        t2 -= G(m, k, jb, th) * D(k, ja, m, th, ph);
      }
      const double gkk = (k == 0) ? 1.0 / (s0 * s0)
                                  : 1.0 / (s0 * s0 * std::sin(th) * std::sin(th));
      tot += gkk * t2;
    }
    return tot;
  };
  const auto lap_rich = [&](int ja, int jb, double th, double ph) {
    h = 1e-3;
    const double coarse = lap_oracle(ja, jb, th, ph);
    h = 5e-4;
    const double fine = lap_oracle(ja, jb, th, ph);
    return (4.0 * fine - coarse) / 3.0;
  };
  double worst = 0.0;
  for (int i = 3; i < g.n_theta(); i += 9) {
    for (int j = 1; j < g.n_phi(); j += 13) {
      const double th = g.theta(i), ph = g.phi(j);
      const std::size_t n = g.node(i, j);
      worst = std::max(worst, std::abs(L.tt.v[n] - lap_rich(0, 0, th, ph)));
      worst = std::max(worst, std::abs(L.tp.v[n] - lap_rich(0, 1, th, ph)));
      worst = std::max(worst, std::abs(L.pp.v[n] - lap_rich(1, 1, th, ph)));
    }
  }
  CHECK(worst < 1e-6);
}
