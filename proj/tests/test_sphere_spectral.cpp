#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "lcflow/sphere_ops.hpp"
#include "test_helpers.hpp"

using namespace lcflow;
using namespace lcflow::testing;

namespace {
constexpr double kPi = std::numbers::pi;

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.v.size(); ++n) m = std::max(m, std::abs(a.v[n] - b.v[n]));
  return m;
}
}  // namespace

TEST_CASE("grid construction and quadrature") {
  const SphereGrid g = SphereGrid::build(8, 1.0);
  double wsum = 0.0;
  for (int i = 0; i < g.n_theta(); ++i) wsum += g.weight(i);
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
  for (int i = 0; i < g.n_theta(); ++i) {
    CHECK(g.sin_theta(i) > 1e-3);  // no node at the poles
  }

  // P3(cos theta) integrates to zero (orthogonality); Simpson oracle agrees
  const auto p3 = [](double z, double) { return 0.5 * z * (5.0 * z * z - 3.0); };
  const ScalarField f = sample(g, p3);
  CHECK(std::abs(integrate(f)) < 1e-14);
  CHECK(std::abs(simpson_sphere(p3)) < 1e-8);

  const SphereGrid g2 = SphereGrid::build(4, 2.0);
  CHECK(g2.n_theta() == 10);
  CHECK(g2.n_phi() == 18);

  CHECK_THROWS(SphereGrid::build(3));
  CHECK_THROWS(SphereGrid::build(8, 0.5));
}

TEST_CASE("integrate: known integrals") {
  const SphereGrid g = SphereGrid::build(8);
  CHECK(integrate(constant_field(g, 1.0)) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  const ScalarField z2 = sample(g, [](double z, double) { return z * z; });
  // oracle: closed form 4 pi / 3, cross-checked with Simpson
  const double oracle = simpson_sphere([](double z, double) { return z * z; });
  CHECK(oracle == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-8));
  CHECK(integrate(z2) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
  CHECK(std::abs(integrate(ylm_field(g, 2, 0))) < 1e-14);
}

TEST_CASE("transform: normalization, roundtrip, Parseval") {
  const SphereGrid g = SphereGrid::build(8);
  {
    const HarmonicCoeffs c = analyze(constant_field(g, 1.0), 8);
    CHECK(c(0, 0) == doctest::Approx(std::sqrt(4.0 * kPi)).epsilon(1e-14));
    double rest = 0.0;
    for (int l = 1; l <= 8; ++l)
      for (int m = -l; m <= l; ++m) rest = std::max(rest, std::abs(c(l, m)));
    CHECK(rest < 1e-14);
  }
  {
    const ScalarField y32 = ylm_field(g, 3, 2);
    const ScalarField back = synthesize(analyze(y32, 8), g);
    CHECK(max_diff(y32, back) < 1e-12);
  }
  {
    const ScalarField f = random_bandlimited(g, 8, 1.0, 42);
    const HarmonicCoeffs c = analyze(f, 8);
    ScalarField f2(g);
    for (std::size_t n = 0; n < f.v.size(); ++n) f2.v[n] = f.v[n] * f.v[n];
    CHECK(c.sum_squares() == doctest::Approx(integrate(f2)).epsilon(1e-10));
  }
  // explicit convention: Y_{1,0} = sqrt(3/4pi) z, Y_{1,1} ~ x, Y_{1,-1} ~ y
  {
    const double n1 = std::sqrt(3.0 / (4.0 * kPi));
    CHECK(max_diff(ylm_field(g, 1, 0), sample(g, [&](double z, double) { return n1 * z; })) <
          1e-14);
    CHECK(max_diff(ylm_field(g, 1, 1), sample(g, [&](double z, double p) {
                     return n1 * std::sqrt(1 - z * z) * std::cos(p);
                   })) < 1e-14);
    CHECK(max_diff(ylm_field(g, 1, -1), sample(g, [&](double z, double p) {
                     return n1 * std::sqrt(1 - z * z) * std::sin(p);
                   })) < 1e-14);
  }
  CHECK_THROWS(analyze(constant_field(g, 1.0), g.max_bandlimit() + 1));
}

TEST_CASE("laplacian0: eigenfunctions and closed forms") {
  const SphereGrid g = SphereGrid::build(8);
  {
    const ScalarField y = ylm_field(g, 1, 0);
    ScalarField want(g);
    for (std::size_t n = 0; n < y.v.size(); ++n) want.v[n] = -2.0 * y.v[n];
    CHECK(max_diff(spectral::laplacian0(y), want) < 1e-12);
  }
  CHECK(spectral::laplacian0(constant_field(g, 3.0)).max_abs() < 1e-12);
  {
    // z^2 -> 2 - 6 z^2 (P2 decomposition oracle)
    const ScalarField f = sample(g, [](double z, double) { return z * z; });
    const ScalarField want = sample(g, [](double z, double) { return 2.0 - 6.0 * z * z; });
    CHECK(max_diff(spectral::laplacian0(f), want) < 1e-10);
  }
  // eigenfunction property across the full band
  const SphereGrid g16 = SphereGrid::build(16);
  for (int l = 0; l <= 16; ++l) {
    const ScalarField y = ylm_field(g16, l, std::min(l, 2));
    ScalarField want(g16);
    for (std::size_t n = 0; n < y.v.size(); ++n) want.v[n] = -double(l) * (l + 1) * y.v[n];
    CHECK(max_diff(spectral::laplacian0(y), want) < 1e-10);
  }
}

TEST_CASE("gradient0: closed form and FD oracle") {
  const SphereGrid g = SphereGrid::build(16);
  {
    const ScalarField f = sample(g, [](double z, double) { return z; });
    const VectorFieldSph v = spectral::gradient0(f);
    const ScalarField want_t = sample(g, [](double z, double) { return -std::sqrt(1 - z * z); });
    CHECK(max_diff(v.vt, want_t) < 1e-12);
    CHECK(v.vp.max_abs() < 1e-12);
  }
  {
    const VectorFieldSph v = spectral::gradient0(constant_field(g, 2.5));
    CHECK(v.vt.max_abs() < 1e-12);
    CHECK(v.vp.max_abs() < 1e-12);
  }
  {
    // FD oracle on Y21: df/dtheta and df/dphi by central differences of the
    // closed form Y21 = sqrt(15/4pi) sin cos cos(phi)
    const double N = std::sqrt(15.0 / (4.0 * kPi));
    const auto y21 = [N](double theta, double phi) {
      return N * std::sin(theta) * std::cos(theta) * std::cos(phi);
    };
    const VectorFieldSph v = spectral::gradient0(ylm_field(g, 2, 1));
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < g.n_theta(); ++i) {
      for (int j = 0; j < g.n_phi(); ++j) {
        const double th = g.theta(i), ph = g.phi(j);
        const double ft = (y21(th + h, ph) - y21(th - h, ph)) / (2 * h);
        const double fp = (y21(th, ph + h) - y21(th, ph - h)) / (2 * h);
        const double s2 = g.sin_theta(i) * g.sin_theta(i);
        worst = std::max(worst, std::abs(v.vt.v[g.node(i, j)] - ft));
        worst = std::max(worst, std::abs(v.vp.v[g.node(i, j)] - fp / s2));
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("hessian0: l=1 identity, zero, trace") {
  const SphereGrid g = SphereGrid::build(16);
  {
    // Hess0(z) = -z g0
    const ScalarField f = sample(g, [](double z, double) { return z; });
    const SymTensorField h = spectral::hessian0(f);
    double worst = 0.0;
    for (int i = 0; i < g.n_theta(); ++i) {
      const double s2 = g.sin_theta(i) * g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        worst = std::max(worst, std::abs(h.tt.v[n] + g.z(i)));
        worst = std::max(worst, std::abs(h.tp.v[n]));
        worst = std::max(worst, std::abs(h.pp.v[n] + g.z(i) * s2));
      }
    }
    CHECK(worst < 1e-8);
  }
  CHECK(spectral::hessian0(constant_field(g, 1.0)).tt.max_abs() < 1e-12);
  {
    const ScalarField f = random_bandlimited(g, 16, 1.0, 9);
    const SymTensorField h = spectral::hessian0(f);
    const ScalarField lap = spectral::laplacian0(f);
    double worst = 0.0;
    for (int i = 0; i < g.n_theta(); ++i) {
      const double s2 = g.sin_theta(i) * g.sin_theta(i);
      for (int j = 0; j < g.n_phi(); ++j) {
        const std::size_t n = g.node(i, j);
        worst = std::max(worst, std::abs(h.tt.v[n] + h.pp.v[n] / s2 - lap.v[n]));
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("derivative synthesis matches FD to fourth order") {
  // the theta-derivative chain (orders 3, 4) against small central stencils of
  // point evaluation
  const SphereGrid g = SphereGrid::build(10);
  const HarmonicCoeffs c = analyze(random_bandlimited(g, 10, 1.0, 3), 10);
  const DerivativeSet d = synth_derivatives(c, g, 4);
  const double h = 2e-2;
  const int i = g.n_theta() / 3, j = 1;
  const double th = g.theta(i), ph = g.phi(j);
  const auto F = [&](double t, double p) { return evaluate_at(c, std::cos(t), p); };
  // fourth derivative 5-point stencil in theta
  const double d4 =
      (F(th - 2 * h, ph) - 4 * F(th - h, ph) + 6 * F(th, ph) - 4 * F(th + h, ph) +
       F(th + 2 * h, ph)) /
      (h * h * h * h);
  CHECK(d.get(4, 0).v[g.node(i, j)] == doctest::Approx(d4).epsilon(5e-3));
  const auto d3_at = [&](double hh) {
    return (-F(th - 2 * hh, ph) + 2 * F(th - hh, ph) - 2 * F(th + hh, ph) +
            F(th + 2 * hh, ph)) /
           (2 * hh * hh * hh);
  };
  // Richardson-extrapolated oracle (the raw stencil is only O(h^2))
  const double d3 = (4.0 * d3_at(h / 2) - d3_at(h)) / 3.0;
  CHECK(d.get(3, 0).v[g.node(i, j)] == doctest::Approx(d3).epsilon(1e-5));
  // mixed (2,2)
  const auto d2t = [&](double p) {
    return (F(th + h, p) - 2 * F(th, p) + F(th - h, p)) / (h * h);
  };
  const double d22 = (d2t(ph + h) - 2 * d2t(ph) + d2t(ph - h)) / (h * h);
  CHECK(d.get(2, 2).v[g.node(i, j)] == doctest::Approx(d22).epsilon(5e-3));
}

TEST_CASE("non-finite input is rejected") {
  const SphereGrid g = SphereGrid::build(8);
  ScalarField f = constant_field(g, 1.0);
  f.v[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(analyze(f, 8));
  CHECK_THROWS(integrate(f));
}

TEST_CASE("roundtrip property across bandlimits") {
  for (int L : {8, 16, 32}) {
    const SphereGrid g = SphereGrid::build(L);
    const ScalarField f = random_bandlimited(g, L, 1.0, 100 + L);
    const ScalarField back = synthesize(analyze(f, L), g);
    double worst = 0.0;
    for (std::size_t n = 0; n < f.v.size(); ++n)
      worst = std::max(worst, std::abs(f.v[n] - back.v[n]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("roundtrip at the desk-scale ceiling L = 64") {
  const SphereGrid g = SphereGrid::build(64);
  const ScalarField f = random_bandlimited(g, 64, 1.0, 7);
  const ScalarField back = synthesize(analyze(f, 64), g);
  double worst = 0.0;
  for (std::size_t n = 0; n < f.v.size(); ++n)
    worst = std::max(worst, std::abs(f.v[n] - back.v[n]));
  CHECK(worst < 1e-12);
}

TEST_CASE("quadrature is exact on products of harmonics") {
  const SphereGrid g = SphereGrid::build(8);  // N_theta = 18, exact to degree 35
  for (auto [l1, m1, l2, m2] : {std::array<int, 4>{8, 3, 8, 3}, {8, 5, 7, 5}, {6, 0, 8, 0}}) {
    const ScalarField a = ylm_field(g, l1, m1);
    const ScalarField b = ylm_field(g, l2, m2);
    ScalarField ab(g);
    for (std::size_t n = 0; n < a.v.size(); ++n) ab.v[n] = a.v[n] * b.v[n];
    const double want = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
    CHECK(std::abs(integrate(ab) - want) < 1e-13);
  }
}
