#include "lcflow/steady.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lcflow/parallel.hpp"
#include "lcflow/transform.hpp"

namespace lcflow::steady {

ConformalFactor mobius_omega(const SteadyStateParams& p, const SphereGrid& g) {
  if (!(p.c > 0.0)) throw std::invalid_argument("steady-state scale c must be positive");
  const double alpha = std::sqrt(1.0 + p.a[0] * p.a[0] + p.a[1] * p.a[1] + p.a[2] * p.a[2]);
  ScalarField w(g);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double s = g.sin_theta(i), z = g.z(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const double ax = p.a[0] * s * g.cos_mphi(1, j) + p.a[1] * s * g.sin_mphi(1, j) + p.a[2] * z;
      w.v[g.node(i, j)] = p.c / (alpha + ax);
    }
  });
  return ConformalFactor(std::move(w));
}

ConformalFactor boost_cross_section(const ConformalFactor& w, const BoostSpec& b) {
  const SphereGrid& g = *w.omega.grid;
  const double nn = std::sqrt(b.n[0] * b.n[0] + b.n[1] * b.n[1] + b.n[2] * b.n[2]);
  if (std::abs(nn - 1.0) > 1e-12) throw std::invalid_argument("boost axis must be a unit vector");
  const HarmonicCoeffs c = analyze(w.omega, g.bandlimit());
  const double ch = std::cosh(b.beta), sh = std::sinh(b.beta);
  ScalarField out(g);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double s = g.sin_theta(i), z = g.z(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const double xp[3] = {s * g.cos_mphi(1, j), s * g.sin_mphi(1, j), z};
      const double xn = xp[0] * b.n[0] + xp[1] * b.n[1] + xp[2] * b.n[2];
      // inverse boost (rapidity -beta) of the null ray (-1, x'):
      //   time part -> -(ch + sh*xn) = -mu~, spatial -> xp + ((ch-1)xn + sh) n
      const double mu_tilde = ch + sh * xn;
      double xs[3];
      for (int k = 0; k < 3; ++k) xs[k] = xp[k] + ((ch - 1.0) * xn + sh) * b.n[k];
      const double r = std::sqrt(xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]);
      const double zz = std::max(-1.0, std::min(1.0, xs[2] / r));
      const double phi = std::atan2(xs[1], xs[0]);
      // mu(x) mu~(x') = 1, so omega'(x') = omega(x) / mu~(x')
      out.v[g.node(i, j)] = evaluate_at(c, zz, phi) / mu_tilde;
    }
  });
  return ConformalFactor(std::move(out));
}

FitResult fit_constant_curvature(const ConformalFactor& w) {
  const SphereGrid& g = *w.omega.grid;
  ScalarField inv(g);
  for (std::size_t n = 0; n < g.n_nodes(); ++n) inv.v[n] = 1.0 / w.omega.v[n];
  const HarmonicCoeffs c = analyze(inv, g.bandlimit());

  const double four_pi = 4.0 * std::numbers::pi;
  const double p = c(0, 0) / std::sqrt(four_pi);  // mean of 1/omega
  const double s3 = std::sqrt(3.0 / four_pi);
  // Cartesian l=1 block: x ~ Y_{1,1}, y ~ Y_{1,-1}, z ~ Y_{1,0}
  const double q[3] = {c(1, 1) * s3, c(1, -1) * s3, c(1, 0) * s3};
  const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
  if (!(p > 0.0) || p * p <= q2)
    throw std::runtime_error("fit_constant_curvature: l<=1 part of 1/omega is not a valid family member");

  FitResult out;
  out.params.c = 1.0 / std::sqrt(p * p - q2);
  for (int k = 0; k < 3; ++k) out.params.a[k] = q[k] * out.params.c;

  const double total = c.sum_squares();
  const double low = c(0, 0) * c(0, 0) + c(1, -1) * c(1, -1) + c(1, 0) * c(1, 0) + c(1, 1) * c(1, 1);
  out.residual = std::max(0.0, total - low) / total;
  return out;
}

}  // namespace lcflow::steady
