#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "lcflow/field.hpp"
#include "lcflow/steady.hpp"
#include "lcflow/transform.hpp"

namespace lcflow::testing {

inline ScalarField constant_field(const SphereGrid& g, double c) {
  ScalarField f(g);
  for (double& x : f.v) x = c;
  return f;
}

/// Sample an analytic function of (z, phi) on the grid.
inline ScalarField sample(const SphereGrid& g, const std::function<double(double, double)>& fn) {
  ScalarField f(g);
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) f.v[g.node(i, j)] = fn(g.z(i), g.phi(j));
  return f;
}

inline ScalarField ylm_field(const SphereGrid& g, int l, int m) {
  HarmonicCoeffs c(g.bandlimit());
  c(l, m) = 1.0;
  return synthesize(c, g);
}

/// Dense Simpson quadrature over the sphere of an analytic integrand;
/// independent of the Gauss-Legendre grid.
inline double simpson_sphere(const std::function<double(double, double)>& fn, int n_theta = 801,
                             int n_phi = 400) {
  const double pi = std::numbers::pi;
  double total = 0.0;
  const double h = pi / (n_theta - 1);
  for (int i = 0; i < n_theta; ++i) {
    const double theta = i * h;
    double wi = (i == 0 || i == n_theta - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double ring = 0.0;
    const double dphi = 2.0 * pi / n_phi;
    for (int j = 0; j < n_phi; ++j) ring += fn(std::cos(theta), j * dphi);
    total += wi * ring * dphi * std::sin(theta);
  }
  return total * h / 3.0;
}

/// Random bandlimited field with coefficients in [-amp, amp] for l <= lmax.
inline ScalarField random_bandlimited(const SphereGrid& g, int lmax, double amp,
                                      std::uint64_t seed) {
  HarmonicCoeffs c(g.bandlimit());
  std::uint64_t state = seed;
  const auto u01 = [&]() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  };
  for (int l = 0; l <= std::min(lmax, g.bandlimit()); ++l)
    for (int m = -l; m <= l; ++m) c(l, m) = amp * (2.0 * u01() - 1.0);
  return synthesize(c, g);
}

inline ConformalFactor omega_zonal(const SphereGrid& g, double eps = 0.1) {
  return ConformalFactor(sample(g, [eps](double z, double) { return 1.0 + eps * z; }));
}

/// The standard generic test factor 1 + 0.1 z + 0.05 Y21.
inline ConformalFactor omega_generic(const SphereGrid& g) {
  ScalarField f = sample(g, [](double z, double) { return 1.0 + 0.1 * z; });
  const ScalarField y = ylm_field(g, 2, 1);
  for (std::size_t n = 0; n < f.v.size(); ++n) f.v[n] += 0.05 * y.v[n];
  return ConformalFactor(std::move(f));
}

}  // namespace lcflow::testing
