#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lcflow/grid.hpp"

namespace lcflow {

/// Scalar field sampled on a SphereGrid, row-major [i_theta][j_phi].
struct ScalarField {
  const SphereGrid* grid = nullptr;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const SphereGrid& g) : grid(&g), v(g.n_nodes(), 0.0) {}

  double& operator()(int i, int j) { return v[grid->node(i, j)]; }
  double operator()(int i, int j) const { return v[grid->node(i, j)]; }

  bool finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
  double min() const {
    double m = v[0];
    for (double x : v) m = std::min(m, x);
    return m;
  }
  double max() const {
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

/// Vector field in the coordinate basis (d_theta, d_phi) of the round metric;
/// components are contravariant, so |V|^2_0 = vt^2 + sin^2(theta) vp^2.
struct VectorFieldSph {
  ScalarField vt, vp;
  VectorFieldSph() = default;
  explicit VectorFieldSph(const SphereGrid& g) : vt(g), vp(g) {}
};

/// One-form (covariant components); used for zeta = -d(omega)/omega.
struct CovectorFieldSph {
  ScalarField ct, cp;
  CovectorFieldSph() = default;
  explicit CovectorFieldSph(const SphereGrid& g) : ct(g), cp(g) {}
};

enum class MetricTag { Round, Conformal };

/// Symmetric (0,2) tensor, covariant coordinate components (tt, tp, pp).
struct SymTensorField {
  ScalarField tt, tp, pp;
  MetricTag metric = MetricTag::Conformal;
  SymTensorField() = default;
  explicit SymTensorField(const SphereGrid& g, MetricTag tag = MetricTag::Conformal)
      : tt(g), tp(g), pp(g), metric(tag) {}
};

/// (0,3) tensor symmetric in the last two slots: components D[i](jk) with
/// i in {theta, phi} and jk in {tt, tp, pp}.
struct Tensor3Field {
  ScalarField ttt, ttp, tpp;  // nabla_theta T_jk
  ScalarField ptt, ptp, ppp;  // nabla_phi   T_jk
  Tensor3Field() = default;
  explicit Tensor3Field(const SphereGrid& g)
      : ttt(g), ttp(g), tpp(g), ptt(g), ptp(g), ppp(g) {}
};

/// Real spherical-harmonic coefficients, fully normalized
/// (int Y_lm^2 dOmega = 1), indexed (l, m) with -l <= m <= l.
struct HarmonicCoeffs {
  int L = 0;
  std::vector<double> c;  // size (L+1)^2, index l*l + l + m

  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(int bandlimit)
      : L(bandlimit), c(static_cast<std::size_t>(bandlimit + 1) * (bandlimit + 1), 0.0) {}

  static std::size_t index(int l, int m) {
    return static_cast<std::size_t>(l) * l + l + m;
  }
  double& operator()(int l, int m) { return c[index(l, m)]; }
  double operator()(int l, int m) const { return c[index(l, m)]; }

  double sum_squares() const {
    double s = 0.0;
    for (double x : c) s += x * x;
    return s;
  }
};

/// Positive conformal factor; the cross section is the graph r = omega.
struct ConformalFactor {
  ScalarField omega;

  ConformalFactor() = default;
  explicit ConformalFactor(ScalarField w) : omega(std::move(w)) {
    if (!omega.finite()) throw std::invalid_argument("omega has non-finite entries");
    if (omega.min() <= 0.0) throw std::invalid_argument("omega must be positive everywhere");
  }
};

}  // namespace lcflow
