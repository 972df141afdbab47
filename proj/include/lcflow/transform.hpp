#pragma once

#include <functional>
#include <vector>

#include "lcflow/field.hpp"
#include "lcflow/jet.hpp"

namespace lcflow {

/// Forward transform: coefficients of the bandlimited interpolant through the
/// grid values. Exact (to round-off) when f is bandlimited at Lmax and
/// Lmax <= grid.max_bandlimit().
HarmonicCoeffs analyze(const ScalarField& f, int Lmax);
inline HarmonicCoeffs analyze(const ScalarField& f) { return analyze(f, f.grid->bandlimit()); }

ScalarField synthesize(const HarmonicCoeffs& c, const SphereGrid& g);

/// Coordinate derivatives d^a_theta d^b_phi f for all a+b <= order (order <= 4),
/// evaluated exactly at the nodes from the coefficients. Higher theta
/// derivatives use the associated Legendre ODE, so no finite differencing and
/// no re-analysis is involved.
struct DerivativeSet {
  const SphereGrid* grid = nullptr;
  int order = 0;
  std::vector<ScalarField> d;

  static int slot(int a, int b) {
    const int k = a + b;
    return k * (k + 1) / 2 + b;
  }
  const ScalarField& get(int a, int b) const { return d[slot(a, b)]; }

  /// Jet2 of d^a_theta d^b_phi f at a node. Slots beyond the held order are
  /// zero; callers must only rely on jet entries within a+b+2 <= order.
  Jet2 jet(int a, int b, std::size_t n) const {
    const auto val = [&](int aa, int bb) {
      return (aa + bb <= order) ? d[slot(aa, bb)].v[n] : 0.0;
    };
    return {val(a, b),     val(a + 1, b),     val(a, b + 1),
            val(a + 2, b), val(a + 1, b + 1), val(a, b + 2)};
  }
};

DerivativeSet synth_derivatives(const HarmonicCoeffs& c, const SphereGrid& g, int order);

/// Point evaluation of a coefficient set at arbitrary (cos(theta), phi).
double evaluate_at(const HarmonicCoeffs& c, double z, double phi);

/// Quadrature of f over S^2: sum_ij f_ij w_i dphi. Fixed summation order
/// (rows combined in index order), bit-identical for any thread count.
double integrate(const ScalarField& f);

/// New coefficient set with c_lm scaled by mult(l).
HarmonicCoeffs apply_multiplier(const HarmonicCoeffs& c, const std::function<double(int)>& mult);

/// Naive serial reference transforms (direct double sums); kept for testing
/// the production kernels against.
namespace ref {
HarmonicCoeffs analyze(const ScalarField& f, int Lmax);
ScalarField synthesize(const HarmonicCoeffs& c, const SphereGrid& g);
double integrate(const ScalarField& f);
}  // namespace ref

}  // namespace lcflow
