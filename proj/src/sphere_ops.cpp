#include "lcflow/sphere_ops.hpp"

#include "lcflow/parallel.hpp"

namespace lcflow::spectral {

ScalarField laplacian0(const HarmonicCoeffs& c, const SphereGrid& g) {
  return synthesize(apply_multiplier(c, [](int l) { return -static_cast<double>(l) * (l + 1); }),
                    g);
}

ScalarField laplacian0(const ScalarField& f) {
  return laplacian0(analyze(f, f.grid->bandlimit()), *f.grid);
}

VectorFieldSph gradient0(const ScalarField& f) {
  const SphereGrid& g = *f.grid;
  const DerivativeSet d = synth_derivatives(analyze(f, g.bandlimit()), g, 1);
  VectorFieldSph out(g);
  out.vt = d.get(1, 0);  // g0^tt d_t f
  parallel_for(g.n_theta(), [&](std::ptrdiff_t i) {
    const double inv_s2 = 1.0 / (g.sin_theta(static_cast<int>(i)) * g.sin_theta(static_cast<int>(i)));
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(static_cast<int>(i), j);
      out.vp.v[n] = d.get(0, 1).v[n] * inv_s2;  // g0^pp d_p f
    }
  });
  return out;
}

SymTensorField hessian0(const ScalarField& f) {
  const SphereGrid& g = *f.grid;
  const DerivativeSet d = synth_derivatives(analyze(f, g.bandlimit()), g, 2);
  SymTensorField out(g, MetricTag::Round);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double s = g.sin_theta(i), z = g.z(i);
    const double cot = z / s;
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      out.tt.v[n] = d.get(2, 0).v[n];
      out.tp.v[n] = d.get(1, 1).v[n] - cot * d.get(0, 1).v[n];
      out.pp.v[n] = d.get(0, 2).v[n] + s * z * d.get(1, 0).v[n];
    }
  });
  return out;
}

ScalarField norm0_sq(const VectorFieldSph& v) {
  const SphereGrid& g = *v.vt.grid;
  ScalarField out(g);
  parallel_for(g.n_theta(), [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.n_phi(); ++j) {
      const std::size_t n = g.node(i, j);
      out.v[n] = v.vt.v[n] * v.vt.v[n] + s2 * v.vp.v[n] * v.vp.v[n];
    }
  });
  return out;
}

}  // namespace lcflow::spectral
