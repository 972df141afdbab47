#pragma once

#include "lcflow/field.hpp"
#include "lcflow/transform.hpp"

namespace lcflow::spectral {

/// Laplace-Beltrami operator of the round metric, spectral multiplier -l(l+1).
ScalarField laplacian0(const ScalarField& f);
ScalarField laplacian0(const HarmonicCoeffs& c, const SphereGrid& g);

/// Round gradient, contravariant components (V^theta, V^phi).
VectorFieldSph gradient0(const ScalarField& f);

/// Covariant Hessian of the round metric in coordinate components
/// (Christoffels of dOmega^2: Gamma^t_pp = -sin cos, Gamma^p_tp = cot).
SymTensorField hessian0(const ScalarField& f);

/// |V|^2_0 = (V^t)^2 + sin^2(theta) (V^p)^2 for contravariant components.
ScalarField norm0_sq(const VectorFieldSph& v);

/// Quadrature of f over the unit sphere (deterministic summation order).
inline double integrate(const ScalarField& f) { return lcflow::integrate(f); }

}  // namespace lcflow::spectral
