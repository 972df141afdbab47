#include "lcflow/transform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lcflow/parallel.hpp"

namespace lcflow {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;  // 1/sqrt(2 pi)
constexpr double kInvSqrtPi = 0.5641895835477562869480795;   // 1/sqrt(pi)

void check_bandlimit(const SphereGrid& g, int L) {
  if (L < 0 || L > g.max_bandlimit())
    throw std::invalid_argument("bandlimit mismatch: requested L exceeds what the grid resolves");
}
}  // namespace

HarmonicCoeffs analyze(const ScalarField& f, int Lmax) {
  const SphereGrid& g = *f.grid;
  check_bandlimit(g, Lmax);
  if (!f.finite()) throw std::invalid_argument("analyze: non-finite input field");

  const int nt = g.n_theta(), np = g.n_phi();
  // Fourier stage: F[i][m] = sum_j f_ij trig(m phi_j) * dphi
  std::vector<double> Fc(static_cast<std::size_t>(nt) * (Lmax + 1));
  std::vector<double> Fs(Fc.size());
  parallel_for(nt, [&](std::ptrdiff_t i) {
    for (int m = 0; m <= Lmax; ++m) {
      double sc = 0.0, ss = 0.0;
      for (int j = 0; j < np; ++j) {
        const double x = f.v[g.node(static_cast<int>(i), j)];
        sc += x * g.cos_mphi(m, j);
        ss += x * g.sin_mphi(m, j);
      }
      Fc[i * (Lmax + 1) + m] = sc * g.dphi();
      Fs[i * (Lmax + 1) + m] = ss * g.dphi();
    }
  });

  // Legendre stage: one output coefficient row per l, fixed order over i.
  HarmonicCoeffs out(Lmax);
  parallel_for(Lmax + 1, [&](std::ptrdiff_t l) {
    for (int m = 0; m <= static_cast<int>(l); ++m) {
      double sc = 0.0, ss = 0.0;
      for (int i = 0; i < nt; ++i) {
        const double pw = g.plm(i, static_cast<int>(l), m) * g.weight(i);
        sc += pw * Fc[static_cast<std::size_t>(i) * (Lmax + 1) + m];
        if (m > 0) ss += pw * Fs[static_cast<std::size_t>(i) * (Lmax + 1) + m];
      }
      if (m == 0) {
        out(static_cast<int>(l), 0) = sc * kInvSqrt2Pi;
      } else {
        out(static_cast<int>(l), m) = sc * kInvSqrtPi;
        out(static_cast<int>(l), -m) = ss * kInvSqrtPi;
      }
    }
  });
  return out;
}

DerivativeSet synth_derivatives(const HarmonicCoeffs& c, const SphereGrid& g, int order) {
  if (order < 0 || order > 4) throw std::invalid_argument("derivative order must be in [0,4]");
  check_bandlimit(g, c.L);

  DerivativeSet out;
  out.grid = &g;
  out.order = order;
  const int nslots = DerivativeSet::slot(0, order) + 1;
  out.d.reserve(nslots);
  for (int s = 0; s < nslots; ++s) out.d.emplace_back(g);

  const int nt = g.n_theta(), np = g.n_phi(), Lc = c.L;
  parallel_for(nt, [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    const double z = g.z(i), s = g.sin_theta(i);
    const double cot = z / s, inv_s2 = 1.0 / (s * s);
    std::vector<double> row(static_cast<std::size_t>(nslots) * np, 0.0);
    for (int m = 0; m <= Lc; ++m) {
      // Legendre partial sums: plain, theta-derivative, and lambda-weighted.
      double S0c = 0, S1c = 0, S0lc = 0, S1lc = 0, S0llc = 0;
      double S0s = 0, S1s = 0, S0ls = 0, S1ls = 0, S0lls = 0;
      const double nrm = (m == 0) ? kInvSqrt2Pi : kInvSqrtPi;
      for (int l = m; l <= Lc; ++l) {
        const double lam = static_cast<double>(l) * (l + 1);
        const double B = g.plm(i, l, m) * nrm;
        const double dB = g.dplm(i, l, m) * nrm;
        const double cc = c(l, m);
        S0c += cc * B;
        S1c += cc * dB;
        S0lc += lam * cc * B;
        S1lc += lam * cc * dB;
        S0llc += lam * lam * cc * B;
        if (m > 0) {
          const double cs = c(l, -m);
          S0s += cs * B;
          S1s += cs * dB;
          S0ls += lam * cs * B;
          S1ls += lam * cs * dB;
          S0lls += lam * lam * cs * B;
        }
      }
      // theta-derivative sums via the associated Legendre ODE,
      // B'' = -cot B' + (m^2/s^2 - lambda) B, iterated for orders 3 and 4.
      const double m2 = static_cast<double>(m) * m;
      auto theta_chain = [&](double S0, double S1, double S0l, double S1l, double S0ll,
                             double D[5]) {
        D[0] = S0;
        D[1] = S1;
        D[2] = -cot * S1 + m2 * inv_s2 * S0 - S0l;
        const double D2l = -cot * S1l + m2 * inv_s2 * S0l - S0ll;
        D[3] = -cot * D[2] + (1.0 + m2) * inv_s2 * S1 - 2.0 * m2 * (z / (s * s * s)) * S0 - S1l;
        D[4] = -cot * D[3] + (2.0 + m2) * inv_s2 * D[2] -
               2.0 * (1.0 + 2.0 * m2) * (z / (s * s * s)) * S1 +
               2.0 * m2 * (inv_s2 + 3.0 * z * z * inv_s2 * inv_s2) * S0 - D2l;
      };
      double Dc[5], Ds[5];
      theta_chain(S0c, S1c, S0lc, S1lc, S0llc, Dc);
      theta_chain(S0s, S1s, S0ls, S1ls, S0lls, Ds);

      for (int a = 0; a <= order; ++a) {
        double gc = Dc[a], gs = Ds[a];
        for (int b = 0; a + b <= order; ++b) {
          if (b > 0) {  // one phi-derivative: cos -> -m sin, sin -> m cos
            const double ngc = m * gs, ngs = -m * gc;
            gc = ngc;
            gs = ngs;
          }
          if (gc == 0.0 && gs == 0.0) continue;
          double* dst = row.data() + static_cast<std::size_t>(DerivativeSet::slot(a, b)) * np;
          const double* cm = g.cos_row(m);
          const double* sm = g.sin_row(m);
          for (int j = 0; j < np; ++j) dst[j] += gc * cm[j] + gs * sm[j];
        }
      }
    }
    for (int slot = 0; slot < nslots; ++slot) {
      double* dst = out.d[slot].v.data() + g.node(i, 0);
      const double* src = row.data() + static_cast<std::size_t>(slot) * np;
      for (int j = 0; j < np; ++j) dst[j] = src[j];
    }
  });
  return out;
}

ScalarField synthesize(const HarmonicCoeffs& c, const SphereGrid& g) {
  DerivativeSet d = synth_derivatives(c, g, 0);
  return std::move(d.d[0]);
}

double evaluate_at(const HarmonicCoeffs& c, double z, double phi) {
  const double s = std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z)));
  std::vector<double> row;
  legendre_row(c.L, z, s, row);
  double tot = 0.0;
  for (int m = 0; m <= c.L; ++m) {
    double sc = 0.0, ss = 0.0;
    for (int l = m; l <= c.L; ++l) {
      const double B = row[SphereGrid::lm_index(l, m)];
      sc += c(l, m) * B;
      if (m > 0) ss += c(l, -m) * B;
    }
    if (m == 0)
      tot += sc * kInvSqrt2Pi;
    else
      tot += (sc * std::cos(m * phi) + ss * std::sin(m * phi)) * kInvSqrtPi;
  }
  return tot;
}

double integrate(const ScalarField& f) {
  if (!f.finite()) throw std::invalid_argument("integrate: non-finite input field");
  const SphereGrid& g = *f.grid;
  const int nt = g.n_theta(), np = g.n_phi();
  std::vector<double> partial(nt, 0.0);
  parallel_for(nt, [&](std::ptrdiff_t i) {
    double s = 0.0;
    const double* src = f.v.data() + g.node(static_cast<int>(i), 0);
    for (int j = 0; j < np; ++j) s += src[j];
    partial[i] = s * g.weight(static_cast<int>(i));
  });
  double tot = 0.0;
  for (double p : partial) tot += p;
  return tot * g.dphi();
}

HarmonicCoeffs apply_multiplier(const HarmonicCoeffs& c, const std::function<double(int)>& mult) {
  HarmonicCoeffs out(c.L);
  for (int l = 0; l <= c.L; ++l) {
    const double f = mult(l);
    for (int m = -l; m <= l; ++m) out(l, m) = f * c(l, m);
  }
  return out;
}

namespace ref {

HarmonicCoeffs analyze(const ScalarField& f, int Lmax) {
  const SphereGrid& g = *f.grid;
  check_bandlimit(g, Lmax);
  HarmonicCoeffs out(Lmax);
  for (int l = 0; l <= Lmax; ++l) {
    for (int m = 0; m <= l; ++m) {
      double sc = 0.0, ss = 0.0;
      for (int i = 0; i < g.n_theta(); ++i) {
        for (int j = 0; j < g.n_phi(); ++j) {
          const double base = f.v[g.node(i, j)] * g.plm(i, l, m) * g.weight(i) * g.dphi();
          sc += base * g.cos_mphi(m, j);
          if (m > 0) ss += base * g.sin_mphi(m, j);
        }
      }
      if (m == 0) {
        out(l, 0) = sc * kInvSqrt2Pi;
      } else {
        out(l, m) = sc * kInvSqrtPi;
        out(l, -m) = ss * kInvSqrtPi;
      }
    }
  }
  return out;
}

ScalarField synthesize(const HarmonicCoeffs& c, const SphereGrid& g) {
  check_bandlimit(g, c.L);
  ScalarField out(g);
  for (int i = 0; i < g.n_theta(); ++i) {
    for (int j = 0; j < g.n_phi(); ++j) {
      double tot = 0.0;
      for (int l = 0; l <= c.L; ++l) {
        tot += c(l, 0) * g.plm(i, l, 0) * kInvSqrt2Pi;
        for (int m = 1; m <= l; ++m) {
          tot += (c(l, m) * g.cos_mphi(m, j) + c(l, -m) * g.sin_mphi(m, j)) * g.plm(i, l, m) *
                 kInvSqrtPi;
        }
      }
      out.v[g.node(i, j)] = tot;
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  const SphereGrid& g = *f.grid;
  double tot = 0.0;
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) tot += f.v[g.node(i, j)] * g.weight(i);
  return tot * g.dphi();
}

}  // namespace ref
}  // namespace lcflow
