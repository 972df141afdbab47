#include "lcflow/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lcflow/parallel.hpp"

namespace lcflow {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int k = 0; k < half; ++k) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double xi = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = xi;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) {
        // one clean-up iteration after convergence
        if (iter > 0 && std::abs(dx) < 1e-16) break;
      }
    }
    double p0 = 1.0, p1 = xi;
    for (int l = 2; l <= n; ++l) {
      const double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[k] = -xi;  // ascending
    x[n - 1 - k] = xi;
    w[k] = w[n - 1 - k] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

void legendre_row(int L, double z, double s, std::vector<double>& out) {
  out.assign(SphereGrid::lm_index(L, L) + 1, 0.0);
  out[SphereGrid::lm_index(0, 0)] = std::sqrt(0.5);
  for (int m = 1; m <= L; ++m) {
    out[SphereGrid::lm_index(m, m)] =
        std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * out[SphereGrid::lm_index(m - 1, m - 1)];
  }
  for (int m = 0; m < L; ++m) {
    out[SphereGrid::lm_index(m + 1, m)] =
        std::sqrt(2.0 * m + 3.0) * z * out[SphereGrid::lm_index(m, m)];
  }
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      const double b = std::sqrt(((2.0 * l + 1.0) * ((l - 1.0) * (l - 1.0) - m * m)) /
                                 ((2.0 * l - 3.0) * (static_cast<double>(l) * l - m * m)));
      out[SphereGrid::lm_index(l, m)] = a * z * out[SphereGrid::lm_index(l - 1, m)] -
                                        b * out[SphereGrid::lm_index(l - 2, m)];
    }
  }
}

SphereGrid SphereGrid::build(int L, double oversample) {
  if (L < 4) throw std::invalid_argument("grid bandlimit L must be >= 4");
  if (!(oversample >= 1.0) || !std::isfinite(oversample))
    throw std::invalid_argument("grid oversample must be finite and >= 1");

  SphereGrid g;
  g.L_ = L;
  g.oversample_ = oversample;
  g.n_theta_ = static_cast<int>(std::ceil(oversample * (L + 1)));
  g.n_phi_ = static_cast<int>(std::ceil(oversample * (2 * L + 1)));
  g.dphi_ = 2.0 * std::numbers::pi / g.n_phi_;
  g.max_bandlimit_ = std::min(g.n_theta_ - 1, (g.n_phi_ - 1) / 2);

  gauss_legendre(g.n_theta_, g.z_, g.w_);
  g.theta_.resize(g.n_theta_);
  g.sin_theta_.resize(g.n_theta_);
  // theta ascending <=> z descending
  std::vector<double> zrev(g.z_.rbegin(), g.z_.rend());
  std::vector<double> wrev(g.w_.rbegin(), g.w_.rend());
  g.z_ = zrev;
  g.w_ = wrev;
  for (int i = 0; i < g.n_theta_; ++i) {
    g.theta_[i] = std::acos(g.z_[i]);
    g.sin_theta_[i] = std::sqrt((1.0 - g.z_[i]) * (1.0 + g.z_[i]));
  }

  g.phi_.resize(g.n_phi_);
  for (int j = 0; j < g.n_phi_; ++j) g.phi_[j] = g.dphi_ * j;

  const int Lt = g.max_bandlimit_;
  const std::size_t nlm = g.n_lm();
  g.p_.resize(static_cast<std::size_t>(g.n_theta_) * nlm);
  g.dp_.resize(g.p_.size());
  parallel_for(g.n_theta_, [&](std::ptrdiff_t i) {
    std::vector<double> row;
    legendre_row(Lt, g.z_[i], g.sin_theta_[i], row);
    const std::size_t off = static_cast<std::size_t>(i) * nlm;
    for (std::size_t k = 0; k < nlm; ++k) g.p_[off + k] = row[k];
    // d/dtheta via  dP_lm = (l z P_lm - e_lm P_{l-1,m}) / sin(theta)
    const double z = g.z_[i], s = g.sin_theta_[i];
    for (int m = 0; m <= Lt; ++m) {
      for (int l = m; l <= Lt; ++l) {
        double e = 0.0, prev = 0.0;
        if (l > m) {
          e = std::sqrt(((2.0 * l + 1.0) * (static_cast<double>(l) * l - m * m)) / (2.0 * l - 1.0));
          prev = row[lm_index(l - 1, m)];
        }
        g.dp_[off + lm_index(l, m)] = (l * z * row[lm_index(l, m)] - e * prev) / s;
      }
    }
  });

  g.cosm_.resize(static_cast<std::size_t>(Lt + 1) * g.n_phi_);
  g.sinm_.resize(g.cosm_.size());
  for (int m = 0; m <= Lt; ++m) {
    for (int j = 0; j < g.n_phi_; ++j) {
      g.cosm_[static_cast<std::size_t>(m) * g.n_phi_ + j] = std::cos(m * g.phi_[j]);
      g.sinm_[static_cast<std::size_t>(m) * g.n_phi_ + j] = std::sin(m * g.phi_[j]);
    }
  }
  return g;
}

}  // namespace lcflow
