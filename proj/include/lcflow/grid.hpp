#pragma once

#include <cstddef>
#include <vector>

namespace lcflow {

/// Quadrature grid on S^2: Gauss-Legendre nodes in cos(theta) times equispaced
/// longitudes, with precomputed normalized associated Legendre tables.
///
/// Colatitude nodes carry Gauss-Legendre weights with sum(w) = 2; there is no
/// node at either pole. n_theta = ceil(oversample*(L+1)),
/// n_phi = ceil(oversample*(2L+1)).
class SphereGrid {
 public:
  static SphereGrid build(int L, double oversample = 2.0);

  int bandlimit() const { return L_; }
  double oversample() const { return oversample_; }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  std::size_t n_nodes() const {
    return static_cast<std::size_t>(n_theta_) * n_phi_;
  }

  /// Largest bandlimit for which analysis of a bandlimited field is exact on
  /// this grid (quadrature degree and longitude count both suffice).
  int max_bandlimit() const { return max_bandlimit_; }

  double z(int i) const { return z_[i]; }              // cos(theta_i)
  double weight(int i) const { return w_[i]; }         // GL weight
  double theta(int i) const { return theta_[i]; }
  double sin_theta(int i) const { return sin_theta_[i]; }
  double phi(int j) const { return phi_[j]; }
  double dphi() const { return dphi_; }

  /// Normalized associated Legendre P_lm(theta_i) with
  /// int_0^pi P_lm^2 sin(theta) dtheta = 1, no Condon-Shortley phase.
  double plm(int i, int l, int m) const { return p_[row(i) + lm_index(l, m)]; }
  /// d/dtheta of plm at node i.
  double dplm(int i, int l, int m) const { return dp_[row(i) + lm_index(l, m)]; }

  double cos_mphi(int m, int j) const { return cosm_[static_cast<std::size_t>(m) * n_phi_ + j]; }
  double sin_mphi(int m, int j) const { return sinm_[static_cast<std::size_t>(m) * n_phi_ + j]; }
  const double* cos_row(int m) const { return cosm_.data() + static_cast<std::size_t>(m) * n_phi_; }
  const double* sin_row(int m) const { return sinm_.data() + static_cast<std::size_t>(m) * n_phi_; }

  static std::size_t lm_index(int l, int m) {  // 0 <= m <= l
    return static_cast<std::size_t>(l) * (l + 1) / 2 + m;
  }
  std::size_t n_lm() const { return lm_index(max_bandlimit_, max_bandlimit_) + 1; }

  std::size_t node(int i, int j) const {
    return static_cast<std::size_t>(i) * n_phi_ + j;
  }

 private:
  std::size_t row(int i) const { return static_cast<std::size_t>(i) * n_lm(); }

  int L_ = 0;
  double oversample_ = 2.0;
  int n_theta_ = 0;
  int n_phi_ = 0;
  int max_bandlimit_ = 0;
  double dphi_ = 0.0;
  std::vector<double> z_, w_, theta_, sin_theta_, phi_;
  std::vector<double> p_, dp_;       // [i * n_lm + lm_index]
  std::vector<double> cosm_, sinm_;  // [m * n_phi + j]
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Normalized associated Legendre values P_lm(z) for all l <= L, 0 <= m <= l,
/// written into out[lm_index(l, m)]. Same normalization as SphereGrid::plm.
void legendre_row(int L, double z, double s, std::vector<double>& out);

}  // namespace lcflow
