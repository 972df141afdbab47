#pragma once

namespace lcflow {

/// Second-order jet of a scalar at one grid node: value, coordinate
/// derivatives (d_theta, d_phi) and second derivatives. All geometric
/// quantities are rational in jets of omega, so +,-,*,/ suffice.
struct Jet2 {
  double v = 0, t = 0, p = 0, tt = 0, tp = 0, pp = 0;

  constexpr Jet2() = default;
  constexpr Jet2(double v_, double t_ = 0, double p_ = 0, double tt_ = 0, double tp_ = 0,
                 double pp_ = 0)
      : v(v_), t(t_), p(p_), tt(tt_), tp(tp_), pp(pp_) {}

  friend constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.t + b.t, a.p + b.p, a.tt + b.tt, a.tp + b.tp, a.pp + b.pp};
  }
  friend constexpr Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.t - b.t, a.p - b.p, a.tt - b.tt, a.tp - b.tp, a.pp - b.pp};
  }
  friend constexpr Jet2 operator-(const Jet2& a) {
    return {-a.v, -a.t, -a.p, -a.tt, -a.tp, -a.pp};
  }
  friend constexpr Jet2 operator+(const Jet2& a, double b) {
    return {a.v + b, a.t, a.p, a.tt, a.tp, a.pp};
  }
  friend constexpr Jet2 operator+(double b, const Jet2& a) { return a + b; }
  friend constexpr Jet2 operator-(const Jet2& a, double b) { return a + (-b); }
  friend constexpr Jet2 operator-(double b, const Jet2& a) { return (-a) + b; }
  friend constexpr Jet2 operator*(const Jet2& a, double b) {
    return {a.v * b, a.t * b, a.p * b, a.tt * b, a.tp * b, a.pp * b};
  }
  friend constexpr Jet2 operator*(double b, const Jet2& a) { return a * b; }
  friend constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.t * b.v + a.v * b.t,
            a.p * b.v + a.v * b.p,
            a.tt * b.v + 2.0 * a.t * b.t + a.v * b.tt,
            a.tp * b.v + a.t * b.p + a.p * b.t + a.v * b.tp,
            a.pp * b.v + 2.0 * a.p * b.p + a.v * b.pp};
  }
  constexpr Jet2 inv() const {
    const double iv = 1.0 / v;
    const double iv2 = iv * iv;
    return {iv,
            -t * iv2,
            -p * iv2,
            (2.0 * t * t * iv - tt) * iv2,
            (2.0 * t * p * iv - tp) * iv2,
            (2.0 * p * p * iv - pp) * iv2};
  }
  friend constexpr Jet2 operator/(const Jet2& a, const Jet2& b) { return a * b.inv(); }
  friend constexpr Jet2 operator/(const Jet2& a, double b) { return a * (1.0 / b); }
  friend constexpr Jet2 operator/(double a, const Jet2& b) { return b.inv() * a; }
};

/// First-order jet of d_theta f, taken from a Jet2 of f. Second-order slots
/// are not meaningful and are zeroed.
constexpr Jet2 d_theta(const Jet2& a) { return {a.t, a.tt, a.tp}; }
/// First-order jet of d_phi f.
constexpr Jet2 d_phi(const Jet2& a) { return {a.p, a.tp, a.pp}; }

}  // namespace lcflow
