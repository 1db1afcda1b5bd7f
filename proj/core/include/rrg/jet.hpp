#pragma once

#include <cmath>

namespace rrg {

// Second order jet of a scalar function of two variables:
// value, gradient (d[0], d[1]) and Hessian (h[0]=xx, h[1]=xy, h[2]=yy).
struct Jet {
  double v = 0.0;
  double d[2] = {0.0, 0.0};
  double h[3] = {0.0, 0.0, 0.0};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
  Jet(double value, double dx, double dy, double hxx, double hxy, double hyy)
      : v(value), d{dx, dy}, h{hxx, hxy, hyy} {}

  static Jet variable(double value, int axis) {
    Jet j(value);
    j.d[axis] = 1.0;
    return j;
  }

  // Chain rule for a scalar function with derivatives f0, f1, f2 at v.
  Jet apply(double f0, double f1, double f2) const {
    return {f0,
            f1 * d[0],
            f1 * d[1],
            f2 * d[0] * d[0] + f1 * h[0],
            f2 * d[0] * d[1] + f1 * h[1],
            f2 * d[1] * d[1] + f1 * h[2]};
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < 2; ++i) d[i] += o.d[i];
    for (int i = 0; i < 3; ++i) h[i] += o.h[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < 2; ++i) d[i] -= o.d[i];
    for (int i = 0; i < 3; ++i) h[i] -= o.h[i];
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    for (int i = 0; i < 2; ++i) d[i] *= s;
    for (int i = 0; i < 3; ++i) h[i] *= s;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }

inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v,
          a.d[0] * b.v + a.v * b.d[0],
          a.d[1] * b.v + a.v * b.d[1],
          a.h[0] * b.v + 2.0 * a.d[0] * b.d[0] + a.v * b.h[0],
          a.h[1] * b.v + a.d[0] * b.d[1] + a.d[1] * b.d[0] + a.v * b.h[1],
          a.h[2] * b.v + 2.0 * a.d[1] * b.d[1] + a.v * b.h[2]};
}

inline Jet recip(const Jet& a) {
  const double r = 1.0 / a.v;
  return a.apply(r, -r * r, 2.0 * r * r * r);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return a.apply(s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return a.apply(e, e, e);
}

inline Jet log(const Jet& a) { return a.apply(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

inline Jet tanh(const Jet& a) {
  const double t = std::tanh(a.v);
  const double s = 1.0 - t * t;
  return a.apply(t, s, -2.0 * t * s);
}

inline Jet sin(const Jet& a) { return a.apply(std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return a.apply(std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

}  // namespace rrg
