#pragma once

#include <cmath>

namespace cscx {

// First-order dual number: carries one directional derivative through
// arithmetic.  Used to differentiate curvature formulas exactly instead of
// finite-differencing them.
struct Dual {
  double v = 0.0;  // value
  double d = 0.0;  // derivative

  Dual() = default;
  Dual(double value) : v(value), d(0.0) {}
  Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}
inline Dual operator+(double a, Dual b) { return Dual(a) + b; }
inline Dual operator-(double a, Dual b) { return Dual(a) - b; }
inline Dual operator*(double a, Dual b) { return Dual(a) * b; }
inline Dual operator/(double a, Dual b) { return Dual(a) / b; }
inline Dual operator+(Dual a, double b) { return a + Dual(b); }
inline Dual operator-(Dual a, double b) { return a - Dual(b); }
inline Dual operator*(Dual a, double b) { return a * Dual(b); }
inline Dual operator/(Dual a, double b) { return a / Dual(b); }

inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline Dual exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
inline Dual sqrt(Dual a) {
  const double r = std::sqrt(a.v);
  return {r, 0.5 * a.d / r};
}
inline Dual pow(Dual a, double p) {
  const double f = std::pow(a.v, p);
  return {f, p * std::pow(a.v, p - 1.0) * a.d};
}

// Truncated Taylor jet: value and first four derivatives with respect to one
// scalar variable.  Enough to push a potential through the curvature formulas,
// which consume exactly four derivatives.
struct Jet4 {
  long double f[5] = {0, 0, 0, 0, 0};

  Jet4() = default;
  Jet4(long double c) { f[0] = c; }
  static Jet4 variable(long double x) {
    Jet4 j;
    j.f[0] = x;
    j.f[1] = 1;
    return j;
  }
};

inline Jet4 operator+(const Jet4& a, const Jet4& b) {
  Jet4 r;
  for (int i = 0; i < 5; ++i) r.f[i] = a.f[i] + b.f[i];
  return r;
}
inline Jet4 operator-(const Jet4& a, const Jet4& b) {
  Jet4 r;
  for (int i = 0; i < 5; ++i) r.f[i] = a.f[i] - b.f[i];
  return r;
}
inline Jet4 operator-(const Jet4& a) {
  Jet4 r;
  for (int i = 0; i < 5; ++i) r.f[i] = -a.f[i];
  return r;
}

// Derivative coefficients multiply like scaled Taylor coefficients; binomial
// weights restore the product rule at each order.
inline Jet4 operator*(const Jet4& a, const Jet4& b) {
  static const long double binom[5][5] = {{1, 0, 0, 0, 0},
                                          {1, 1, 0, 0, 0},
                                          {1, 2, 1, 0, 0},
                                          {1, 3, 3, 1, 0},
                                          {1, 4, 6, 4, 1}};
  Jet4 r;
  for (int n = 0; n < 5; ++n) {
    long double s = 0;
    for (int k = 0; k <= n; ++k) s += binom[n][k] * a.f[k] * b.f[n - k];
    r.f[n] = s;
  }
  return r;
}

// Composes g(a) where g is given by its derivatives at a.f[0] (Faa di Bruno,
// hard-coded to order four).
inline Jet4 compose(const long double g[5], const Jet4& a) {
  const long double a1 = a.f[1], a2 = a.f[2], a3 = a.f[3], a4 = a.f[4];
  Jet4 r;
  r.f[0] = g[0];
  r.f[1] = g[1] * a1;
  r.f[2] = g[2] * a1 * a1 + g[1] * a2;
  r.f[3] = g[3] * a1 * a1 * a1 + 3 * g[2] * a1 * a2 + g[1] * a3;
  r.f[4] = g[4] * a1 * a1 * a1 * a1 + 6 * g[3] * a1 * a1 * a2 +
           g[2] * (3 * a2 * a2 + 4 * a1 * a3) + g[1] * a4;
  return r;
}

inline Jet4 inv(const Jet4& a) {
  const long double x = a.f[0];
  const long double g[5] = {1 / x, -1 / (x * x), 2 / (x * x * x), -6 / (x * x * x * x),
                            24 / (x * x * x * x * x)};
  return compose(g, a);
}
inline Jet4 operator/(const Jet4& a, const Jet4& b) { return a * inv(b); }
inline Jet4 operator*(long double c, const Jet4& a) {
  Jet4 r;
  for (int i = 0; i < 5; ++i) r.f[i] = c * a.f[i];
  return r;
}
inline Jet4 operator+(long double c, const Jet4& a) { return Jet4(c) + a; }
inline Jet4 operator-(long double c, const Jet4& a) { return Jet4(c) - a; }

inline Jet4 log(const Jet4& a) {
  const long double x = a.f[0];
  const long double g[5] = {std::log((double)x), 1 / x, -1 / (x * x), 2 / (x * x * x),
                            -6 / (x * x * x * x)};
  return compose(g, a);
}

inline Jet4 pow(const Jet4& a, long double p) {
  const long double x = a.f[0];
  long double g[5];
  g[0] = powl(x, p);
  g[1] = p * powl(x, p - 1);
  g[2] = p * (p - 1) * powl(x, p - 2);
  g[3] = p * (p - 1) * (p - 2) * powl(x, p - 3);
  g[4] = p * (p - 1) * (p - 2) * (p - 3) * powl(x, p - 4);
  return compose(g, a);
}

inline Jet4 sqrt(const Jet4& a) { return pow(a, 0.5L); }

inline Jet4 exp(const Jet4& a) {
  const long double e = expl(a.f[0]);
  const long double g[5] = {e, e, e, e, e};
  return compose(g, a);
}

}  // namespace cscx
