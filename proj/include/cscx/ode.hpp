#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cscx/common.hpp"

#ifdef __SIZEOF_FLOAT128__
#include <quadmath.h>
#endif

namespace cscx {

namespace detail {
template <class S>
inline S nt_abs(S x) {
  return x < S(0) ? -x : x;
}
inline double nt_root5(double x) { return std::pow(x, 0.2); }
inline long double nt_root5(long double x) { return std::pow(x, 0.2L); }
inline double nt_sqrt(double x) { return std::sqrt(x); }
inline long double nt_sqrt(long double x) { return std::sqrt(x); }
#ifdef __SIZEOF_FLOAT128__
inline __float128 nt_root5(__float128 x) { return powq(x, __float128(0.2Q)); }
inline __float128 nt_sqrt(__float128 x) { return sqrtq(x); }
#endif
template <class S>
inline S nt_max(S a, S b) {
  return a > b ? a : b;
}
template <class S>
inline S nt_min(S a, S b) {
  return a < b ? a : b;
}
}  // namespace detail

// One accepted integration node: abscissa, state, and state derivative.  The
// derivative comes for free from the FSAL structure and feeds Hermite
// interpolation downstream.
template <class S>
struct OdeNode {
  S t;
  std::vector<S> y;
  std::vector<S> yp;
};

template <class S>
struct OdeSolution {
  std::vector<OdeNode<S>> nodes;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;

  const std::vector<S>& final_state() const { return nodes.back().y; }
};

// Adaptive Dormand-Prince 5(4) with FSAL, templated on the scalar so the same
// integrator runs in double and in quad precision.  rhs(t, y, dydt) fills the
// derivative in place.  `stops` (sorted, inside (t0, t1]) are hit exactly by
// clamping the step.  With keep_all_nodes = false only the initial node, the
// stop nodes and the final node are recorded, so tight-tolerance runs do not
// hold millions of states.
template <class S, class Rhs>
OdeSolution<S> integrate_dopri5(Rhs&& rhs, S t0, S t1, std::vector<S> y0, S rtol, S atol,
                                const std::vector<S>& stops = {},
                                bool keep_all_nodes = true,
                                std::size_t max_steps = 2000000) {
  using detail::nt_abs;
  using detail::nt_max;
  using detail::nt_min;

  const S c2 = S(1) / S(5), c3 = S(3) / S(10), c4 = S(4) / S(5), c5 = S(8) / S(9);
  const S a21 = S(1) / S(5);
  const S a31 = S(3) / S(40), a32 = S(9) / S(40);
  const S a41 = S(44) / S(45), a42 = S(-56) / S(15), a43 = S(32) / S(9);
  const S a51 = S(19372) / S(6561), a52 = S(-25360) / S(2187), a53 = S(64448) / S(6561),
          a54 = S(-212) / S(729);
  const S a61 = S(9017) / S(3168), a62 = S(-355) / S(33), a63 = S(46732) / S(5247),
          a64 = S(49) / S(176), a65 = S(-5103) / S(18656);
  const S b1 = S(35) / S(384), b3 = S(500) / S(1113), b4 = S(125) / S(192),
          b5 = S(-2187) / S(6784), b6 = S(11) / S(84);
  const S e1 = S(71) / S(57600), e3 = S(-71) / S(16695), e4 = S(71) / S(1920),
          e5 = S(-17253) / S(339200), e6 = S(22) / S(525), e7 = S(-1) / S(40);

  const std::size_t n = y0.size();
  std::vector<S> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  OdeSolution<S> sol;
  S t = t0;
  std::vector<S> y = std::move(y0);
  rhs(t, y, k1);
  sol.nodes.push_back({t, y, k1});

  const S span = t1 - t0;
  require(span > S(0), Status::InvalidArgument, "integrate_dopri5: need t1 > t0");

  // Initial step from the usual |y|/|y'| heuristic, clipped to the span.
  S h;
  {
    S d0 = S(0), d1 = S(0);
    for (std::size_t i = 0; i < n; ++i) {
      const S sc = atol + rtol * nt_abs(y[i]);
      d0 = nt_max(d0, nt_abs(y[i]) / sc);
      d1 = nt_max(d1, nt_abs(k1[i]) / sc);
    }
    h = (d1 > S(0)) ? S(0.01) * (nt_max(d0, S(1)) / d1) : span / S(100);
    h = nt_min(h, span / S(10));
    h = nt_max(h, span * S(1e-12));
  }

  std::size_t stop_idx = 0;
  while (stop_idx < stops.size() && stops[stop_idx] <= t0) ++stop_idx;

  const S safety = S(9) / S(10);
  std::size_t iter = 0;
  while (t < t1) {
    require(++iter <= max_steps, Status::IntegrationFailure,
            "integrate_dopri5: step budget exhausted");
    S target = t1;
    if (stop_idx < stops.size() && stops[stop_idx] < target) target = stops[stop_idx];
    if (t + h > target) h = target - t;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);

    S err = S(0);
    for (std::size_t i = 0; i < n; ++i) {
      const S e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                       e7 * k7[i]);
      const S sc = atol + rtol * nt_max(nt_abs(y[i]), nt_abs(ynew[i]));
      err = nt_max(err, nt_abs(e) / sc);
    }

    if (err <= S(1)) {
      t = t + h;
      y = ynew;
      k1 = k7;  // FSAL
      bool at_stop = false;
      while (stop_idx < stops.size() && stops[stop_idx] <= t) {
        ++stop_idx;
        at_stop = true;
      }
      if (keep_all_nodes || at_stop || !(t < t1)) sol.nodes.push_back({t, y, k1});
      ++sol.steps_accepted;
      const S grow = (err > S(0)) ? nt_min(S(5), safety / detail::nt_root5(err)) : S(5);
      h = h * grow;
    } else {
      ++sol.steps_rejected;
      h = h * nt_max(S(1) / S(10), safety / detail::nt_root5(err));
      require(t + h > t, Status::IntegrationFailure, "integrate_dopri5: step size underflow");
    }
  }
  return sol;
}

}  // namespace cscx
