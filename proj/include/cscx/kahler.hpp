#pragma once

#include <functional>

#include "cscx/dual.hpp"
#include "cscx/profile.hpp"

namespace cscx {

// Metric eigenvalues of i ddbar F(|z|^2): F' on the sphere directions
// (multiplicity m-1), F' + s F'' on the radial one, det = product.
struct RadialMetricData {
  double g_tangent = 0.0;
  double g_radial = 0.0;
  double det_g = 0.0;
};

// Scalar curvature of a rotationally symmetric Kahler metric from the radial
// derivative stack (p, q, c3, d4) = (F', F'', F''', F'''').  Riemannian
// normalization: twice the complex trace of Ricci, so that on the flat cell
// the linearization is half the squared Euclidean Laplacian.  Templated so
// the same expression can be differentiated with dual numbers.
template <class T>
T scal_from_derivs(T s, T p, T q, T c3, T d4, int m) {
  const double mm = double(m);
  T G = p + s * q;
  T Gp = 2.0 * q + s * c3;
  T Gpp = 3.0 * c3 + s * d4;
  // f = log det g = (m-1) log p + log G; Ricci is -ddbar f.
  T fp = (mm - 1.0) * q / p + Gp / G;
  T fpp = (mm - 1.0) * (c3 * p - q * q) / (p * p) + (Gpp * G - Gp * Gp) / (G * G);
  return -2.0 * (fp * (mm * p + (mm - 1.0) * s * q) / (p * G) + s * fpp / G);
}

RadialMetricData radial_metric_data(const RadialProfile& F, double s);
double radial_scalar_curvature(const RadialProfile& F, double s);

// Flat-metric Laplacian of the radial function u(s): 4 s u'' + 4 m u'.
double flat_laplacian(const ProfileJet& j, double s, int m);

// A radial function without a derivative tower: output type of the linearized
// operator and the nonlinear remainder.
struct RadialFunction {
  double s_min = 0.0;
  double s_max = 0.0;
  std::function<double(double)> eval;

  double operator()(double s) const { return eval(s); }
};

// L phi = -d/dt scal(F + t phi) at t = 0 (so that scal(F + phi) = scal(F)
// - L phi + Q).  Computed by exact forward-mode differentiation of the radial
// closed form.
double linearized_scal_eval(const RadialProfile& F, const RadialProfile& phi, double s);
RadialFunction linearized_scal_apply(ProfilePtr F, ProfilePtr phi);

// Q = scal(F + phi) - scal(F) + L phi; quadratically small in phi.
double nonlinear_remainder_eval(const RadialProfile& F, const RadialProfile& phi, double s);
RadialFunction nonlinear_remainder(ProfilePtr F, ProfilePtr phi);

enum class NormMode { Inner, Outer };

struct WeightedNormReport {
  double delta = 0.0;
  double norm_estimate = 0.0;
  std::vector<std::pair<double, double>> per_shell;  // (radius, shell value)
};

// Weighted norm estimator over dyadic shells: shell value at r is
//   r^{-delta} * sum_{j<=k_max} r^j sup_{shell} |d^j/drho^j phi|
// with the sup sampled densely on [r/2, r] (inner) or [r, 2r] (outer).
// The Holder seminorm is not estimated.
WeightedNormReport weighted_norm(const RadialProfile& phi, double delta, NormMode mode,
                                 int k_max, double r_base, int n_shells,
                                 int samples_per_shell = 33);

}  // namespace cscx
