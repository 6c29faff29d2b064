#pragma once

#include <memory>
#include <vector>

#include "cscx/profile.hpp"

namespace cscx {

// Scalar-flat model on the blown-up C^2: F(s) = lambda s + log s.  Scalar
// curvature vanishes for every lambda > 0; the log coefficient persists in
// the s -> infinity expansion.
ProfilePtr burns_potential(double lambda = 1.0);

// Scalar-flat U(m)-invariant model on the blow-up of C^m, m >= 3, obtained by
// integrating the profile ODE for zeta = A' - 1/s from zeta(0) = 1.  The
// potential is A(s) = log s + I(s) with I' = zeta.  lambda is the leading
// slope at infinity, b the constant in the expansion
//   A = lambda s - lambda^{2-m}/(m-2) s^{2-m} + b + O(s^{1-m}).
// The profile's jet rebuilds derivatives two through four from the ODE's own
// right-hand side at the interpolated zeta, so its scalar curvature vanishes
// to roundoff rather than to interpolation accuracy.
struct SimancaSolution {
  int m = 0;
  double lambda = 0.0;
  double b = 0.0;
  double s_max = 0.0;
  double rtol = 0.0;
  std::size_t steps = 0;
  // Scale-free collocation residual |s zeta' - s Phi(s, zeta)| of the stored
  // interpolant at step midpoints; only filled when requested.
  double ode_residual = -1.0;
  ProfilePtr profile;
};

SimancaSolution simanca_solve(int m, double s_max = 1e4, double rtol = 1e-12,
                              bool with_residual = false);

// Far-field constants extracted from a quad-precision integration: lambda by
// three-point elimination of the s^{1-m} and s^{-m} tails, b by a
// least-squares fit, and the decay of the defect
//   D(s) = A - lambda s + lambda^{2-m}/(m-2) s^{2-m} - b
// over [s_max/100, s_max].  lambda_drift reports |lambda(rtol) -
// lambda(10 rtol)| as a tolerance-stability diagnostic.
struct AsymptoticReport {
  int m = 0;
  double lambda = 0.0;
  double b = 0.0;
  double lambda_drift = 0.0;
  double defect_slope = 0.0;  // d log10|D| / d log10 s
  std::vector<std::pair<double, double>> defect;  // (s, D(s))
};

AsymptoticReport simanca_asymptotics(int m, double s_max = 1e4);

// Ricci-flat model on the crepant resolution of C^m / Z_m:
//   F(s) = (s^m + 1)^{1/m}
//        + (1/m) sum_j zeta^j log((s^m + 1)^{1/m} - zeta^j),  zeta = e^{2 pi i/m}.
// The derivative tower telescopes to F'(s) = (1 + s^{-m})^{1/m}, and
// det g = 1 identically.  The imaginary part of the principal-branch sum is
// checked to vanish.
class CalabiProfile : public RadialProfile {
 public:
  explicit CalabiProfile(int m);

  double c_log() const override { return 1.0; }
  double log_coeff_infinity() const override { return 0.0; }
  ProfileJet jet(double s) const override;
  long double value_ld(long double s) const override;
  std::string kind() const override { return "calabi"; }
};

ProfilePtr calabi_potential(int m);

// Normalize an ALE model profile to unit leading slope: the returned profile
// is sigma -> model(sigma / (2 lambda)) + shift, with flat part sigma / 2.
// shift choices: log(2 lambda) for the blow-up of C^2, -b for m >= 3, 0 for
// the Ricci-flat family.
ProfilePtr ale_rescale(ProfilePtr model, double lambda, double shift = 0.0);

// Two-parameter fit of the far field of a unit-slope profile: the deviation
// F(sigma) - sigma/2 is regressed on {1, sigma^{2-m}} (m >= 3) or
// {1, log sigma} (m = 2) over a log-spaced window.  The remainder slope is
// reported against the radius |u| = sqrt(sigma); radial input has no linear
// term, which is recorded as zero.
struct RefinedFit {
  double a_const = 0.0;
  double c_decay = 0.0;
  double a_lin = 0.0;
  bool exact = false;             // residual at the noise floor
  double remainder_order = 0.0;   // valid when !exact
};

RefinedFit fit_refined_asymptotics(const RadialProfile& F, double sigma_lo,
                                   double sigma_hi, int n_samples = 16);

}  // namespace cscx
