#include "cscx/kahler.hpp"

#include <algorithm>
#include <cmath>

namespace cscx {

namespace {

void check_positivity(const ProfileJet& j, double s) {
  const double g_rad = j.F1 + s * j.F2;
  require(j.F1 > 0.0 && g_rad > 0.0, Status::DegenerateMetric,
          "radial metric degenerate: F' or F' + s F'' not positive");
}

}  // namespace

RadialMetricData radial_metric_data(const RadialProfile& F, double s) {
  const ProfileJet j = F.jet(s);
  check_positivity(j, s);
  RadialMetricData d;
  d.g_tangent = j.F1;
  d.g_radial = j.F1 + s * j.F2;
  d.det_g = std::pow(j.F1, F.m() - 1) * d.g_radial;
  return d;
}

double radial_scalar_curvature(const RadialProfile& F, double s) {
  const ProfileJet j = F.jet(s);
  check_positivity(j, s);
  return scal_from_derivs(s, j.F1, j.F2, j.F3, j.F4, F.m());
}

double flat_laplacian(const ProfileJet& j, double s, int m) {
  return 4.0 * s * j.F2 + 4.0 * m * j.F1;
}

double linearized_scal_eval(const RadialProfile& F, const RadialProfile& phi, double s) {
  require(F.m() == phi.m(), Status::WrongDimension, "linearized_scal: dimension mismatch");
  const ProfileJet jf = F.jet(s);
  check_positivity(jf, s);
  const ProfileJet jp = phi.jet(s);
  // scal(F + t phi) differentiated at t = 0 through the derivative stack.
  const Dual p(jf.F1, jp.F1), q(jf.F2, jp.F2), c3(jf.F3, jp.F3), d4(jf.F4, jp.F4);
  const Dual r = scal_from_derivs(Dual(s), p, q, c3, d4, F.m());
  return -r.d;
}

RadialFunction linearized_scal_apply(ProfilePtr F, ProfilePtr phi) {
  RadialFunction f;
  f.s_min = std::max(F->s_min(), phi->s_min());
  f.s_max = std::min(F->s_max(), phi->s_max());
  f.eval = [F, phi](double s) { return linearized_scal_eval(*F, *phi, s); };
  return f;
}

double nonlinear_remainder_eval(const RadialProfile& F, const RadialProfile& phi, double s) {
  require(F.m() == phi.m(), Status::WrongDimension, "nonlinear_remainder: dimension mismatch");
  const ProfileJet jf = F.jet(s);
  const ProfileJet jp = phi.jet(s);
  check_positivity(jf, s);
  const ProfileJet jsum{jf.F + jp.F, jf.F1 + jp.F1, jf.F2 + jp.F2, jf.F3 + jp.F3,
                        jf.F4 + jp.F4};
  check_positivity(jsum, s);
  const double s_perturbed =
      scal_from_derivs(s, jsum.F1, jsum.F2, jsum.F3, jsum.F4, F.m());
  const double s_base = scal_from_derivs(s, jf.F1, jf.F2, jf.F3, jf.F4, F.m());
  return s_perturbed - s_base + linearized_scal_eval(F, phi, s);
}

RadialFunction nonlinear_remainder(ProfilePtr F, ProfilePtr phi) {
  RadialFunction f;
  f.s_min = std::max(F->s_min(), phi->s_min());
  f.s_max = std::min(F->s_max(), phi->s_max());
  f.eval = [F, phi](double s) { return nonlinear_remainder_eval(*F, *phi, s); };
  return f;
}

namespace {

// |d^j/drho^j u| for u(rho) = F(rho^2), j = 0..4, from the s-jet.
void rho_derivatives(const ProfileJet& j, double rho, double out[5]) {
  const double s = rho * rho;
  out[0] = j.F;
  out[1] = 2.0 * rho * j.F1;
  out[2] = 2.0 * j.F1 + 4.0 * s * j.F2;
  out[3] = 12.0 * rho * j.F2 + 8.0 * rho * s * j.F3;
  out[4] = 12.0 * j.F2 + 48.0 * s * j.F3 + 16.0 * s * s * j.F4;
}

}  // namespace

WeightedNormReport weighted_norm(const RadialProfile& phi, double delta, NormMode mode,
                                 int k_max, double r_base, int n_shells,
                                 int samples_per_shell) {
  require(k_max >= 0 && k_max <= 4, Status::InvalidArgument, "weighted_norm: k_max in [0,4]");
  require(n_shells >= 1 && r_base > 0.0, Status::InvalidArgument,
          "weighted_norm: bad shell parameters");

  WeightedNormReport rep;
  rep.delta = delta;
  for (int i = 0; i < n_shells; ++i) {
    const double r = (mode == NormMode::Inner) ? r_base * std::pow(2.0, -i)
                                               : r_base * std::pow(2.0, i);
    const double rho_lo = (mode == NormMode::Inner) ? 0.5 * r : r;
    const double rho_hi = (mode == NormMode::Inner) ? r : 2.0 * r;
    require(rho_lo * rho_lo > phi.s_min() && rho_hi * rho_hi < phi.s_max(),
            Status::DomainError, "weighted_norm: shell outside profile domain");

    double sup[5] = {0, 0, 0, 0, 0};
    for (int k = 0; k < samples_per_shell; ++k) {
      const double rho =
          rho_lo * std::pow(rho_hi / rho_lo, double(k) / double(samples_per_shell - 1));
      double d[5];
      rho_derivatives(phi.jet(rho * rho), rho, d);
      for (int jd = 0; jd <= k_max; ++jd) sup[jd] = std::max(sup[jd], std::abs(d[jd]));
    }
    double shell = 0.0;
    double rpow = 1.0;
    for (int jd = 0; jd <= k_max; ++jd) {
      shell += rpow * sup[jd];
      rpow *= r;
    }
    shell *= std::pow(r, -delta);
    rep.per_shell.emplace_back(r, shell);
    rep.norm_estimate = std::max(rep.norm_estimate, shell);
  }
  return rep;
}

}  // namespace cscx
