#include "cscx/modes.hpp"

#include <algorithm>
#include <cmath>

namespace cscx {

namespace {

void check_mode(int m, int gamma) {
  require(m >= 2, Status::WrongDimension, "mode analysis needs m >= 2");
  require(gamma >= 0, Status::InvalidArgument, "harmonic degree must be >= 0");
}

// Delta0 (rho^a e_gamma) = mu(a) rho^{a-2} e_gamma with
// mu(a) = a (a + 2m - 2) - gamma (2m - 2 + gamma).
double power_lap_coef(int m, int gamma, double a) {
  return a * (a + 2.0 * m - 2.0) - sphere_eigenvalue(m, gamma);
}

}  // namespace

double sphere_eigenvalue(int m, int gamma) {
  check_mode(m, gamma);
  return double(gamma) * (2.0 * m - 2.0 + gamma);
}

std::vector<int> invariant_gammas(int m, const GroupDescriptor& group, int gamma_max) {
  check_mode(m, 0);
  require(gamma_max >= 0, Status::InvalidArgument, "gamma_max must be >= 0");
  std::vector<int> out;
  if (group.kind == "trivial") {
    for (int g = 0; g <= gamma_max; ++g) out.push_back(g);
    return out;
  }
  if (group.kind == "cyclic_diagonal") {
    require(group.order >= 1, Status::UnsupportedGroup, "cyclic group order must be >= 1");
    for (int g = 0; g <= gamma_max; ++g) {
      bool keep = false;
      for (int p = 0; p <= g && !keep; ++p) {
        // z -> zeta z scales a (p, g-p) bidegree monomial by zeta^{2p-g}.
        int w = (2 * p - g) % group.order;
        if (w < 0) w += group.order;
        keep = (w == 0);
      }
      if (keep) out.push_back(g);
    }
    return out;
  }
  fail(Status::UnsupportedGroup, "unknown group kind: " + group.kind);
}

std::vector<double> indicial_roots(int m, int gamma) {
  check_mode(m, gamma);
  std::vector<double> r{double(gamma), double(gamma + 2), double(2 - 2 * m - gamma),
                        double(4 - 2 * m - gamma)};
  std::sort(r.begin(), r.end());
  return r;
}

BiharmonicExtension biharmonic_inner(int m, int gamma, const CauchyData& data) {
  check_mode(m, gamma);
  BiharmonicExtension ext;
  ext.m = m;
  ext.gamma = gamma;
  // Delta0 (rho^{gamma+2} e_gamma) = 4 (m + gamma) rho^gamma e_gamma, so the
  // harmonic head carries the rest of the value.
  const double c2 = data.k / (4.0 * (m + gamma));
  ext.terms = {{data.h - c2, double(gamma)}, {c2, double(gamma + 2)}};
  return ext;
}

BiharmonicExtension biharmonic_outer(int m, int gamma, const CauchyData& data) {
  check_mode(m, gamma);
  BiharmonicExtension ext;
  ext.m = m;
  ext.gamma = gamma;
  if (m == 2 && gamma == 0) {
    // rho^{4-2m-gamma} = rho^0 collides with the constant; the second branch
    // is log rho, with Delta0 log rho = (2m-2) rho^{-2}.
    ext.terms = {{data.h, -2.0}};
    ext.log_coef = data.k / 2.0;
    return ext;
  }
  // Delta0 (rho^{4-2m-gamma} e_gamma) = -4 (gamma + m - 2) rho^{2-2m-gamma}.
  const double c2 = -data.k / (4.0 * (gamma + m - 2));
  ext.terms = {{data.h - c2, double(2 - 2 * m - gamma)}, {c2, double(4 - 2 * m - gamma)}};
  return ext;
}

ModeTraces evaluate_extension(const BiharmonicExtension& ext, double rho) {
  require(rho > 0.0, Status::DomainError, "extension radius must be positive");
  const int m = ext.m, gamma = ext.gamma;
  check_mode(m, gamma);
  ModeTraces t;
  for (const auto& [c, a] : ext.terms) {
    if (c == 0.0) continue;
    const double mu = power_lap_coef(m, gamma, a);
    const double pa = std::pow(rho, a);
    t.value += c * pa;
    t.dr += c * a * pa / rho;
    t.lap += c * mu * pa / (rho * rho);
    t.drlap += c * mu * (a - 2.0) * pa / (rho * rho * rho);
  }
  if (ext.log_coef != 0.0) {
    require(gamma == 0, Status::SingularMode, "log branch only valid on the radial mode");
    const double c = ext.log_coef;
    t.value += c * std::log(rho);
    t.dr += c / rho;
    t.lap += c * (2.0 * m - 2.0) / (rho * rho);
    t.drlap += c * (2.0 * m - 2.0) * -2.0 / (rho * rho * rho);
  }
  return t;
}

Mat mismatch_map(int m, int gamma) {
  check_mode(m, gamma);
  Mat p(2, 2);
  const double g = gamma;
  p(0, 0) = 2.0 * (g + m - 1);
  p(1, 1) = 2.0 * (g + m - 1);
  if (m == 2 && gamma == 0) {
    p(0, 1) = -0.25;
  } else {
    p(0, 1) = (g + m - 1) / ((g + m) * (g + m - 2));
  }
  p(1, 0) = 0.0;
  return p;
}

CauchyData invert_mismatch_map(int m, int gamma, double d1, double d2) {
  check_mode(m, gamma);
  const double g = gamma;
  CauchyData data;
  data.k = d2 / (2.0 * (g + m - 1));
  if (m == 2 && gamma == 0) {
    data.h = (d1 + data.k / 4.0) / 2.0;
  } else {
    data.h = d1 / (2.0 * (g + m - 1)) - data.k / (2.0 * (g + m) * (g + m - 2));
  }
  return data;
}

}  // namespace cscx
