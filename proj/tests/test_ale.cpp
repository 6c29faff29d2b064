#include "cscx/ale.hpp"

#include <cmath>
#include <memory>
#include <vector>

#include "cscx/grid.hpp"
#include "cscx/kahler.hpp"
#include "doctest.h"

using namespace cscx;

namespace {

template <class F>
Status thrown_status(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.status();
  }
  return Status::Ok;
}

std::vector<double> log_samples(double lo, double hi, int n) {
  std::vector<double> out;
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out.push_back(lo * std::exp(step * i));
  return out;
}

}  // namespace

TEST_CASE("blow-up of C^2: scalar flat for every slope, unit log coefficient") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    auto f = burns_potential(lambda);
    CHECK(f->m() == 2);
    CHECK(f->c_log() == 1.0);
    CHECK(f->log_coeff_infinity() == 1.0);
    for (double s : log_samples(0.1, 100.0, 17)) {
      CHECK(std::abs(radial_scalar_curvature(*f, s)) < 1e-10);
    }
  }
  CHECK(thrown_status([] { burns_potential(0.0); }) == Status::InvalidArgument);
}

TEST_CASE("blow-up profile ode reproduces the frozen slope and constant") {
  // Constants cross-checked against the quad-precision far-field path; the
  // double integration at rtol 1e-12 lands within a few 1e-12 / 1e-8 of them.
  const double lam_ref[3] = {2.36509427074135, 4.50013894374735, 7.45270064246868};
  const double b_ref[3] = {-0.569591059036, -1.89297403998, -2.63553411543};
  for (int m = 3; m <= 5; ++m) {
    auto sol = simanca_solve(m);
    CHECK(sol.m == m);
    CHECK(std::abs(sol.lambda - lam_ref[m - 3]) < 1e-9);
    CHECK(std::abs(sol.b - b_ref[m - 3]) < 1e-7);
    CHECK(sol.steps > 100);
    CHECK(sol.steps < 2000);
    CHECK(sol.ode_residual == -1.0);  // not requested
    REQUIRE(sol.profile != nullptr);
    CHECK(sol.profile->kind() == "simanca");
    CHECK(sol.profile->c_log() == 1.0);
    CHECK(sol.profile->log_coeff_infinity() == 0.0);
  }
}

TEST_CASE("blow-up profile: monotone slope deviation, scalar flat to roundoff") {
  auto sol = simanca_solve(4, 1e4, 1e-12, true);
  const auto& f = *sol.profile;

  // zeta = F' - 1/s climbs from 1 at the exceptional divisor to lambda.
  double prev = 1.0 - 1e-9;
  for (double s : log_samples(1e-3, 1e4, 40)) {
    const double zeta = f.jet(s).F1 - 1.0 / s;
    CHECK(zeta >= prev - 1e-9);
    CHECK(zeta <= sol.lambda + 1e-9);
    prev = zeta;
  }

  // The jet rebuilds derivatives from the flow's own right-hand side, so the
  // curvature residual is roundoff, far below the interpolation error.
  for (double s : log_samples(0.05, 4e3, 25)) {
    CHECK(std::abs(radial_scalar_curvature(f, s)) < 1e-10);
  }

  CHECK(sol.ode_residual >= 0.0);
  CHECK(sol.ode_residual < 5e-11);
}

TEST_CASE("blow-up solver rejects bad arguments") {
  CHECK(thrown_status([] { simanca_solve(2); }) == Status::WrongDimension);
  CHECK(thrown_status([] { simanca_solve(3, 50.0); }) == Status::InvalidArgument);
  CHECK(thrown_status([] { simanca_solve(3, 1e4, 1e-20); }) == Status::InvalidArgument);
  CHECK(thrown_status([] { simanca_solve(3, 1e4, 1e-3); }) == Status::InvalidArgument);
}

TEST_CASE("quad far-field extraction is tolerance stable") {
  auto rep = simanca_asymptotics(3);
  CHECK(std::abs(rep.lambda - 2.36509427074135) < 1e-11);
  CHECK(std::abs(rep.b - (-0.569591059036)) < 1e-9);
  CHECK(rep.lambda_drift < 1e-12);
  CHECK(rep.defect_slope == doctest::Approx(-2.0).epsilon(0.05));
  REQUIRE(rep.defect.size() == 25);
  // |D| falls monotonically across two decades of s.
  for (std::size_t i = 1; i < rep.defect.size(); ++i) {
    CHECK(std::abs(rep.defect[i].second) < std::abs(rep.defect[i - 1].second));
  }
  CHECK(thrown_status([] { simanca_asymptotics(2); }) == Status::WrongDimension);
  CHECK(thrown_status([] { simanca_asymptotics(6); }) == Status::WrongDimension);
  CHECK(thrown_status([] { simanca_asymptotics(3, 10.0); }) == Status::InvalidArgument);
}

TEST_CASE("crepant resolution potential matches its closed forms") {
  // m = 2 collapses to the classical form with an explicit log.
  auto c2 = calabi_potential(2);
  for (double s : log_samples(0.01, 1e4, 23)) {
    const long double r = sqrtl((long double)s * (long double)s + 1.0L);
    const long double ref = r + logl((long double)s) - logl(1.0L + r);
    CHECK(std::abs(double(c2->value_ld(s) - ref)) < 1e-14);
  }

  for (int m = 2; m <= 5; ++m) {
    auto cp = calabi_potential(m);
    CHECK(cp->kind() == "calabi");
    CHECK(cp->c_log() == 1.0);
    CHECK(cp->log_coeff_infinity() == 0.0);
    for (double s : log_samples(0.5, 100.0, 12)) {
      const auto md = radial_metric_data(*cp, s);
      const double det = std::pow(md.g_tangent, m - 1) * md.g_radial;
      CHECK(std::abs(det - 1.0) < 1e-12);  // Ricci flat: unit volume form
      CHECK(std::abs(radial_scalar_curvature(*cp, s)) < 1e-10);
    }
    // Interior consistency of the telescoped derivative with the log sum.
    for (double s : {0.3, 1.7, 24.0}) {
      const long double h = 1e-6L * (long double)s;
      const double fd = double((cp->value_ld(s + h) - cp->value_ld(s - h)) / (2.0L * h));
      CHECK(fd == doctest::Approx(cp->jet(s).F1).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(calabi_potential(1), Error);
}

TEST_CASE("crepant resolution passes the lattice curvature probe") {
  for (int m = 2; m <= 3; ++m) {
    auto gp = radial_grid_potential(calabi_potential(m));
    std::vector<double> pt(2 * std::size_t(m), 0.0);
    pt[0] = 1.5 / std::sqrt(2.0);
    pt[std::size_t(m)] = 1.5 / std::sqrt(2.0);
    CHECK(std::abs(scalar_curvature_grid(gp, pt, 1e-2)) < 1e-7);
  }
}

TEST_CASE("unit-slope rescaling reproduces the flat-plus-log normal form") {
  // F = lambda s + log s pulled back by s = sigma / (2 lambda) and shifted by
  // log(2 lambda) is exactly sigma/2 + log sigma, independent of lambda.
  PowerLogProfile normal(2, {{0.5, 1.0}}, 1.0);
  for (double lambda : {0.5, 1.3, 2.0}) {
    auto resc = ale_rescale(burns_potential(lambda), lambda, std::log(2.0 * lambda));
    for (double sig : {0.7, 3.0, 40.0, 500.0}) {
      const auto a = resc->jet(sig);
      const auto b = normal.jet(sig);
      CHECK(a.F == doctest::Approx(b.F).epsilon(1e-12));
      CHECK(a.F1 == doctest::Approx(b.F1).epsilon(1e-12));
      CHECK(a.F2 == doctest::Approx(b.F2).epsilon(1e-12));
      CHECK(a.F3 == doctest::Approx(b.F3).epsilon(1e-12));
      CHECK(a.F4 == doctest::Approx(b.F4).epsilon(1e-12));
    }
  }
  CHECK(thrown_status([] { ale_rescale(nullptr, 1.0); }) == Status::InvalidArgument);
  CHECK(thrown_status([] { ale_rescale(burns_potential(1.0), -1.0); }) ==
        Status::InvalidArgument);
}

TEST_CASE("rescaled blow-up model exposes the refined decay coefficient") {
  auto sol = simanca_solve(3, 2e4, 1e-12);
  auto resc = ale_rescale(sol.profile, sol.lambda, -sol.b);
  const auto fit = fit_refined_asymptotics(*resc, 2000.0, 8e4, 16);
  // Leading correction of the unit-slope model is -2 sigma^{-1} in m = 3.
  CHECK(std::abs(fit.c_decay - (-2.0)) < 0.02);
  CHECK(std::abs(fit.a_const) < 1e-6);   // b-shift removes the constant
  CHECK(fit.a_lin == 0.0);
  CHECK(!fit.exact);
}

TEST_CASE("refined fit separates constant, decay, and remainder") {
  // Exact case: the blow-up of C^2 in normal form leaves no remainder.
  PowerLogProfile flat_log(2, {{0.5, 1.0}}, 1.0);
  const auto f1 = fit_refined_asymptotics(flat_log, 100.0, 1e4, 16);
  CHECK(f1.exact);
  CHECK(f1.c_decay == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(f1.a_const) < 1e-9);

  // Synthetic profile with a known next-order tail: the sub-window residual
  // scaling recovers its radial order.
  PowerLogProfile syn(3, {{0.5, 1.0}, {1.0, -1.0}, {0.1, -1.5}}, 0.0);
  const auto f2 = fit_refined_asymptotics(syn, 1e3, 1e5, 16);
  CHECK(!f2.exact);
  CHECK(f2.c_decay == doctest::Approx(1.0).epsilon(0.02));
  CHECK(f2.remainder_order == doctest::Approx(-3.0).epsilon(0.1));

  // Ricci-flat family: no sigma^{2-m} term at all and an s^{1-m} tail, so the
  // decay coefficient is tiny and the remainder order is -4.
  const auto f3 = fit_refined_asymptotics(*ale_rescale(calabi_potential(3), 1.0),
                                          100.0, 1e4, 16);
  CHECK(std::abs(f3.c_decay) < 0.02);
  CHECK(std::abs(f3.a_const) < 1e-4);
  CHECK(f3.remainder_order == doctest::Approx(-4.0).epsilon(0.1));
}

TEST_CASE("refined fit rejects degenerate windows") {
  PowerLogProfile flat_log(2, {{0.5, 1.0}}, 1.0);
  CHECK(thrown_status([&] { fit_refined_asymptotics(flat_log, 1e3, 2e4, 16); }) ==
        Status::InsufficientWindow);
  CHECK(thrown_status([&] { fit_refined_asymptotics(flat_log, 100.0, 1e4, 3); }) ==
        Status::InvalidArgument);
  CHECK(thrown_status([&] { fit_refined_asymptotics(flat_log, 1e4, 100.0, 16); }) ==
        Status::InvalidArgument);
  // sigma^{2-m} underflows to zero across this window: no usable decay column.
  PowerLogProfile far(5, {{0.5, 1.0}}, 0.0);
  CHECK(thrown_status([&] { fit_refined_asymptotics(far, 1e200, 1e203, 16); }) ==
        Status::IllConditionedFit);
}
