#include <doctest.h>

#include <cmath>
#include <random>

#include "cscx/modes.hpp"

using namespace cscx;

namespace {

// Radial part of the Laplacian acting on H(rho) e_gamma, as a finite
// difference oracle: H'' + (2m-1)/rho H' - lambda_gamma/rho^2 H.
double fd_mode_laplacian(const BiharmonicExtension& ext, double rho, double h) {
  auto val = [&](double r) { return evaluate_extension(ext, r).value; };
  const double d2 = (val(rho + h) - 2.0 * val(rho) + val(rho - h)) / (h * h);
  const double d1 = (val(rho + h) - val(rho - h)) / (2.0 * h);
  return d2 + (2.0 * ext.m - 1.0) / rho * d1 -
         sphere_eigenvalue(ext.m, ext.gamma) / (rho * rho) * val(rho);
}

double fd_mode_bilaplacian(const BiharmonicExtension& ext, double rho, double h) {
  auto lap = [&](double r) { return evaluate_extension(ext, r).lap; };
  const double d2 = (lap(rho + h) - 2.0 * lap(rho) + lap(rho - h)) / (h * h);
  const double d1 = (lap(rho + h) - lap(rho - h)) / (2.0 * h);
  return d2 + (2.0 * ext.m - 1.0) / rho * d1 -
         sphere_eigenvalue(ext.m, ext.gamma) / (rho * rho) * lap(rho);
}

}  // namespace

TEST_CASE("sphere eigenvalues") {
  CHECK(sphere_eigenvalue(2, 0) == 0.0);
  CHECK(sphere_eigenvalue(2, 1) == 3.0);
  CHECK(sphere_eigenvalue(3, 2) == 12.0);
  CHECK(sphere_eigenvalue(5, 4) == 48.0);
  CHECK_THROWS_AS(sphere_eigenvalue(1, 0), Error);
  CHECK_THROWS_AS(sphere_eigenvalue(3, -1), Error);
}

TEST_CASE("invariant degrees under the diagonal cyclic action") {
  GroupDescriptor trivial;
  CHECK(invariant_gammas(3, trivial, 4) == std::vector<int>{0, 1, 2, 3, 4});

  GroupDescriptor z2{"cyclic_diagonal", 2};
  CHECK(invariant_gammas(2, z2, 3) == std::vector<int>{0, 2});

  GroupDescriptor z3{"cyclic_diagonal", 3};
  CHECK(invariant_gammas(2, z3, 4) == std::vector<int>{0, 2, 3, 4});

  SUBCASE("order 1 keeps everything") {
    GroupDescriptor z1{"cyclic_diagonal", 1};
    CHECK(invariant_gammas(4, z1, 5) == invariant_gammas(4, trivial, 5));
  }

  SUBCASE("admissible degrees are closed under gamma -> gamma + k") {
    GroupDescriptor g{"cyclic_diagonal", 4};
    auto adm = invariant_gammas(3, g, 12);
    auto has = [&](int v) { return std::find(adm.begin(), adm.end(), v) != adm.end(); };
    for (int v : adm) {
      if (v + 4 <= 12) CHECK(has(v + 4));
    }
  }

  CHECK_THROWS_AS(invariant_gammas(2, GroupDescriptor{"dihedral", 2}, 3), Error);
}

TEST_CASE("indicial roots and the decay gap") {
  CHECK(indicial_roots(2, 0) == std::vector<double>{-2.0, 0.0, 0.0, 2.0});
  CHECK(indicial_roots(3, 0) == std::vector<double>{-4.0, -2.0, 0.0, 2.0});
  CHECK(indicial_roots(3, 1) == std::vector<double>{-5.0, -3.0, 1.0, 3.0});

  // No root may fall in {5-2m, ..., -1}: the window between the decaying
  // outer branch and the bounded inner one stays empty.
  for (int m = 3; m <= 6; ++m) {
    for (int gamma = 0; gamma <= 8; ++gamma) {
      for (double a : indicial_roots(m, gamma)) {
        CHECK((a <= 4 - 2 * m || a >= 0));
      }
    }
  }
}

TEST_CASE("extensions reproduce their boundary data at rho = 1") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int m : {2, 3, 4, 5}) {
    for (int gamma : {0, 1, 2, 5}) {
      const CauchyData data{u(rng), u(rng)};
      for (auto ext : {biharmonic_inner(m, gamma, data), biharmonic_outer(m, gamma, data)}) {
        const auto t = evaluate_extension(ext, 1.0);
        CHECK(t.value == doctest::Approx(data.h).epsilon(1e-14));
        CHECK(t.lap == doctest::Approx(data.k).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("extensions are biharmonic and the analytic traces match finite differences") {
  const CauchyData data{0.8, -1.7};
  for (int m : {2, 3, 4}) {
    for (int gamma : {0, 1, 3}) {
      for (auto ext : {biharmonic_inner(m, gamma, data), biharmonic_outer(m, gamma, data)}) {
        for (double rho : {0.6, 1.0, 1.9}) {
          const double h = 1e-4 * rho;
          const auto t = evaluate_extension(ext, rho);
          // Second-order stencils on powers as steep as rho^{-9}: expect a
          // few parts in 1e6 of the local scale.
          const double scale = 1.0 + std::abs(t.lap) / (rho * rho);
          CHECK(t.lap == doctest::Approx(fd_mode_laplacian(ext, rho, h)).epsilon(1e-5));
          CHECK(std::abs(fd_mode_bilaplacian(ext, rho, h)) < 1e-5 * scale);

          const double dv = (evaluate_extension(ext, rho + h).value -
                             evaluate_extension(ext, rho - h).value) /
                            (2.0 * h);
          const double dl = (evaluate_extension(ext, rho + h).lap -
                             evaluate_extension(ext, rho - h).lap) /
                            (2.0 * h);
          CHECK(t.dr == doctest::Approx(dv).epsilon(1e-6));
          CHECK(t.drlap == doctest::Approx(dl).epsilon(1e-5));
        }
      }
    }
  }
}

TEST_CASE("inner extension is bounded at 0; outer decays or grows only as log") {
  const CauchyData data{1.0, 1.0};
  for (int gamma : {0, 1, 2}) {
    const auto inner = biharmonic_inner(3, gamma, data);
    CHECK(std::abs(evaluate_extension(inner, 1e-5).value) <= std::abs(data.h) + 1.0);
    const auto outer = biharmonic_outer(3, gamma, data);
    // Slowest admissible branch is rho^{4 - 2m - gamma}.
    const double bound = 2.0 * std::pow(1e4, 4 - 2 * 3 - gamma);
    CHECK(std::abs(evaluate_extension(outer, 1e4).value) < bound);
  }
  const auto log_branch = biharmonic_outer(2, 0, data);
  const double far = evaluate_extension(log_branch, 1e4).value;
  CHECK(far == doctest::Approx(0.5 * std::log(1e4)).epsilon(1e-6));
}

TEST_CASE("mismatch map columns equal the trace jumps of the extensions") {
  for (int m : {2, 3, 4, 5}) {
    for (int gamma : {0, 1, 2, 4}) {
      const Mat p = mismatch_map(m, gamma);
      const CauchyData e1{1.0, 0.0}, e2{0.0, 1.0};
      for (int col = 0; col < 2; ++col) {
        const CauchyData& d = (col == 0) ? e1 : e2;
        const auto ti = evaluate_extension(biharmonic_inner(m, gamma, d), 1.0);
        const auto to = evaluate_extension(biharmonic_outer(m, gamma, d), 1.0);
        CHECK(p(0, col) == doctest::Approx(ti.dr - to.dr).epsilon(1e-13));
        CHECK(p(1, col) == doctest::Approx(ti.drlap - to.drlap).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("mismatch map closed forms") {
  // Pure value data: jump 2 (gamma + m - 1) h, so d1 = 4 at m = 3, gamma = 0
  // inverts to h = 1.
  const auto back = invert_mismatch_map(3, 0, 4.0, 0.0);
  CHECK(back.h == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(back.k == 0.0);

  // Pure Laplacian data at m = 3, gamma = 0: d1 = (g+m-1)/((g+m)(g+m-2)) = 2/3.
  const Mat p = mismatch_map(3, 0);
  CHECK(p(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(p(1, 1) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(p(1, 0) == 0.0);

  // Log block at m = 2, gamma = 0.
  const Mat q = mismatch_map(2, 0);
  CHECK(q(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(q(1, 0) == 0.0);
  CHECK(q(1, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mismatch map round trip") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto check_round_trip = [&](int m, int gamma) {
    const Mat p = mismatch_map(m, gamma);
    for (int rep = 0; rep < 4; ++rep) {
      const double d1 = u(rng), d2 = u(rng);
      const auto hk = invert_mismatch_map(m, gamma, d1, d2);
      const Vec fwd = matvec(p, Vec{hk.h, hk.k});
      CHECK(fwd[0] == doctest::Approx(d1).epsilon(1e-12));
      CHECK(fwd[1] == doctest::Approx(d2).epsilon(1e-12));
    }
  };
  for (int m : {3, 4, 5}) {
    for (int gamma = 0; gamma <= 10; ++gamma) check_round_trip(m, gamma);
  }
  for (int gamma = 0; gamma <= 6; ++gamma) check_round_trip(2, gamma);
}
