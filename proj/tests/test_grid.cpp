#include <doctest.h>

#include <cmath>
#include <complex>

#include "cscx/grid.hpp"
#include "cscx/kahler.hpp"

using namespace cscx;

namespace {

std::vector<double> point_at_radius(int dim, double r) {
  // Fixed direction with all coordinates active, normalized to radius r.
  std::vector<double> x(dim);
  double n2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    x[i] = 1.0 + 0.1 * i;
    n2 += x[i] * x[i];
  }
  const double scale = r / std::sqrt(n2);
  for (auto& xi : x) xi *= scale;
  return x;
}

double harmonic_factor(const std::vector<double>& x, int gamma) {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  std::complex<double> w(x[0], x[x.size() / 2]);
  return std::real(std::pow(w, gamma)) / std::pow(std::sqrt(r2), gamma);
}

}  // namespace

TEST_CASE("grid curvature vanishes on the flat potential") {
  for (int m : {2, 3}) {
    auto g = radial_grid_potential(flat_profile(m));
    CHECK(std::abs(scalar_curvature_grid(g, point_at_radius(2 * m, 1.5), 1e-2)) < 1e-9);
  }
}

TEST_CASE("grid curvature agrees with the radial closed form") {
  for (int m : {2, 3}) {
    auto F = std::make_shared<Log1pProfile>(m, m == 2 ? 1.0 : 0.7);
    auto g = radial_grid_potential(F);
    for (double r : {1.2, 2.0}) {
      const auto x = point_at_radius(2 * m, r);
      const double exact = radial_scalar_curvature(*F, r * r);
      const double approx = scalar_curvature_grid(g, x, 1e-2);
      // The log-determinant is differenced at second order, so a generic
      // curved potential carries O(h^2) truncation here.
      CHECK(std::abs(approx - exact) < 5e-3);
    }
  }
}

TEST_CASE("grid curvature converges at second order") {
  auto F = std::make_shared<Log1pProfile>(2, 1.0);
  auto g = radial_grid_potential(F);
  const auto x = point_at_radius(4, 1.5);
  const double exact = radial_scalar_curvature(*F, 1.5 * 1.5);
  const double e1 = std::abs(scalar_curvature_grid(g, x, 4e-2) - exact);
  const double e2 = std::abs(scalar_curvature_grid(g, x, 2e-2) - exact);
  const double order = std::log(e1 / e2) / std::log(2.0);
  CHECK(order > 1.8);
}

TEST_CASE("grid curvature sees scalar-flat profiles") {
  auto b = std::make_shared<PowerLogProfile>(
      2, std::vector<std::pair<double, double>>{{1.0, 1.0}}, 1.0);
  auto g = radial_grid_potential(b);
  // Scalar-flat but not Ricci-flat: the entrywise h^2 error of the varying
  // log-determinant survives the contraction.
  CHECK(std::abs(scalar_curvature_grid(g, point_at_radius(4, 1.8), 1e-2)) < 3e-5);
}

TEST_CASE("grid oracle preconditions") {
  auto F = std::make_shared<Log1pProfile>(2, 1.0);
  auto g = radial_grid_potential(F);
  g.r_min = 1.0;
  g.r_max = 2.0;
  CHECK_THROWS_AS(scalar_curvature_grid(g, point_at_radius(4, 1.01), 1e-2), Error);
  CHECK_THROWS_AS(scalar_curvature_grid(g, point_at_radius(4, 1.5), -1.0), Error);
  CHECK_THROWS_AS(scalar_curvature_grid(g, std::vector<double>{1.0, 2.0}, 1e-2), Error);

  auto F4 = std::make_shared<Log1pProfile>(4, 1.0);
  auto g4 = radial_grid_potential(F4);
  CHECK_THROWS_AS(scalar_curvature_grid(g4, point_at_radius(8, 1.5), 1e-2), Error);
}

TEST_CASE("euclidean stencils are exact on radial powers") {
  // Delta rho^4 = 4 (d + 2) rho^2 and Delta^2 rho^4 = 8 d (d + 2) on R^d.
  BiharmonicExtension quartic;
  quartic.m = 2;
  quartic.gamma = 0;
  quartic.terms = {{1.0, 4.0}};
  auto u = mode_field(quartic);
  const int d = 4;
  const auto x = point_at_radius(d, 2.0);
  CHECK(laplacian_fd(u, x, 1e-2) ==
        doctest::Approx(4.0 * (d + 2) * 4.0).epsilon(1e-11));
  CHECK(bilaplacian_fd(u, x, 1e-2) ==
        doctest::Approx(8.0 * d * (d + 2)).epsilon(1e-9));
}

TEST_CASE("mode fields are flat-harmonic precisely as the traces claim") {
  const CauchyData data{1.1, -0.6};
  for (int m : {2, 3}) {
    for (int gamma : {0, 1, 2}) {
      for (auto ext : {biharmonic_inner(m, gamma, data), biharmonic_outer(m, gamma, data)}) {
        auto u = mode_field(ext);
        const auto x = point_at_radius(2 * m, 2.0);
        const double eg = harmonic_factor(x, gamma);
        const auto t = evaluate_extension(ext, 2.0);
        CHECK(laplacian_fd(u, x, 1e-2) == doctest::Approx(t.lap * eg).epsilon(1e-9));
        CHECK(std::abs(bilaplacian_fd(u, x, 1e-2)) < 1e-7);
      }
    }
  }
}
