#pragma once

#include <functional>
#include <vector>

#include "cscx/modes.hpp"
#include "cscx/profile.hpp"

namespace cscx {

// A scalar field on R^dim evaluated in extended precision, for the finite
// difference oracles below.
struct ScalarField {
  int dim = 0;
  std::function<long double(const std::vector<long double>&)> eval;
};

// Kahler potential sampled on real coordinates (x_1..x_m, y_1..y_m), valid on
// the annulus r_min <= |z| <= r_max.
struct GridPotential {
  int m = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::function<long double(const std::vector<long double>&)> value;
};

// Wrap a radial profile F(|z|^2) for the grid oracle.
GridPotential radial_grid_potential(ProfilePtr F);

// Scalar curvature at a point by pure finite differences in real coordinates:
// 4th-order Hessians of the potential build the metric on a second-order
// stencil of the log-determinant, which is then contracted with the inverse
// metric.  Shares no code path with the radial closed form.  The stencil
// reaches 3h in every coordinate, so the point must sit that far inside the
// annulus.  m = 2 or 3.
double scalar_curvature_grid(const GridPotential& phi, const std::vector<double>& point,
                             double h);

// u = H(rho) e_gamma as a field on R^{2m}, with e_gamma the normalized degree
// harmonic Re((x_1 + i x_2)^gamma) / rho^gamma.
ScalarField mode_field(const BiharmonicExtension& ext);

// Euclidean Laplacian / bi-Laplacian by iterated 7-point 6th-order second
// derivative stencils along each axis.
double laplacian_fd(const ScalarField& u, const std::vector<double>& x, double h);
double bilaplacian_fd(const ScalarField& u, const std::vector<double>& x, double h);

}  // namespace cscx
