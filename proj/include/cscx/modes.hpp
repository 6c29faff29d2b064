#pragma once

#include <string>
#include <vector>

#include "cscx/common.hpp"
#include "cscx/linalg.hpp"

namespace cscx {

// Finite symmetry group acting on the cell C^m.  "trivial" keeps every
// spherical harmonic; "cyclic_diagonal" of order k is generated by
// z -> exp(2*pi*i/k) z and keeps a harmonic of degree gamma iff some
// bidegree (p, gamma - p) satisfies 2p - gamma = 0 (mod k).
struct GroupDescriptor {
  std::string kind = "trivial";  // "trivial" | "cyclic_diagonal"
  int order = 1;
};

// Eigenvalue of the unit-sphere Laplacian on degree-gamma harmonics of
// S^{2m-1}: gamma (2m - 2 + gamma).
double sphere_eigenvalue(int m, int gamma);

std::vector<int> invariant_gammas(int m, const GroupDescriptor& group, int gamma_max);

// Exponents a with Delta0^2 (rho^a e_gamma) = 0:
// {gamma, gamma + 2, 2 - 2m - gamma, 4 - 2m - gamma}, ascending.  The root 0
// is doubled exactly at (m, gamma) = (2, 0), where rho^0 degenerates into a
// log branch.
std::vector<double> indicial_roots(int m, int gamma);

// Boundary data of one mode on the unit sphere: the value h and the
// Laplacian k of u = H(rho) e_gamma at rho = 1.
struct CauchyData {
  double h = 0.0;
  double k = 0.0;
};

// Radial factor of a biharmonic mode extension: sum of c rho^a terms plus an
// optional log branch (only populated in the bounded-degree outer problem at
// m = 2, gamma = 0).
struct BiharmonicExtension {
  int m = 0;
  int gamma = 0;
  std::vector<std::pair<double, double>> terms;  // (coefficient, exponent)
  double log_coef = 0.0;
};

// Extension of (h, k) into the unit ball: decaying at 0, spanned by
// rho^gamma and rho^{gamma+2}.
BiharmonicExtension biharmonic_inner(int m, int gamma, const CauchyData& data);

// Extension of (h, k) outside the unit ball: decaying (m >= 3) or bounded
// up to the log branch (m = 2), spanned by rho^{2-2m-gamma} and
// rho^{4-2m-gamma}, with log rho replacing the degenerate power at
// (m, gamma) = (2, 0).
BiharmonicExtension biharmonic_outer(int m, int gamma, const CauchyData& data);

// Value, Laplacian, radial derivative and radial derivative of the Laplacian
// of H(rho) e_gamma on the sphere of radius rho (e_gamma is normalized off).
struct ModeTraces {
  double value = 0.0;
  double lap = 0.0;
  double dr = 0.0;
  double drlap = 0.0;
};

ModeTraces evaluate_extension(const BiharmonicExtension& ext, double rho);

// 2x2 matrix sending (h, k) to the jump (d1, d2) of (d/drho, d/drho Delta0)
// across the unit sphere between the inner and outer extensions.
Mat mismatch_map(int m, int gamma);

CauchyData invert_mismatch_map(int m, int gamma, double d1, double d2);

}  // namespace cscx
