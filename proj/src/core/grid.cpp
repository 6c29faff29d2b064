#include "cscx/grid.hpp"

#include <cmath>
#include <complex>
#include <map>

#include "cscx/common.hpp"

namespace cscx {

namespace {

using Real = long double;
using Cplx = std::complex<Real>;
using Offset = std::vector<int>;

// Memoized potential evaluation on the integer lattice around a base point.
class LatticeCache {
 public:
  LatticeCache(const GridPotential& phi, const std::vector<double>& base, double h)
      : phi_(phi), h_(h) {
    base_.assign(base.begin(), base.end());
  }

  Real at(const Offset& off) {
    auto it = memo_.find(off);
    if (it != memo_.end()) return it->second;
    std::vector<Real> x = base_;
    for (std::size_t i = 0; i < off.size(); ++i) x[i] += off[i] * (Real)h_;
    const Real v = phi_.value(x);
    memo_.emplace(off, v);
    return v;
  }

 private:
  const GridPotential& phi_;
  std::vector<Real> base_;
  double h_;
  std::map<Offset, Real> memo_;
};

// Real Hessian entry of the potential at lattice node `n`, 4th order.
Real hess4(LatticeCache& c, const Offset& n, int u, int v, double h) {
  const Real h2 = (Real)h * (Real)h;
  auto shifted = [&](int du, int dv) {
    Offset o = n;
    o[u] += du;
    o[v] += dv;
    return c.at(o);
  };
  if (u == v) {
    return (-shifted(2, 0) + 16.0L * shifted(1, 0) - 30.0L * c.at(n) +
            16.0L * shifted(-1, 0) - shifted(-2, 0)) /
           (12.0L * h2);
  }
  // Tensor product of two 4th-order first derivative stencils.
  static const int pos[4] = {-2, -1, 1, 2};
  static const Real wgt[4] = {1.0L / 12, -8.0L / 12, 8.0L / 12, -1.0L / 12};
  Real acc = 0.0L;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc += wgt[i] * wgt[j] * shifted(pos[i], pos[j]);
  return acc / h2;
}

// Hermitian metric g_{a bbar} at lattice node `n` from the real Hessian,
// g = 1/4 [(T_xx + T_yy) + i (T_xy - T_yx)] in blocked coordinates.
void metric_at(LatticeCache& c, const Offset& n, int m, double h, Cplx g[3][3]) {
  Real T[6][6];
  for (int u = 0; u < 2 * m; ++u)
    for (int v = u; v < 2 * m; ++v) T[u][v] = T[v][u] = hess4(c, n, u, v, h);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      g[a][b] = 0.25L * Cplx(T[a][b] + T[m + a][m + b], T[a][m + b] - T[m + a][b]);
    }
  }
}

Cplx det_m(const Cplx g[3][3], int m) {
  if (m == 2) return g[0][0] * g[1][1] - g[0][1] * g[1][0];
  return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
         g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

void inverse_m(const Cplx g[3][3], int m, Cplx inv[3][3]) {
  const Cplx d = det_m(g, m);
  require(std::abs(d) > 0.0L, Status::DegenerateMetric, "grid metric is singular");
  if (m == 2) {
    inv[0][0] = g[1][1] / d;
    inv[1][1] = g[0][0] / d;
    inv[0][1] = -g[0][1] / d;
    inv[1][0] = -g[1][0] / d;
    return;
  }
  // Adjugate of the 3x3 block.
  inv[0][0] = (g[1][1] * g[2][2] - g[1][2] * g[2][1]) / d;
  inv[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) / d;
  inv[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) / d;
  inv[1][0] = (g[1][2] * g[2][0] - g[1][0] * g[2][2]) / d;
  inv[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) / d;
  inv[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) / d;
  inv[2][0] = (g[1][0] * g[2][1] - g[1][1] * g[2][0]) / d;
  inv[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) / d;
  inv[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / d;
}

Real log_det_at(LatticeCache& c, const Offset& n, int m, double h) {
  Cplx g[3][3];
  metric_at(c, n, m, h, g);
  const Cplx d = det_m(g, m);
  require(d.real() > 0.0L, Status::DegenerateMetric, "grid metric determinant <= 0");
  return std::log(d.real());
}

}  // namespace

GridPotential radial_grid_potential(ProfilePtr F) {
  GridPotential g;
  g.m = F->m();
  g.r_min = std::sqrt(F->s_min());
  g.r_max = F->s_max() >= kSInf ? 1e30 : std::sqrt(F->s_max());
  g.value = [F](const std::vector<Real>& x) -> Real {
    Real s = 0.0L;
    for (Real xi : x) s += xi * xi;
    return F->value_ld(s);
  };
  return g;
}

double scalar_curvature_grid(const GridPotential& phi, const std::vector<double>& point,
                             double h) {
  const int m = phi.m;
  require(m == 2 || m == 3, Status::WrongDimension, "grid oracle supports m = 2 or 3");
  require(point.size() == std::size_t(2 * m), Status::InvalidArgument,
          "point must have 2m real coordinates");
  require(h > 0.0, Status::InvalidArgument, "grid spacing must be positive");

  double r2 = 0.0;
  for (double x : point) r2 += x * x;
  const double r = std::sqrt(r2);
  const double margin = 3.0 * h * std::sqrt(2.0 * m);
  require(r - margin >= phi.r_min && r + margin <= phi.r_max, Status::OutOfRegion,
          "stencil leaves the validity annulus of the potential");

  LatticeCache cache(phi, point, h);
  const Offset zero(2 * m, 0);

  // Metric and its inverse at the center.
  Cplx g[3][3], inv[3][3];
  metric_at(cache, zero, m, h, g);
  inverse_m(g, m, inv);

  // Second-order complex Hessian of log det g.
  auto f = [&](const Offset& n) { return log_det_at(cache, n, m, h); };
  Real T2[6][6];
  const Real h2 = (Real)h * (Real)h;
  const Real f0 = f(zero);
  for (int u = 0; u < 2 * m; ++u) {
    Offset p = zero, q = zero;
    p[u] += 1;
    q[u] -= 1;
    T2[u][u] = (f(p) - 2.0L * f0 + f(q)) / h2;
    for (int v = u + 1; v < 2 * m; ++v) {
      Offset pp = zero, pm = zero, mp = zero, mm = zero;
      pp[u] += 1;
      pp[v] += 1;
      pm[u] += 1;
      pm[v] -= 1;
      mp[u] -= 1;
      mp[v] += 1;
      mm[u] -= 1;
      mm[v] -= 1;
      T2[u][v] = T2[v][u] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0L * h2);
    }
  }

  Cplx trace = 0.0L;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Cplx L =
          0.25L * Cplx(T2[a][b] + T2[m + a][m + b], T2[a][m + b] - T2[m + a][b]);
      trace += inv[b][a] * L;
    }
  }
  // Riemannian normalization: twice the complex contraction.
  return (double)(-2.0L * trace.real());
}

ScalarField mode_field(const BiharmonicExtension& ext) {
  ScalarField u;
  u.dim = 2 * ext.m;
  const auto terms = ext.terms;
  const double log_coef = ext.log_coef;
  const int gamma = ext.gamma;
  u.eval = [terms, log_coef, gamma](const std::vector<Real>& x) -> Real {
    Real r2 = 0.0L;
    for (Real xi : x) r2 += xi * xi;
    const Real rho = std::sqrt(r2);
    Real radial = 0.0L;
    for (const auto& [c, a] : terms) radial += (Real)c * std::pow(rho, (Real)a);
    if (log_coef != 0.0) radial += (Real)log_coef * std::log(rho);
    if (gamma == 0) return radial;
    // Normalized harmonic Re((x_1 + i y_1)^gamma) / rho^gamma; blocked
    // coordinates put y_1 at index dim/2.
    Cplx w(x[0], x[x.size() / 2]);
    Cplx p(1.0L, 0.0L);
    for (int i = 0; i < gamma; ++i) p *= w;
    return radial * p.real() / std::pow(rho, (Real)gamma);
  };
  return u;
}

namespace {

// 7-point 6th-order central second derivative weights.
const Real kD2w[7] = {1.0L / 90, -3.0L / 20, 1.5L, -49.0L / 18, 1.5L, -3.0L / 20, 1.0L / 90};

Real laplacian_rec(const ScalarField& u, std::map<Offset, Real>& memo,
                   const std::vector<Real>& base, const Offset& n, double h) {
  const int d = u.dim;
  auto value = [&](const Offset& o) {
    auto it = memo.find(o);
    if (it != memo.end()) return it->second;
    std::vector<Real> x = base;
    for (int i = 0; i < d; ++i) x[i] += o[i] * (Real)h;
    const Real v = u.eval(x);
    memo.emplace(o, v);
    return v;
  };
  const Real h2 = (Real)h * (Real)h;
  Real acc = 0.0L;
  for (int axis = 0; axis < d; ++axis) {
    for (int k = -3; k <= 3; ++k) {
      Offset o = n;
      o[axis] += k;
      acc += kD2w[k + 3] * value(o);
    }
  }
  return acc / h2;
}

}  // namespace

double laplacian_fd(const ScalarField& u, const std::vector<double>& x, double h) {
  require(x.size() == std::size_t(u.dim), Status::InvalidArgument,
          "point dimension mismatch");
  std::map<Offset, Real> memo;
  std::vector<Real> base(x.begin(), x.end());
  return (double)laplacian_rec(u, memo, base, Offset(u.dim, 0), h);
}

double bilaplacian_fd(const ScalarField& u, const std::vector<double>& x, double h) {
  require(x.size() == std::size_t(u.dim), Status::InvalidArgument,
          "point dimension mismatch");
  std::map<Offset, Real> memo;
  std::vector<Real> base(x.begin(), x.end());
  std::map<Offset, Real> lap_memo;
  const Real h2 = (Real)h * (Real)h;
  Real acc = 0.0L;
  for (int axis = 0; axis < u.dim; ++axis) {
    for (int k = -3; k <= 3; ++k) {
      Offset o(u.dim, 0);
      o[axis] += k;
      auto it = lap_memo.find(o);
      Real lap;
      if (it != lap_memo.end()) {
        lap = it->second;
      } else {
        lap = laplacian_rec(u, memo, base, o, h);
        lap_memo.emplace(o, lap);
      }
      acc += kD2w[k + 3] * lap;
    }
  }
  return (double)(acc / h2);
}

}  // namespace cscx
