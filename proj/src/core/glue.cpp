#include "cscx/glue.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cscx/ale.hpp"
#include "cscx/dual.hpp"
#include "cscx/kahler.hpp"

namespace cscx {

namespace {

// Area of the unit sphere S^{2m-1}: 2 pi^m / (m-1)!.
double sphere_area(int m) {
  double fact = 1.0;
  for (int j = 2; j < m; ++j) fact *= double(j);
  return 2.0 * std::pow(M_PI, m) / fact;
}

// Collocation grid on Chebyshev-Lobatto nodes in t = log s, index 0 at the
// upper endpoint.  Ds[k] maps node values of a function to its (k+1)-st
// s-derivative on the same nodes; matrix powers of the spectral derivative
// are exact on the interpolation space.
struct Grid {
  int N = 0;
  Vec s;
  Mat Ds[4];
};

Grid make_grid(int N, double s_lo, double s_hi) {
  require(N >= 16 && N <= 200, Status::InvalidArgument,
          "collocation order out of range [16, 200]");
  require(s_lo > 0.0 && s_hi > s_lo * (1.0 + 1e-10), Status::InvalidArgument,
          "collocation interval is empty");
  const int n = N + 1;
  const double t_lo = std::log(s_lo), t_hi = std::log(s_hi);

  Vec x(n);
  for (int j = 0; j < n; ++j) x[j] = std::cos(M_PI * double(j) / double(N));

  Mat D(n, n, 0.0);
  auto c = [N](int j) { return (j == 0 || j == N) ? 2.0 : 1.0; };
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sign = (((i + j) & 1) != 0) ? -1.0 : 1.0;
      const double v = (c(i) / c(j)) * sign / (x[i] - x[j]);
      D(i, j) = v;
      rowsum += v;
    }
    D(i, i) = -rowsum;  // exact on constants
  }
  const double scale = 2.0 / (t_hi - t_lo);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) D(i, j) *= scale;

  Grid g;
  g.N = N;
  g.s.resize(n);
  for (int j = 0; j < n; ++j)
    g.s[j] = std::exp(t_lo + (x[j] + 1.0) * 0.5 * (t_hi - t_lo));
  // Pin the endpoints: exp(log s) can land one ulp outside [s_lo, s_hi],
  // which downstream domain checks would reject.
  g.s[0] = s_hi;
  g.s[N] = s_lo;

  const Mat D2 = matmul(D, D);
  const Mat D3 = matmul(D2, D);
  const Mat D4 = matmul(D3, D);
  for (auto& M : g.Ds) M = Mat(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double e1 = 1.0 / g.s[i];
    const double e2 = e1 * e1, e3 = e2 * e1, e4 = e2 * e2;
    for (int j = 0; j < n; ++j) {
      const double d1 = D(i, j), d2 = D2(i, j), d3 = D3(i, j), d4 = D4(i, j);
      g.Ds[0](i, j) = e1 * d1;
      g.Ds[1](i, j) = e2 * (d2 - d1);
      g.Ds[2](i, j) = e3 * (d3 - 3.0 * d2 + 2.0 * d1);
      g.Ds[3](i, j) = e4 * (d4 - 6.0 * d3 + 11.0 * d2 - 6.0 * d1);
    }
  }
  return g;
}

Vec mat_row(const Mat& a, int i) {
  return Vec(a.row(i), a.row(i) + a.cols());
}

// High-derivative rows carry large cancelling entries, so a plain double
// accumulation floors the residual three decades above the Newton tolerance.
// Quad accumulation makes each double*double product exact; keeping the state
// itself wider than double matters too, because fourth-order spectral rows at
// this order amplify the state's own rounding by ~1e8, which would otherwise
// floor the boundary traces near 1e-9.
long double ld_dot(const double* row, const std::vector<long double>& v) {
  __float128 acc = 0;
  for (std::size_t j = 0; j < v.size(); ++j)
    acc += static_cast<__float128>(row[j]) * static_cast<__float128>(v[j]);
  return static_cast<long double>(acc);
}

Vec value_row(int n, int i) {
  Vec r(n, 0.0);
  r[i] = 1.0;
  return r;
}

// Flat-metric Laplacian trace: 4 s u'' + 4 m u'.
Vec lap_row(const Grid& g, int m, int i) {
  const int n = g.N + 1;
  Vec r(n);
  for (int j = 0; j < n; ++j)
    r[j] = 4.0 * g.s[i] * g.Ds[1](i, j) + 4.0 * m * g.Ds[0](i, j);
  return r;
}

// Radial derivative: d/dr = 2 sqrt(s) d/ds.
Vec dr_row(const Grid& g, int i) {
  const int n = g.N + 1;
  Vec r(n);
  const double f = 2.0 * std::sqrt(g.s[i]);
  for (int j = 0; j < n; ++j) r[j] = f * g.Ds[0](i, j);
  return r;
}

// Radial derivative of the Laplacian: 2 sqrt(s) ((4m+4) u'' + 4 s u''').
Vec drlap_row(const Grid& g, int m, int i) {
  const int n = g.N + 1;
  Vec r(n);
  const double f = 2.0 * std::sqrt(g.s[i]);
  for (int j = 0; j < n; ++j)
    r[j] = f * ((4.0 * m + 4.0) * g.Ds[1](i, j) + 4.0 * g.s[i] * g.Ds[2](i, j));
  return r;
}

struct BcRow {
  Vec w;
  double nu_coef = 0.0;
  double rhs = 0.0;
};

// Damped Newton collocation solve of scal(base + W) = target (+ nu when the
// constant is an unknown) with linear boundary rows.  The state persists
// between solves so the matching loop can warm start.
class RadialBVP {
 public:
  RadialBVP(int m, Grid grid, ProfilePtr base, bool nu_unknown, double tol,
            int itmax)
      : m_(m),
        g_(std::move(grid)),
        base_(std::move(base)),
        nu_unknown_(nu_unknown),
        tol_(tol),
        itmax_(itmax) {
    const int n = g_.N + 1;
    Wx_.assign(n, 0.0L);
    jets_.resize(n);
    for (int i = 0; i < n; ++i) jets_[i] = base_->jet(g_.s[i]);
  }

  std::vector<BcRow> bcs;
  double nu = 0.0;
  double residual = 0.0;
  int steps_total = 0;

  const Grid& grid() const { return g_; }
  const std::vector<ProfileJet>& jets() const { return jets_; }
  double state(int i) const { return static_cast<double>(Wx_[i]); }
  double contract(const Vec& row) const { return double(ld_dot(row.data(), Wx_)); }

  void save_state() {
    Wsave_ = Wx_;
    nusave_ = nu;
  }
  void restore_state() {
    Wx_ = Wsave_;
    nu = nusave_;
  }

  void solve(double target) {
    const int nw = g_.N + 1;
    const int nbc = int(bcs.size());
    const int n = nw + (nu_unknown_ ? 1 : 0);
    const int n_int = n - nbc;
    require(n_int > 0 && n_int <= nw - 2, Status::InvalidArgument,
            "boundary row count does not fit the collocation order");
    // Interior equations live on a centered block of nodes; the drop/2 nodes
    // nearest each endpoint are where the boundary rows take over.
    const int drop = nw - n_int;
    const int lo = drop / 2 + drop % 2;

    std::vector<long double> w1(nw), w2(nw), w3(nw), w4(nw);
    std::vector<long double> bestW = Wx_;
    double bestnu = nu;
    double bestres = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int iter = 0;; ++iter) {
      for (int i = 0; i < nw; ++i) {
        w1[i] = ld_dot(g_.Ds[0].row(i), Wx_);
        w2[i] = ld_dot(g_.Ds[1].row(i), Wx_);
        w3[i] = ld_dot(g_.Ds[2].row(i), Wx_);
        w4[i] = ld_dot(g_.Ds[3].row(i), Wx_);
      }
      Mat J(n, n, 0.0);
      Vec R(n, 0.0);
      for (int r = 0; r < nbc; ++r) {
        const BcRow& b = bcs[r];
        for (int j = 0; j < nw; ++j) J(r, j) = b.w[j];
        if (nu_unknown_) J(r, nw) = b.nu_coef;
        R[r] = double(ld_dot(b.w.data(), Wx_) + (long double)(b.nu_coef * nu) -
                      (long double)b.rhs);
      }
      for (int q = 0; q < n_int; ++q) {
        const int i = lo + q;
        const int r = nbc + q;
        const double s = g_.s[i];
        const ProfileJet& bj = jets_[i];
        const long double p = bj.F1 + w1[i];
        const long double qd = bj.F2 + w2[i];
        const long double c3 = bj.F3 + w3[i];
        const long double d4 = bj.F4 + w4[i];
        R[r] = double(scal_from_derivs<long double>(s, p, qd, c3, d4, m_) -
                      static_cast<long double>(target)) -
               (nu_unknown_ ? nu : 0.0);
        double part[4];
        for (int k = 0; k < 4; ++k) {
          const Dual sv = scal_from_derivs<Dual>(
              Dual(s), Dual(double(p), k == 0 ? 1.0 : 0.0),
              Dual(double(qd), k == 1 ? 1.0 : 0.0),
              Dual(double(c3), k == 2 ? 1.0 : 0.0),
              Dual(double(d4), k == 3 ? 1.0 : 0.0), m_);
          part[k] = sv.d;
        }
        for (int j = 0; j < nw; ++j)
          J(r, j) = part[0] * g_.Ds[0](i, j) + part[1] * g_.Ds[1](i, j) +
                    part[2] * g_.Ds[2](i, j) + part[3] * g_.Ds[3](i, j);
        if (nu_unknown_) J(r, nw) = -1.0;
      }

      const double res = max_abs(R);
      if (std::getenv("CSCX_GLUE_DEBUG")) {
        double rb = 0.0, ri = 0.0;
        int iw = -1;
        for (int r = 0; r < n; ++r) {
          if (r < nbc)
            rb = std::max(rb, std::fabs(R[r]));
          else if (std::fabs(R[r]) > ri) {
            ri = std::fabs(R[r]);
            iw = lo + (r - nbc);
          }
        }
        std::fprintf(stderr,
                     "  [bvp m=%d nu=%d] iter=%d res=%.3e bc=%.3e int=%.3e "
                     "@s=%.4g nu=%.6e\n",
                     m_, int(nu_unknown_), iter, res, rb, ri,
                     iw >= 0 ? g_.s[iw] : -1.0, nu);
      }
      require(std::isfinite(res), Status::NewtonDivergence,
              "collocation residual is not finite");
      if (res < bestres) {
        bestres = res;
        bestW = Wx_;
        bestnu = nu;
        stall = 0;
      } else {
        ++stall;
      }
      if (res <= tol_) {
        residual = res;
        return;
      }
      if (stall >= 3 || iter >= itmax_) break;

      for (auto& v : R) v = -v;
      // Boundary rows are O(1) while interior rows carry fourth-derivative
      // weights; equilibrating keeps the LU solve from losing the small rows.
      for (int r = 0; r < n; ++r) {
        double mx = 0.0;
        for (int j = 0; j < n; ++j) mx = std::max(mx, std::fabs(J(r, j)));
        if (mx > 0.0) {
          for (int j = 0; j < n; ++j) J(r, j) /= mx;
          R[r] /= mx;
        }
      }
      Vec d = lu_solve(J, R);
      // One pass of mixed-precision refinement; without it the factorization
      // error floors the Newton residual near 1e-8 at large data.
      {
        Vec r2(n);
        for (int i = 0; i < n; ++i) {
          __float128 acc = R[i];
          for (int j = 0; j < n; ++j)
            acc -= static_cast<__float128>(J(i, j)) * static_cast<__float128>(d[j]);
          r2[i] = static_cast<double>(acc);
        }
        const Vec dc = lu_solve(J, r2);
        for (int i = 0; i < n; ++i) d[i] += dc[i];
      }

      Vec e1(nw), e2(nw);
      for (int i = 0; i < nw; ++i) {
        double a1 = 0.0, a2 = 0.0;
        for (int j = 0; j < nw; ++j) {
          a1 += g_.Ds[0](i, j) * d[j];
          a2 += g_.Ds[1](i, j) * d[j];
        }
        e1[i] = a1;
        e2[i] = a2;
      }
      double alpha = 1.0;
      bool okpos = false;
      for (int h = 0; h <= 40 && !okpos; ++h) {
        okpos = true;
        for (int i = 0; i < nw && okpos; ++i) {
          const double p = double(jets_[i].F1 + w1[i]) + alpha * e1[i];
          const double G =
              p + g_.s[i] * (double(jets_[i].F2 + w2[i]) + alpha * e2[i]);
          okpos = p > 0.0 && G > 0.0;
        }
        if (!okpos) alpha *= 0.5;
      }
      require(okpos, Status::DegenerateMetric,
              "metric positivity lost along the Newton step");
      for (int j = 0; j < nw; ++j) Wx_[j] += (long double)(alpha * d[j]);
      if (nu_unknown_) nu += alpha * d[nw];
      ++steps_total;
    }

    // Stalled or out of iterations: keep the best iterate.  The residual
    // floor is set by roundoff in the fourth-derivative contractions, so
    // stagnating above tol is normal; only a genuinely unsolved system
    // (residual far above the floor) is an error.
    Wx_ = bestW;
    nu = bestnu;
    residual = bestres;
    require(bestres <= 1e-3, Status::NewtonDivergence,
            "collocation solve stalled above tolerance");
  }

 private:
  int m_;
  Grid g_;
  ProfilePtr base_;
  bool nu_unknown_;
  double tol_;
  int itmax_;
  std::vector<ProfileJet> jets_;
  // Newton state is kept in long double: spectral third/fourth derivative
  // rows amplify the state's own rounding by ~1e8, so a double-stored state
  // floors the boundary traces (and hence the matching defect) near 1e-9.
  std::vector<long double> Wx_, Wsave_;
  double nusave_ = 0.0;
};

GluingConfig resolved(GluingConfig cfg) {
  if (cfg.theta == 0.0) cfg.theta = default_theta(cfg.m);
  require(cfg.newton_tol > 0.0 && cfg.match_tol > 0.0, Status::InvalidArgument,
          "tolerances must be positive");
  require(cfg.newton_itmax >= 1 && cfg.match_itmax >= 1, Status::InvalidArgument,
          "iteration budgets must be positive");
  require(cfg.kappa > 0.0, Status::InvalidArgument, "matching ball radius must be positive");
  require(cfg.vol_bulk > 0.0, Status::InvalidArgument, "bulk volume must be positive");
  return cfg;
}

std::vector<BcRow> outer_rows(const Grid& g, const GluingConfig& cfg) {
  const int n = g.N + 1, iN = g.N, m = cfg.m;
  std::vector<BcRow> bcs(5);
  // Prescribed value and Laplacian at r_eps (rhs filled per solve).
  bcs[0].w = value_row(n, iN);
  bcs[1].w = lap_row(g, m, iN);
  // Zero value at r0.
  bcs[2].w = value_row(n, 0);
  // No-growth row at r0: the combination Delta + (r0/(2m-2)) d/dr Delta
  // annihilates the decaying biharmonic branch, leaving the growth tied to nu.
  bcs[3].w = lap_row(g, m, 0);
  {
    const Vec dl = drlap_row(g, m, 0);
    const double r0 = cfg.r0;
    for (int j = 0; j < n; ++j) bcs[3].w[j] += r0 / (2.0 * m - 2.0) * dl[j];
    bcs[3].nu_coef = -r0 * r0 / (4.0 * (m - 1.0));
  }
  // Mean-value row at r0: the flux of d/dr Delta through the cutoff sphere
  // balances nu against the bulk volume.
  bcs[4].w = drlap_row(g, m, 0);
  bcs[4].nu_coef =
      -cfg.vol_bulk / (sphere_area(m) * std::pow(cfg.r0, 2.0 * m - 1.0));
  return bcs;
}

std::vector<BcRow> inner_rows(const Grid& g, const GluingConfig& cfg) {
  const int n = g.N + 1, iN = g.N, m = cfg.m;
  std::vector<BcRow> bcs(4);
  // Prescribed value and Laplacian at R_eps (rhs filled per solve).
  bcs[0].w = value_row(n, 0);
  bcs[1].w = lap_row(g, m, 0);
  // Flat second and third radial derivatives at the inner cutoff R0.
  bcs[2].w = mat_row(g.Ds[1], iN);
  bcs[3].w = drlap_row(g, m, iN);
  return bcs;
}

RegionSolution package_region(const RadialBVP& b, int m, double clog) {
  const Grid& g = b.grid();
  const int n = g.N + 1;
  Vec s(n), f(n), f1(n), f2(n), w(n);
  for (int i = 0; i < n; ++i) {
    const int r = n - 1 - i;  // grid is stored descending
    const double w1 = b.contract(mat_row(g.Ds[0], r));
    const double w2 = b.contract(mat_row(g.Ds[1], r));
    s[i] = g.s[r];
    w[i] = b.state(r);
    f[i] = b.jets()[r].F + b.state(r);
    f1[i] = b.jets()[r].F1 + w1;
    f2[i] = b.jets()[r].F2 + w2;
  }
  RegionSolution out;
  out.potential = std::make_shared<QuinticHermiteProfile>(m, s, f, f1, f2, clog);
  out.s_nodes = std::move(s);
  out.w = std::move(w);
  out.nu = b.nu;
  out.residual = b.residual;
  out.newton_steps = b.steps_total;
  return out;
}

// Both regions plus the fixed transfer data across the neck.  eval(V, K)
// runs the outer solve, hands the rescaled boundary data to the inner solve
// and returns the jump of (r d/dr, r^3 d/dr Delta) across r_eps.
struct Matcher {
  GluingConfig cfg;
  NeckRadii nr;
  ProfilePtr ale;
  double sigma;  // R_eps^2
  RadialBVP outer;
  RadialBVP inner;
  double shift = 0.0;
  double dev_v = 0.0, lap_dev = 0.0, dr_dev = 0.0, drlap_dev = 0.0;
  Vec out_dr, out_drlap, out_lap, in_dr, in_drlap;
  double ut_val = 0.0, ut_lap = 0.0;

  explicit Matcher(const GluingConfig& cfg_in)
      : cfg(resolved(cfg_in)),
        nr(neck_radii(cfg)),
        ale(weighted_ale_model(cfg, nr.R_eps)),
        sigma(nr.R_eps * nr.R_eps),
        outer(cfg.m, make_grid(cfg.n_nodes, nr.r_eps * nr.r_eps, cfg.r0 * cfg.r0),
              flat_profile(cfg.m), true, cfg.newton_tol, cfg.newton_itmax),
        inner(cfg.m, make_grid(cfg.n_nodes, cfg.R0 * cfg.R0, sigma), ale, false,
              cfg.newton_tol, cfg.newton_itmax) {
    const ProfileJet aj = ale->jet(sigma);
    const double d1 = aj.F1 - 0.5, d2 = aj.F2, d3 = aj.F3;
    dev_v = aj.F - 0.5 * sigma;
    lap_dev = 4.0 * sigma * d2 + 4.0 * cfg.m * d1;
    dr_dev = 2.0 * std::sqrt(sigma) * d1;
    drlap_dev =
        2.0 * std::sqrt(sigma) * ((4.0 * cfg.m + 4.0) * d2 + 4.0 * sigma * d3);
    // Log branches scale anomalously under s -> s/eps^2; the additive shift
    // re-aligns them across the neck.  Only the m = 2 models carry one.
    shift = cfg.m == 2
                ? -cfg.eps * cfg.eps * ale->log_coeff_infinity() * std::log(sigma)
                : 0.0;

    outer.bcs = outer_rows(outer.grid(), cfg);
    inner.bcs = inner_rows(inner.grid(), cfg);
    const int iN = cfg.n_nodes;
    out_dr = dr_row(outer.grid(), iN);
    out_drlap = drlap_row(outer.grid(), cfg.m, iN);
    out_lap = lap_row(outer.grid(), cfg.m, iN);
    in_dr = dr_row(inner.grid(), 0);
    in_drlap = drlap_row(inner.grid(), cfg.m, 0);
  }

  void save_state() {
    outer.save_state();
    inner.save_state();
  }
  void restore_state() {
    outer.restore_state();
    inner.restore_state();
  }

  std::pair<double, double> eval(double V, double K) {
    const double se = nr.r_eps * nr.r_eps;
    const double e2 = cfg.eps * cfg.eps;
    outer.bcs[0].rhs = V;
    outer.bcs[1].rhs = K / se;
    outer.solve(0.0);
    ut_val = (V - shift) / e2 - dev_v;
    ut_lap = K / (e2 * sigma) - lap_dev;
    inner.bcs[0].rhs = ut_val;
    inner.bcs[1].rhs = ut_lap;
    inner.solve(e2 * outer.nu);
    const double T2o = nr.r_eps * outer.contract(out_dr);
    const double T4o = nr.r_eps * se * outer.contract(out_drlap);
    const double T2i = e2 * nr.R_eps * (dr_dev + inner.contract(in_dr));
    const double T4i =
        e2 * nr.R_eps * sigma * (drlap_dev + inner.contract(in_drlap));
    return {T2o - T2i, T4o - T4i};
  }
};

}  // namespace

double default_theta(int m) { return (double(m) - 1.0) / double(m); }

MatchScheme match_scheme_from_name(const std::string& name) {
  if (name == "base") return MatchScheme::Base;
  if (name == "model") return MatchScheme::Model;
  if (name == "newton") return MatchScheme::Newton;
  fail(Status::InvalidArgument, "unknown matching scheme '" + name + "'");
}

std::string match_scheme_name(MatchScheme scheme) {
  switch (scheme) {
    case MatchScheme::Base: return "base";
    case MatchScheme::Model: return "model";
    case MatchScheme::Newton: return "newton";
  }
  fail(Status::InvalidArgument, "unknown matching scheme");
}

NeckRadii neck_radii(const GluingConfig& cfg_in) {
  GluingConfig cfg = cfg_in;
  require(cfg.m >= 2 && cfg.m <= 8, Status::WrongDimension,
          "complex dimension out of range [2, 8]");
  require(cfg.eps > 0.0 && cfg.eps < 1.0, Status::InvalidArgument,
          "gluing parameter must lie in (0, 1)");
  if (cfg.theta == 0.0) cfg.theta = default_theta(cfg.m);
  require(cfg.theta > 0.0 && cfg.theta < 1.0, Status::InvalidArgument,
          "neck exponent must lie in (0, 1)");
  require(cfg.r0 > 0.0 && cfg.R0 > 0.0, Status::InvalidArgument,
          "cutoff radii must be positive");
  NeckRadii nr;
  nr.r_eps = std::pow(cfg.eps, cfg.theta);
  nr.R_eps = std::pow(cfg.eps, cfg.theta - 1.0);
  require(cfg.eps * cfg.R0 < nr.r_eps && nr.r_eps < cfg.r0, Status::NeckCollision,
          "neck radii collide: need eps * R0 < eps^theta < r0");
  return nr;
}

ProfilePtr weighted_ale_model(const GluingConfig& cfg, double R_eps) {
  require(cfg.a_weight > 0.0, Status::InvalidArgument,
          "model weight must be positive");
  require(R_eps > 0.0, Status::InvalidArgument, "R_eps must be positive");
  const double a = cfg.a_weight;
  if (cfg.ale == "burns") {
    require(cfg.m == 2, Status::WrongDimension,
            "the blow-up slope model lives in complex dimension two");
    return std::make_shared<PowerLogProfile>(
        2, std::vector<std::pair<double, double>>{{0.5, 1.0}}, a);
  }
  if (cfg.ale == "simanca") {
    double s_max = std::max(100.0, R_eps * R_eps);
    SimancaSolution sol = simanca_solve(cfg.m, s_max, 1e-12);
    // The unit-slope rescale divides the argument by 2 lambda and the weight
    // by a; make sure the profile still covers sigma = R_eps^2.
    if (2.0 * sol.lambda * a * s_max < R_eps * R_eps) {
      s_max = R_eps * R_eps / (2.0 * sol.lambda * a) * 1.02;
      sol = simanca_solve(cfg.m, s_max, 1e-12);
    }
    ProfilePtr unit = ale_rescale(sol.profile, sol.lambda, -sol.b);
    return std::make_shared<LinearScaleProfile>(unit, a, a);
  }
  if (cfg.ale == "calabi") {
    ProfilePtr unit = ale_rescale(calabi_potential(cfg.m), 1.0, 0.0);
    return std::make_shared<LinearScaleProfile>(unit, a, a);
  }
  fail(Status::InvalidArgument, "unknown model kind '" + cfg.ale + "'");
}

RegionSolution solve_outer(const GluingConfig& cfg_in, const CauchyData& data,
                           double target_const) {
  const GluingConfig cfg = resolved(cfg_in);
  const NeckRadii nr = neck_radii(cfg);
  const double se = nr.r_eps * nr.r_eps;
  RadialBVP bvp(cfg.m, make_grid(cfg.n_nodes, se, cfg.r0 * cfg.r0),
                flat_profile(cfg.m), true, cfg.newton_tol, cfg.newton_itmax);
  bvp.bcs = outer_rows(bvp.grid(), cfg);
  bvp.bcs[0].rhs = data.h;
  bvp.bcs[1].rhs = data.k / se;
  bvp.solve(target_const);
  return package_region(bvp, cfg.m, 0.0);
}

RegionSolution solve_inner(const GluingConfig& cfg_in, const CauchyData& data,
                           double nu) {
  const GluingConfig cfg = resolved(cfg_in);
  const NeckRadii nr = neck_radii(cfg);
  ProfilePtr ale = weighted_ale_model(cfg, nr.R_eps);
  const double sigma = nr.R_eps * nr.R_eps;
  RadialBVP bvp(cfg.m, make_grid(cfg.n_nodes, cfg.R0 * cfg.R0, sigma), ale,
                false, cfg.newton_tol, cfg.newton_itmax);
  bvp.bcs = inner_rows(bvp.grid(), cfg);
  bvp.bcs[0].rhs = data.h;
  bvp.bcs[1].rhs = data.k / sigma;
  bvp.solve(cfg.eps * cfg.eps * nu);
  RegionSolution out = package_region(bvp, cfg.m, ale->c_log());
  out.nu = 0.0;
  return out;
}

GluedSolution match(const GluingConfig& cfg_in) {
  Matcher mm(cfg_in);
  const GluingConfig& cfg = mm.cfg;

  // BVP failures after the first defect evaluation mean the alternating
  // solve drove the data out of the solvable regime.
  bool first_eval = true;
  auto guarded = [&](double v, double k) {
    try {
      return mm.eval(v, k);
    } catch (const Error& e) {
      if (!first_eval && status_exit_class(e.status()) == 3 &&
          e.status() != Status::FixedPointDivergence)
        fail(Status::FixedPointDivergence,
             std::string("alternating solve broke down: ") + e.what());
      throw;
    }
  };

  double V = 0.0, K = 0.0;
  auto d = guarded(0.0, 0.0);
  first_eval = false;
  const double defect0 = std::max(std::abs(d.first), std::abs(d.second));
  int evals = 0;  // defect evaluations beyond the initial one
  double contraction = 0.0;
  bool converged = defect0 <= cfg.match_tol;

  auto probe = [&](double Vc, double Kc, std::pair<double, double> dc,
                   double dn) {
    const double h = std::max(1e-7, 1e-3 * dn);
    mm.save_state();
    const auto da = guarded(Vc + h, Kc);
    const auto db = guarded(Vc, Kc + h);
    mm.restore_state();
    evals += 2;
    Mat M(2, 2);
    M(0, 0) = (da.first - dc.first) / h;
    M(0, 1) = (db.first - dc.first) / h;
    M(1, 0) = (da.second - dc.second) / h;
    M(1, 1) = (db.second - dc.second) / h;
    return M;
  };

  if (!converged) {
    Mat M0;
    if (cfg.scheme == MatchScheme::Base) M0 = probe(V, K, d, defect0);
    double dn = defect0;
    double best_dn = defect0;
    int flat = 0;
    const double ball = cfg.kappa * std::pow(mm.nr.r_eps, 4.0);
    for (int n = 1; n <= cfg.match_itmax && !converged; ++n) {
      double dV = 0.0, dK = 0.0;
      if (cfg.scheme == MatchScheme::Model) {
        const CauchyData u = invert_mismatch_map(cfg.m, 0, d.first, d.second);
        dV = u.h;
        dK = u.k;
        // The m = 2 outer log branch feeds the k-datum back into the value.
        if (cfg.m == 2) dV += 0.5 * std::log(mm.nr.r_eps) * u.k;
      } else {
        if (cfg.scheme == MatchScheme::Newton) M0 = probe(V, K, d, dn);
        const double det = M0(0, 0) * M0(1, 1) - M0(0, 1) * M0(1, 0);
        require(std::isfinite(det) && det != 0.0, Status::FixedPointDivergence,
                "measured defect map is singular");
        dV = (-d.first * M0(1, 1) + d.second * M0(0, 1)) / det;
        dK = (-d.second * M0(0, 0) + d.first * M0(1, 0)) / det;
      }
      V += dV;
      K += dK;
      require(std::abs(V) <= ball && std::abs(K) <= ball,
              Status::FixedPointDivergence,
              "boundary data left the matching ball");
      d = guarded(V, K);
      ++evals;
      require(std::abs(mm.outer.nu) <= 1.0, Status::FixedPointDivergence,
              "curvature constant left its a priori bound");
      dn = std::max(std::abs(d.first), std::abs(d.second));
      if (std::getenv("CSCX_GLUE_DEBUG"))
        std::fprintf(stderr, "  [match] n=%d dn=%.3e V=%.3e K=%.3e nu=%.3e\n", n,
                     dn, V, K, mm.outer.nu);
      if (dn > 10.0 * cfg.match_tol) {
        contraction = std::pow(dn / defect0, 1.0 / double(n));
        require(n <= 12 || contraction <= 0.9, Status::FixedPointDivergence,
                "defect ratio settled above 0.9");
      }
      // A defect that stops improving has hit the solver noise floor; more
      // sweeps cannot buy the remaining decades.
      if (dn < best_dn * (1.0 - 1e-3)) {
        best_dn = dn;
        flat = 0;
      } else {
        require(++flat < 10, Status::NonConvergence,
                "matching defect stagnated above the tolerance");
      }
      converged = dn <= cfg.match_tol;
    }
    require(converged, Status::NonConvergence,
            "matching loop exhausted its iteration budget");
  }

  GluedSolution out;
  out.m = cfg.m;
  out.eps = cfg.eps;
  out.theta = cfg.theta;
  out.r_eps = mm.nr.r_eps;
  out.R_eps = mm.nr.R_eps;
  out.nu = mm.outer.nu;
  out.boundary = CauchyData{V, K};
  out.inner_data = CauchyData{mm.ut_val, mm.ut_lap * mm.sigma};
  out.shift = mm.shift;
  out.defect0 = defect0;
  out.iterations = evals;
  out.contraction = contraction;

  const double se = mm.nr.r_eps * mm.nr.r_eps;
  const double e2 = cfg.eps * cfg.eps;
  const int iN = cfg.n_nodes;
  const ProfileJet aj = mm.ale->jet(mm.sigma);
  const double value_out = 0.5 * se + mm.outer.state(iN);
  const double value_in = e2 * (aj.F + mm.inner.state(0)) + mm.shift;
  const double lap_out = mm.outer.contract(mm.out_lap);
  const double lap_in =
      mm.lap_dev + mm.inner.contract(lap_row(mm.inner.grid(), cfg.m, 0));
  out.mismatch[0] = value_out - value_in;
  out.mismatch[1] = d.first;
  out.mismatch[2] = se * (lap_out - lap_in);
  out.mismatch[3] = d.second;

  out.outer = package_region(mm.outer, cfg.m, 0.0);
  out.inner = package_region(mm.inner, cfg.m, mm.ale->c_log());
  out.inner.nu = 0.0;
  return out;
}

ConvergenceStudy convergence_study(GluingConfig cfg,
                                   const std::vector<double>& eps_list) {
  ConvergenceStudy st;
  Vec lx, ld, lnu;
  for (const double e : eps_list) {
    cfg.eps = e;
    ConvergenceRow row;
    row.eps = e;
    try {
      row.r_eps = neck_radii(resolved(cfg)).r_eps;
    } catch (const Error&) {
      row.r_eps = 0.0;
    }
    try {
      const GluedSolution g = match(cfg);
      row.defect0 = g.defect0;
      row.mismatch = std::max(
          std::max(std::abs(g.mismatch[0]), std::abs(g.mismatch[1])),
          std::max(std::abs(g.mismatch[2]), std::abs(g.mismatch[3])));
      row.nu = g.nu;
      row.iterations = g.iterations;
      row.ok = true;
    } catch (const Error& err) {
      row.ok = false;
      row.error = err.what();
    }
    if (row.ok && row.r_eps > 0.0 && row.defect0 > 0.0 && row.nu != 0.0) {
      lx.push_back(std::log(row.r_eps));
      ld.push_back(std::log(row.defect0));
      lnu.push_back(std::log(std::abs(row.nu)));
    }
    st.rows.push_back(std::move(row));
  }
  if (lx.size() >= 2) {
    st.defect_slope = fit_line(lx, ld).slope;
    st.nu_slope = fit_line(lx, lnu).slope;
  } else {
    st.defect_slope = std::numeric_limits<double>::quiet_NaN();
    st.nu_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return st;
}

double m2_log_shift(const GluingConfig& cfg_in, double k0) {
  const GluingConfig cfg = resolved(cfg_in);
  require(cfg.m == 2, Status::WrongDimension,
          "the log matching shift exists only in complex dimension two");
  const NeckRadii nr = neck_radii(cfg);
  ProfilePtr ale = weighted_ale_model(cfg, nr.R_eps);
  // The profile stores the log s slope; the log-radius coefficient is twice
  // that, hence the factor two on the model part.
  return -2.0 * cfg.eps * cfg.eps * ale->log_coeff_infinity() * std::log(nr.R_eps) +
         0.5 * k0 * std::log(nr.r_eps);
}

}  // namespace cscx
