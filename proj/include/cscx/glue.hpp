#pragma once

#include <array>
#include <string>
#include <vector>

#include "cscx/common.hpp"
#include "cscx/linalg.hpp"
#include "cscx/modes.hpp"
#include "cscx/profile.hpp"

namespace cscx {

// How the boundary-data update between matching sweeps is chosen:
//   Base   - Picard preconditioned once by a measured defect map,
//   Model  - closed-form mode-zero jump map (with the m = 2 log correction),
//   Newton - defect map re-measured around every iterate.
enum class MatchScheme { Base, Model, Newton };

MatchScheme match_scheme_from_name(const std::string& name);
std::string match_scheme_name(MatchScheme scheme);

struct GluingConfig {
  int m = 2;
  double eps = 1e-2;
  // Neck exponent: r_eps = eps^theta, R_eps = eps^(theta - 1).  Zero selects
  // the default (m - 1)/m.
  double theta = 0.0;
  double r0 = 0.9;  // outer cutoff radius
  double R0 = 1.0;  // inner cutoff radius, model coordinates
  std::string ale = "burns";  // "burns" | "simanca" | "calabi"
  double a_weight = 1.0;      // weight multiplying the model deviation
  double vol_bulk = 8.0;      // manifold volume entering the mean-value row
  double kappa = 12.0;        // matching ball radius in units of r_eps^4
  int n_nodes = 40;           // collocation order per region
  MatchScheme scheme = MatchScheme::Base;
  double newton_tol = 1e-11;
  int newton_itmax = 60;
  double match_tol = 1e-9;
  int match_itmax = 60;
};

struct NeckRadii {
  double r_eps = 0.0;
  double R_eps = 0.0;
};

double default_theta(int m);

// Validates the configuration and computes the neck radii.  Fails with
// NeckCollision unless eps * R0 < r_eps < r0.
NeckRadii neck_radii(const GluingConfig& cfg);

// Scalar-flat model potential used on the inner region, weighted so the
// deviation from the flat slope s/2 is multiplied by a_weight.  R_eps fixes
// how far out the profile must stay valid.
ProfilePtr weighted_ale_model(const GluingConfig& cfg, double R_eps);

// One region of the glued potential: the composite profile together with the
// collocation data it was solved on.
struct RegionSolution {
  ProfilePtr potential;  // base + correction as an interpolating profile
  Vec s_nodes;           // ascending collocation nodes
  Vec w;                 // correction values on s_nodes
  double nu = 0.0;       // curvature constant (outer problem only)
  double residual = 0.0;
  int newton_steps = 0;
};

// Outer problem on [r_eps, r0] over the flat cell: prescribed value and
// Laplacian at r_eps, zero value at r0, no-growth and mean-value rows tied to
// the unknown constant nu.  Interior equation: scal = target_const + nu.
RegionSolution solve_outer(const GluingConfig& cfg, const CauchyData& data,
                           double target_const = 0.0);

// Inner problem on [R0, R_eps] over the weighted model: prescribed value and
// Laplacian at R_eps, flat second and third radial derivatives at R0.
// Interior equation: scal = eps^2 * nu.
RegionSolution solve_inner(const GluingConfig& cfg, const CauchyData& data,
                           double nu);

struct GluedSolution {
  int m = 0;
  double eps = 0.0;
  double theta = 0.0;
  double r_eps = 0.0;
  double R_eps = 0.0;
  double nu = 0.0;
  CauchyData boundary;    // converged outer data at r_eps
  CauchyData inner_data;  // transferred inner data at R_eps
  double shift = 0.0;     // additive log-matching constant (m = 2 only)
  double defect0 = 0.0;   // defect at zero boundary data
  // Jump of (value, r dr, r^2 lap, r^3 dr lap) across r_eps between the outer
  // potential and the rescaled inner one.
  std::array<double, 4> mismatch{{0.0, 0.0, 0.0, 0.0}};
  int iterations = 0;      // defect evaluations beyond the initial one
  double contraction = 0.0;  // cumulative geometric defect ratio
  RegionSolution outer;
  RegionSolution inner;
};

// Runs the alternating solve until the normal-derivative defects fall below
// cfg.match_tol.  Fails with FixedPointDivergence when the data leave the
// matching ball or the defect ratio settles above 0.9.
GluedSolution match(const GluingConfig& cfg);

struct ConvergenceRow {
  double eps = 0.0;
  double r_eps = 0.0;
  double defect0 = 0.0;
  double mismatch = 0.0;  // max abs converged jump
  double nu = 0.0;
  int iterations = 0;
  bool ok = false;
  std::string error;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  // Log-log slopes against r_eps over the successful rows; NaN when fewer
  // than two rows succeeded.
  double defect_slope = 0.0;
  double nu_slope = 0.0;
};

// Runs match() once per entry of eps_list (descending or not, kept in input
// order).  Failures are recorded on their row instead of aborting the study.
ConvergenceStudy convergence_study(GluingConfig cfg,
                                   const std::vector<double>& eps_list);

// Additive constant aligning the m = 2 log branches across the neck:
// -2 eps^2 c_log log(R_eps) + (k0 / 2) log(r_eps), where c_log is the log s
// slope of the weighted model (half the log-radius coefficient).  Fails with
// WrongDimension unless m = 2.
double m2_log_shift(const GluingConfig& cfg, double k0 = 0.0);

}  // namespace cscx
