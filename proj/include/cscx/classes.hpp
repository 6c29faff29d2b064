#pragma once

#include <cstddef>
#include <vector>

#include "cscx/linalg.hpp"

namespace cscx {

// Cohomology bookkeeping for a blow-up at n points with glueing weights a_j:
// the Kahler class loses eps^2 a_j times each exceptional divisor and the
// first Chern class loses (m-1) times each.  The corrections below follow the
// displayed intersection formulas verbatim, with the self-intersection sign
// (-1)^{m-1} and the weight sums entering linearly.  (A remark elsewhere
// assigns the exceptional volume a_j^{m-1} eps^{2m-2}; that convention is
// deliberately not blended in here.)
struct BlowupClassData {
  int m = 2;
  double vol_class = 1.0;    // [omega]^m, positive
  double chern_pair = 0.0;   // c_1 cup [omega]^{m-1}
  std::vector<double> weights;  // a_j > 0
  std::size_t n_points = 0;     // must equal weights.size()
};

BlowupClassData make_class_data(int m, double vol_class, double chern_pair,
                                std::vector<double> weights);

struct BlowupClasses {
  double vol = 0.0;    // [omega_eps]^m
  double chern = 0.0;  // c_1 cup [omega_eps]^{m-1}
};

// vol + (-1)^{m-1} eps^{2m} sum(a), chern - eps^{2m-2} (m-1) sum(a).
// Throws NegativeVolume when the correction exhausts the volume.
BlowupClasses blowup_classes(const BlowupClassData& data, double eps);

// m * chern(eps) / vol(eps): the average scalar curvature of the blown-up
// class as an exact rational function of eps.
double average_scal(const BlowupClassData& data, double eps);

// Scans the analytic eps-derivative of average_scal on (0, eps_max] and
// reports the first point where it fails to decrease (or where the volume
// denominator dies).  Report-style: never throws on a violation.
struct MonotonicityReport {
  bool decreasing = false;
  bool constant = false;          // empty weight list: nothing varies
  double first_violation = -1.0;  // eps of the first failure, -1 when none
};

MonotonicityReport monotonicity_check(const BlowupClassData& data, double eps_max);

// User-supplied base family: a sampled monotone table of the base average
// scalar curvature against the deformation parameter t, with a sign change
// across the range.  Values between samples interpolate linearly.
struct BaseFamily {
  Vec t;  // strictly increasing
  Vec s;  // s(t) samples
};

double family_scal(const BaseFamily& family, double t);

// Bisects t -> average_scal(data(t), eps), where data(t) is the template with
// its chern pair replaced by the family-implied value vol * s(t) / m.  The
// returned parameter satisfies |average_scal| <= 1e-12.  Throws NoSignChange
// when the endpoints do not bracket a root.
double zero_scal_solve(const BaseFamily& family, const BlowupClassData& data_template,
                       double eps);

}  // namespace cscx
