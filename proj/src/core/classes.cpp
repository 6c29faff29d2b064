#include "cscx/classes.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "cscx/common.hpp"

namespace cscx {
namespace {

void check_data(const BlowupClassData& d) {
  require(d.m >= 2, Status::InvalidArgument, "class data: need m >= 2");
  require(d.vol_class > 0.0, Status::InvalidArgument, "class data: vol_class <= 0");
  require(d.n_points == d.weights.size(), Status::InvalidArgument,
          "class data: n_points disagrees with the weight list");
  for (double a : d.weights)
    require(a > 0.0, Status::InvalidArgument, "class data: weights must be positive");
}

double weight_sum(const BlowupClassData& d) {
  double acc = 0.0;
  for (double a : d.weights) acc += a;
  return acc;
}

// (-1)^{m-1}: the top self-intersection of an exceptional divisor.
double self_intersection_sign(int m) { return (m % 2 == 0) ? -1.0 : 1.0; }

}  // namespace

BlowupClassData make_class_data(int m, double vol_class, double chern_pair,
                                std::vector<double> weights) {
  BlowupClassData d;
  d.m = m;
  d.vol_class = vol_class;
  d.chern_pair = chern_pair;
  d.n_points = weights.size();
  d.weights = std::move(weights);
  check_data(d);
  return d;
}

BlowupClasses blowup_classes(const BlowupClassData& data, double eps) {
  check_data(data);
  require(eps >= 0.0, Status::InvalidArgument, "blowup_classes: eps < 0");
  const double a = weight_sum(data);
  const int m = data.m;
  BlowupClasses out;
  out.vol = data.vol_class + self_intersection_sign(m) * std::pow(eps, 2 * m) * a;
  out.chern = data.chern_pair - std::pow(eps, 2 * m - 2) * double(m - 1) * a;
  require(out.vol > 0.0, Status::NegativeVolume,
          "blowup_classes: eps^{2m} correction exhausts the volume");
  return out;
}

double average_scal(const BlowupClassData& data, double eps) {
  const BlowupClasses c = blowup_classes(data, eps);
  return double(data.m) * c.chern / c.vol;
}

MonotonicityReport monotonicity_check(const BlowupClassData& data, double eps_max) {
  check_data(data);
  require(eps_max > 0.0, Status::InvalidArgument, "monotonicity_check: eps_max <= 0");

  MonotonicityReport rep;
  const double a = weight_sum(data);
  if (a == 0.0) {
    rep.constant = true;
    return rep;
  }

  const int m = data.m;
  const double k = double(m - 1) * a;             // chern correction coefficient
  const double w = self_intersection_sign(m) * a;  // volume correction coefficient
  const int grid = 512;
  for (int i = 1; i <= grid; ++i) {
    const double e = eps_max * double(i) / double(grid);
    const double e2 = e * e;
    const double den = data.vol_class + w * std::pow(e2, m);
    if (!(den > 0.0)) {
      rep.first_violation = e;
      return rep;
    }
    const double num = data.chern_pair - k * std::pow(e2, m - 1);
    const double dnum = -double(2 * m - 2) * k * std::pow(e, 2 * m - 3);
    const double dden = double(2 * m) * w * std::pow(e, 2 * m - 1);
    // sign of d/d eps [m num/den]; den^2 > 0 drops out
    if (dnum * den - num * dden >= 0.0) {
      rep.first_violation = e;
      return rep;
    }
  }
  rep.decreasing = true;
  return rep;
}

double family_scal(const BaseFamily& family, double t) {
  const std::size_t n = family.t.size();
  require(n >= 2 && family.s.size() == n, Status::InvalidArgument,
          "base family: need matching tables with >= 2 samples");
  for (std::size_t i = 1; i < n; ++i)
    require(family.t[i] > family.t[i - 1], Status::InvalidArgument,
            "base family: t samples must increase");
  require(t >= family.t.front() && t <= family.t.back(), Status::DomainError,
          "base family: t outside the sampled interval");
  std::size_t i = 1;
  while (i + 1 < n && family.t[i] < t) ++i;
  const double w = (t - family.t[i - 1]) / (family.t[i] - family.t[i - 1]);
  return family.s[i - 1] + w * (family.s[i] - family.s[i - 1]);
}

double zero_scal_solve(const BaseFamily& family, const BlowupClassData& data_template,
                       double eps) {
  check_data(data_template);
  require(eps >= 0.0, Status::InvalidArgument, "zero_scal_solve: eps < 0");

  auto scal_at = [&](double t) {
    BlowupClassData d = data_template;
    d.chern_pair = d.vol_class * family_scal(family, t) / double(d.m);
    return average_scal(d, eps);
  };

  double lo = family.t.front(), hi = family.t.back();
  double flo = scal_at(lo), fhi = scal_at(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require(flo * fhi < 0.0, Status::NoSignChange,
          "zero_scal_solve: no sign change across the family interval");

  double mid = 0.5 * (lo + hi), fmid = scal_at(mid);
  for (int it = 0; it < 200 && std::abs(fmid) > 1e-13; ++it) {
    if (flo * fmid <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
    mid = 0.5 * (lo + hi);
    fmid = scal_at(mid);
  }
  require(std::abs(fmid) <= 1e-12, Status::NonConvergence,
          "zero_scal_solve: bisection stalled above tolerance");
  return mid;
}

}  // namespace cscx
