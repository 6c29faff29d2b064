#include "cscx/profile.hpp"

#include <algorithm>
#include <cmath>

namespace cscx {

ProfileJet PowerLogProfile::jet(double s) const {
  check_domain(s);
  ProfileJet j;
  for (const auto& [c, e] : terms_) {
    if (c == 0.0) continue;
    j.F += c * std::pow(s, e);
    const double c1 = c * e;
    if (c1 != 0.0) j.F1 += c1 * std::pow(s, e - 1.0);
    const double c2 = c1 * (e - 1.0);
    if (c2 != 0.0) j.F2 += c2 * std::pow(s, e - 2.0);
    const double c3 = c2 * (e - 2.0);
    if (c3 != 0.0) j.F3 += c3 * std::pow(s, e - 3.0);
    const double c4 = c3 * (e - 3.0);
    if (c4 != 0.0) j.F4 += c4 * std::pow(s, e - 4.0);
  }
  if (clog_ != 0.0) {
    const double inv = 1.0 / s;
    j.F += clog_ * std::log(s);
    j.F1 += clog_ * inv;
    j.F2 -= clog_ * inv * inv;
    j.F3 += 2.0 * clog_ * inv * inv * inv;
    j.F4 -= 6.0 * clog_ * inv * inv * inv * inv;
  }
  return j;
}

ProfileJet Log1pProfile::jet(double s) const {
  check_domain(s);
  const double u = 1.0 / (1.0 + s);
  ProfileJet j;
  j.F = coef_ * std::log1p(s);
  j.F1 = coef_ * u;
  j.F2 = -coef_ * u * u;
  j.F3 = 2.0 * coef_ * u * u * u;
  j.F4 = -6.0 * coef_ * u * u * u * u;
  return j;
}

ProfileJet LinearScaleProfile::jet(double s) const {
  check_domain(s);
  ProfileJet b = base_->jet(s / div_);
  ProfileJet j;
  const double r1 = mul_ / div_;
  j.F = mul_ * b.F + add_;
  j.F1 = r1 * b.F1;
  j.F2 = r1 / div_ * b.F2;
  j.F3 = r1 / (div_ * div_) * b.F3;
  j.F4 = r1 / (div_ * div_ * div_) * b.F4;
  return j;
}

SumProfile::SumProfile(ProfilePtr a, ProfilePtr b)
    : RadialProfile(a->m(), std::max(a->s_min(), b->s_min()),
                    std::min(a->s_max(), b->s_max())),
      a_(std::move(a)),
      b_(std::move(b)) {
  require(a_->m() == b_->m(), Status::WrongDimension, "SumProfile: dimension mismatch");
}

ProfileJet SumProfile::jet(double s) const {
  check_domain(s);
  ProfileJet ja = a_->jet(s), jb = b_->jet(s);
  return {ja.F + jb.F, ja.F1 + jb.F1, ja.F2 + jb.F2, ja.F3 + jb.F3, ja.F4 + jb.F4};
}

ChebSeriesProfile::ChebSeriesProfile(int m, double s_lo, double s_hi, Vec values_at_nodes)
    : RadialProfile(m, s_lo, s_hi),
      n_(values_at_nodes.size() - 1),
      t_lo_(std::log(s_lo)),
      t_hi_(std::log(s_hi)),
      w_(std::move(values_at_nodes)) {
  require(s_lo > 0.0, Status::InvalidArgument, "ChebSeriesProfile: need s_lo > 0");
  require(n_ >= 2, Status::InvalidArgument, "ChebSeriesProfile: need >= 3 nodes");

  ChebCollocation cc = cheb_collocation(n_);
  x_nodes_ = cc.x;
  bary_w_ = cheb_bary_weights(n_);
  const std::size_t np = n_ + 1;
  s_nodes_.resize(np);
  for (std::size_t i = 0; i < np; ++i)
    s_nodes_[i] = std::exp(t_lo_ + 0.5 * (x_nodes_[i] + 1.0) * (t_hi_ - t_lo_));

  // Map t-derivatives (chain-scaled Chebyshev derivatives) to s-derivatives:
  //   d/ds   = e^{-t} D
  //   d2/ds2 = e^{-2t}(D^2 - D)
  //   d3/ds3 = e^{-3t}(D^3 - 3D^2 + 2D)
  //   d4/ds4 = e^{-4t}(D^4 - 6D^3 + 11D^2 - 6D)
  const double scale = 2.0 / (t_hi_ - t_lo_);
  Vec d1 = matvec(cc.d1, w_), d2 = matvec(cc.d2, w_), d3 = matvec(cc.d3, w_),
      d4 = matvec(cc.d4, w_);
  w1_.resize(np);
  w2_.resize(np);
  w3_.resize(np);
  w4_.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    const double t1 = d1[i] * scale;
    const double t2 = d2[i] * scale * scale;
    const double t3 = d3[i] * scale * scale * scale;
    const double t4 = d4[i] * scale * scale * scale * scale;
    const double es = s_nodes_[i];
    w1_[i] = t1 / es;
    w2_[i] = (t2 - t1) / (es * es);
    w3_[i] = (t3 - 3.0 * t2 + 2.0 * t1) / (es * es * es);
    w4_[i] = (t4 - 6.0 * t3 + 11.0 * t2 - 6.0 * t1) / (es * es * es * es);
  }
}

double ChebSeriesProfile::interp(const Vec& f, double x) const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i <= n_; ++i) {
    const double dx = x - x_nodes_[i];
    if (std::abs(dx) < 1e-15) return f[i];
    const double t = bary_w_[i] / dx;
    num += t * f[i];
    den += t;
  }
  return num / den;
}

ProfileJet ChebSeriesProfile::jet(double s) const {
  check_domain(s);
  const double t = std::log(s);
  const double x = 2.0 * (t - t_lo_) / (t_hi_ - t_lo_) - 1.0;
  return {interp(w_, x), interp(w1_, x), interp(w2_, x), interp(w3_, x), interp(w4_, x)};
}

QuinticHermiteProfile::QuinticHermiteProfile(int m, Vec s_nodes, Vec f, Vec f1, Vec f2,
                                             double clog)
    : RadialProfile(m, s_nodes.front(), s_nodes.back()),
      s_(std::move(s_nodes)),
      f_(std::move(f)),
      f1_(std::move(f1)),
      f2_(std::move(f2)),
      clog_(clog) {
  require(s_.size() >= 2 && f_.size() == s_.size() && f1_.size() == s_.size() &&
              f2_.size() == s_.size(),
          Status::InvalidArgument, "QuinticHermiteProfile: inconsistent node data");
  for (std::size_t i = 1; i < s_.size(); ++i)
    require(s_[i] > s_[i - 1], Status::InvalidArgument,
            "QuinticHermiteProfile: nodes not increasing");
}

ProfileJet QuinticHermiteProfile::jet(double s) const {
  check_domain(s);
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = (it == s_.begin()) ? 0 : std::size_t(it - s_.begin()) - 1;
  if (i + 1 >= s_.size()) i = s_.size() - 2;

  const double h = s_[i + 1] - s_[i];
  const double x = (s - s_[i]) / h;

  // Quintic Hermite basis matching (value, first, second derivative) at both
  // interval ends, in the normalized variable x on [0, 1].
  const double a0 = f_[i], a1 = f1_[i] * h, a2 = f2_[i] * h * h;
  const double b0 = f_[i + 1], b1 = f1_[i + 1] * h, b2 = f2_[i + 1] * h * h;

  // p(x) = a0 + a1 x + a2/2 x^2 + c3 x^3 + c4 x^4 + c5 x^5 with c-coefficients
  // solved from the right-end conditions.
  const double r0 = b0 - (a0 + a1 + 0.5 * a2);
  const double r1 = b1 - (a1 + a2);
  const double r2 = b2 - a2;
  const double c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
  const double c4 = -15.0 * r0 + 7.0 * r1 - r2;
  const double c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;

  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
  ProfileJet j;
  j.F = a0 + a1 * x + 0.5 * a2 * x2 + c3 * x3 + c4 * x4 + c5 * x5;
  j.F1 = (a1 + a2 * x + 3.0 * c3 * x2 + 4.0 * c4 * x3 + 5.0 * c5 * x4) / h;
  j.F2 = (a2 + 6.0 * c3 * x + 12.0 * c4 * x2 + 20.0 * c5 * x3) / (h * h);
  j.F3 = (6.0 * c3 + 24.0 * c4 * x + 60.0 * c5 * x2) / (h * h * h);
  j.F4 = (24.0 * c4 + 120.0 * c5 * x) / (h * h * h * h);

  if (clog_ != 0.0) {
    const double inv = 1.0 / s;
    j.F += clog_ * std::log(s);
    j.F1 += clog_ * inv;
    j.F2 -= clog_ * inv * inv;
    j.F3 += 2.0 * clog_ * inv * inv * inv;
    j.F4 -= 6.0 * clog_ * inv * inv * inv * inv;
  }
  return j;
}

std::shared_ptr<QuinticHermiteProfile> sample_profile(const RadialProfile& p, double s_lo,
                                                      double s_hi, int nodes_per_decade) {
  require(s_lo > 0.0 && s_hi > s_lo, Status::InvalidArgument, "sample_profile: bad window");
  const double decades = std::log10(s_hi / s_lo);
  const std::size_t n = std::max<std::size_t>(8, std::size_t(nodes_per_decade * decades));

  // Chebyshev-distributed nodes in log s, endpoints included.
  Vec s(n + 1), f(n + 1), f1(n + 1), f2(n + 1);
  const double t_lo = std::log(s_lo), t_hi = std::log(s_hi);
  const double clog = p.c_log();
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = std::cos(M_PI * double(n - i) / double(n));
    s[i] = std::exp(t_lo + 0.5 * (x + 1.0) * (t_hi - t_lo));
    ProfileJet j = p.jet(s[i]);
    // the analytic log part is carried separately, never in spline storage
    f[i] = j.F - clog * std::log(s[i]);
    f1[i] = j.F1 - clog / s[i];
    f2[i] = j.F2 + clog / (s[i] * s[i]);
  }
  return std::make_shared<QuinticHermiteProfile>(p.m(), std::move(s), std::move(f),
                                                 std::move(f1), std::move(f2), clog);
}


long double PowerLogProfile::value_ld(long double s) const {
  check_domain((double)s);
  long double acc = 0.0L;
  for (const auto& [c, e] : terms_) {
    if (c == 0.0) continue;
    acc += (long double)c * powl(s, (long double)e);
  }
  if (clog_ != 0.0) acc += (long double)clog_ * logl(s);
  return acc;
}

long double Log1pProfile::value_ld(long double s) const {
  check_domain((double)s);
  return (long double)coef_ * log1pl(s);
}

}  // namespace cscx
