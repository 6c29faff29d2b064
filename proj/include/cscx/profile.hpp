#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cscx/cheb.hpp"
#include "cscx/common.hpp"
#include "cscx/linalg.hpp"

namespace cscx {

// F(s) and its first four s-derivatives at one point, s = |z|^2.
struct ProfileJet {
  double F = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
  double F3 = 0.0;
  double F4 = 0.0;
};

// Rotationally symmetric Kahler potential profile on an s-interval.  The
// fourth-order curvature operator consumes exactly this jet, so every backend
// supplies four derivatives.
class RadialProfile {
 public:
  RadialProfile(int m, double s_lo, double s_hi) : m_(m), s_lo_(s_lo), s_hi_(s_hi) {
    require(m >= 2, Status::InvalidArgument, "RadialProfile: need m >= 2");
    require(s_lo >= 0.0 && s_hi > s_lo, Status::InvalidArgument,
            "RadialProfile: bad domain");
  }
  virtual ~RadialProfile() = default;

  int m() const { return m_; }
  double s_min() const { return s_lo_; }
  double s_max() const { return s_hi_; }

  // Coefficient of the analytic log s part near s = 0 (m = 2 models carry it).
  virtual double c_log() const { return 0.0; }
  // Coefficient of log s in the s -> infinity expansion; differs from c_log
  // for profiles whose log is only an endpoint asymptotic.
  virtual double log_coeff_infinity() const { return c_log(); }

  virtual ProfileJet jet(double s) const = 0;
  virtual std::string kind() const = 0;

  double value(double s) const { return jet(s).F; }

  // Potential value in extended precision where the closed form allows it.
  // The grid oracle differences this twice per level, so the extra digits
  // lower its noise floor by three orders.
  virtual long double value_ld(long double s) const {
    return (long double)value((double)s);
  }

  void check_domain(double s) const {
    require(s > s_lo_ && s < s_hi_ * (1.0 + 1e-14) && s > 0.0, Status::DomainError,
            "profile: s outside domain");
  }

 private:
  int m_;
  double s_lo_, s_hi_;
};

using ProfilePtr = std::shared_ptr<const RadialProfile>;

constexpr double kSInf = std::numeric_limits<double>::infinity();

// Finite sum of real-power monomials plus an exact log term:
//   F(s) = sum_k c_k s^{e_k} + c_log log s.
// Covers the flat cell, the Burns family, and polynomial test inputs.
class PowerLogProfile : public RadialProfile {
 public:
  PowerLogProfile(int m, std::vector<std::pair<double, double>> terms, double clog,
                  double s_lo = 0.0, double s_hi = kSInf)
      : RadialProfile(m, s_lo, s_hi), terms_(std::move(terms)), clog_(clog) {}

  double c_log() const override { return clog_; }
  ProfileJet jet(double s) const override;
  long double value_ld(long double s) const override;
  std::string kind() const override { return "power_log"; }
  const std::vector<std::pair<double, double>>& terms() const { return terms_; }

 private:
  std::vector<std::pair<double, double>> terms_;  // (coefficient, exponent)
  double clog_;
};

// F(s) = coef * log(1 + s); a curved test profile outside the monomial family.
class Log1pProfile : public RadialProfile {
 public:
  Log1pProfile(int m, double coef) : RadialProfile(m, 0.0, kSInf), coef_(coef) {}
  ProfileJet jet(double s) const override;
  long double value_ld(long double s) const override;
  std::string kind() const override { return "log1p"; }
  double coef() const { return coef_; }

 private:
  double coef_;
};

// F(s) = mul * base(s / arg_div): covers ALE rescaling and weighting.
class LinearScaleProfile : public RadialProfile {
 public:
  LinearScaleProfile(ProfilePtr base, double mul, double arg_div, double add_const = 0.0)
      : RadialProfile(base->m(), base->s_min() * arg_div,
                      base->s_max() >= kSInf ? kSInf : base->s_max() * arg_div),
        base_(std::move(base)),
        mul_(mul),
        div_(arg_div),
        add_(add_const) {
    require(arg_div > 0.0, Status::InvalidArgument, "LinearScaleProfile: arg_div <= 0");
  }

  double c_log() const override { return mul_ * base_->c_log(); }
  double log_coeff_infinity() const override { return mul_ * base_->log_coeff_infinity(); }
  ProfileJet jet(double s) const override;
  long double value_ld(long double s) const override {
    return mul_ * base_->value_ld(s / (long double)div_) + (long double)add_;
  }
  std::string kind() const override { return "scaled"; }
  const RadialProfile& base() const { return *base_; }
  double mul() const { return mul_; }
  double arg_div() const { return div_; }
  double add_const() const { return add_; }

 private:
  ProfilePtr base_;
  double mul_, div_, add_;
};

// Pointwise sum of two profiles on the intersected domain.
class SumProfile : public RadialProfile {
 public:
  SumProfile(ProfilePtr a, ProfilePtr b);
  double c_log() const override { return a_->c_log() + b_->c_log(); }
  double log_coeff_infinity() const override {
    return a_->log_coeff_infinity() + b_->log_coeff_infinity();
  }
  ProfileJet jet(double s) const override;
  long double value_ld(long double s) const override {
    return a_->value_ld(s) + b_->value_ld(s);
  }
  std::string kind() const override { return "sum"; }
  const RadialProfile& first() const { return *a_; }
  const RadialProfile& second() const { return *b_; }

 private:
  ProfilePtr a_, b_;
};

// Spectral collocation data on t = log s: values of a perturbation W at
// Chebyshev-Lobatto nodes, with nodal s-derivative tables precomputed.
// Barycentric interpolation gives the jet anywhere inside the interval.
class ChebSeriesProfile : public RadialProfile {
 public:
  ChebSeriesProfile(int m, double s_lo, double s_hi, Vec values_at_nodes);

  ProfileJet jet(double s) const override;
  std::string kind() const override { return "cheb_series"; }

  std::size_t order() const { return n_; }
  const Vec& node_s() const { return s_nodes_; }
  const Vec& node_values() const { return w_; }

 private:
  double interp(const Vec& f, double x) const;

  std::size_t n_;
  double t_lo_, t_hi_;
  Vec x_nodes_, s_nodes_, bary_w_;
  Vec w_, w1_, w2_, w3_, w4_;  // nodal values of W and its s-derivatives
};

// Piecewise-quintic Hermite storage profile: (F, F', F'') at nodes, degree-5
// polynomial per interval, C^2 across nodes.  This is the representation used
// for sampled/loaded profiles; derivatives 3 and 4 come from the local
// polynomial.
class QuinticHermiteProfile : public RadialProfile {
 public:
  QuinticHermiteProfile(int m, Vec s_nodes, Vec f, Vec f1, Vec f2, double clog = 0.0);

  double c_log() const override { return clog_; }
  ProfileJet jet(double s) const override;
  std::string kind() const override { return "hermite"; }

  const Vec& nodes() const { return s_; }
  const Vec& f() const { return f_; }
  const Vec& f1() const { return f1_; }
  const Vec& f2() const { return f2_; }

 private:
  Vec s_, f_, f1_, f2_;
  double clog_;
};

// Samples a profile onto Chebyshev-distributed nodes (nodes_per_decade across
// [s_lo, s_hi]) and returns the Hermite representation.  The analytic log
// part is split off before sampling and carried on the result.
std::shared_ptr<QuinticHermiteProfile> sample_profile(const RadialProfile& p, double s_lo,
                                                      double s_hi,
                                                      int nodes_per_decade = 400);

inline ProfilePtr flat_profile(int m, double coef = 0.5) {
  return std::make_shared<PowerLogProfile>(m, std::vector<std::pair<double, double>>{{coef, 1.0}},
                                           0.0);
}

inline ProfilePtr constant_profile(int m, double c) {
  return std::make_shared<PowerLogProfile>(m, std::vector<std::pair<double, double>>{{c, 0.0}},
                                           0.0);
}

}  // namespace cscx
