#include "cscx/classes.hpp"

#include <cmath>
#include <vector>

#include "cscx/common.hpp"
#include "doctest.h"

using namespace cscx;

namespace {

template <class F>
Status thrown_status(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.status();
  }
  return Status::Ok;
}

BaseFamily linear_family() {
  BaseFamily fam;
  fam.t = {-1.0, 1.0};
  fam.s = {-1.0, 1.0};
  return fam;
}

}  // namespace

TEST_CASE("blow-up class corrections follow the displayed intersection formulas") {
  auto d = make_class_data(2, 1.0, 0.25, {1.0});
  const auto base = blowup_classes(d, 0.0);
  CHECK(base.vol == 1.0);
  CHECK(base.chern == 0.25);

  const auto c = blowup_classes(d, 0.1);
  CHECK(c.vol == doctest::Approx(1.0 - 1e-4).epsilon(1e-15));
  CHECK(c.chern == doctest::Approx(0.25 - 1e-2).epsilon(1e-15));

  // The exceptional self-intersection sign flips with the parity of m.
  for (int m = 2; m <= 6; ++m) {
    auto dm = make_class_data(m, 4.0, 0.0, {0.7, 0.3});
    const double eps = 0.5;
    const auto cm = blowup_classes(dm, eps);
    const double expected = (m % 2 == 0 ? -1.0 : 1.0) * std::pow(eps, 2 * m) * 1.0;
    CHECK(cm.vol - 4.0 == doctest::Approx(expected).epsilon(1e-14));
    CHECK(cm.chern == doctest::Approx(-std::pow(eps, 2 * m - 2) * (m - 1)).epsilon(1e-14));
  }

  CHECK(thrown_status([&] { blowup_classes(d, 1.5); }) == Status::NegativeVolume);
  CHECK(thrown_status([&] { blowup_classes(d, -0.1); }) == Status::InvalidArgument);
  CHECK(thrown_status([] { make_class_data(2, 1.0, 0.0, {1.0, -1.0}); }) ==
        Status::InvalidArgument);
  CHECK(thrown_status([] { make_class_data(1, 1.0, 0.0, {1.0}); }) ==
        Status::InvalidArgument);
  CHECK(thrown_status([] { make_class_data(2, -1.0, 0.0, {1.0}); }) ==
        Status::InvalidArgument);
  BlowupClassData bad = make_class_data(2, 1.0, 0.0, {1.0});
  bad.n_points = 3;
  CHECK(thrown_status([&] { blowup_classes(bad, 0.1); }) == Status::InvalidArgument);
}

TEST_CASE("average scalar curvature of the blown-up class") {
  // Worked case: unit volume, vanishing base pair, one unit weight.
  auto d = make_class_data(2, 1.0, 0.0, {1.0});
  const double expected = 2.0 * (-1e-2) / (1.0 - 1e-4);
  CHECK(average_scal(d, 0.1) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(average_scal(d, 0.1) == doctest::Approx(-0.020002).epsilon(1e-4));

  // eps = 0 reduces to the base average for any data.
  auto g = make_class_data(3, 2.5, -0.4, {0.2, 0.9, 0.1});
  CHECK(average_scal(g, 0.0) == doctest::Approx(3.0 * (-0.4) / 2.5).epsilon(1e-15));

  // Small corrections cannot flip the sign of a nonzero base average.
  auto pos = make_class_data(2, 1.0, 0.5, {1.0});
  auto neg = make_class_data(2, 1.0, -0.5, {1.0});
  for (double eps : {0.01, 0.05, 0.1}) {
    CHECK(average_scal(pos, eps) > 0.0);
    CHECK(average_scal(neg, eps) < 0.0);
  }
}

TEST_CASE("average of the corrected class decreases near zero") {
  for (int m = 2; m <= 4; ++m) {
    auto d = make_class_data(m, 1.0, 0.0, {1.0, 0.5});
    const auto rep = monotonicity_check(d, 0.3);
    CHECK(rep.decreasing);
    CHECK(!rep.constant);
    CHECK(rep.first_violation == -1.0);
  }

  // No blown-up points: the average does not move at all.
  const auto flat = monotonicity_check(make_class_data(2, 1.0, 0.7, {}), 0.5);
  CHECK(flat.constant);
  CHECK(!flat.decreasing);

  // Negative base pair in odd m: the derivative genuinely flips inside the
  // regime, at the root of 4 eps^6 + 12 eps^2 - 8 (here 0.77198...).
  const auto flip = monotonicity_check(make_class_data(3, 1.0, -2.0, {1.0}), 1.2);
  CHECK(!flip.decreasing);
  CHECK(flip.first_violation == doctest::Approx(0.77198).epsilon(0.01));

  // Even m: the volume denominator dies at eps = vol^{1/2m} before anything
  // else; the scan reports that radius instead of overrunning it.
  const auto regime = monotonicity_check(make_class_data(2, 1.0, 0.0, {1.0}), 1.2);
  CHECK(!regime.decreasing);
  CHECK(regime.first_violation == doctest::Approx(1.0).epsilon(0.01));

  CHECK(thrown_status([] {
          monotonicity_check(make_class_data(2, 1.0, 0.0, {1.0}), 0.0);
        }) == Status::InvalidArgument);
}

TEST_CASE("sampled base family interpolates monotonically") {
  BaseFamily fam;
  fam.t = {-1.0, 0.0, 2.0};
  fam.s = {-0.5, 0.1, 0.7};
  CHECK(family_scal(fam, -1.0) == -0.5);
  CHECK(family_scal(fam, 2.0) == 0.7);
  CHECK(family_scal(fam, -0.5) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(family_scal(fam, 1.0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(thrown_status([&] { family_scal(fam, 2.5); }) == Status::DomainError);
  BaseFamily bad;
  bad.t = {0.0, 0.0};
  bad.s = {-1.0, 1.0};
  CHECK(thrown_status([&] { family_scal(bad, 0.0); }) == Status::InvalidArgument);
}

TEST_CASE("zero average solve matches the linear-family closed form") {
  const auto fam = linear_family();
  const auto d = make_class_data(2, 1.0, 0.0, {1.0});

  // With s(t) = t the corrected average is (t - 2 eps^2)/(1 - eps^4) exactly.
  for (double eps : {0.05, 0.1, 0.2}) {
    const double t = zero_scal_solve(fam, d, eps);
    CHECK(std::abs(t - 2.0 * eps * eps) < 1e-10);
  }

  // eps = 0: the root is the family's own zero.
  CHECK(std::abs(zero_scal_solve(fam, d, 0.0)) <= 1e-12);

  // The solved parameter moves monotonically with eps for any increasing
  // family, not only the linear one.
  BaseFamily cubicish;
  cubicish.t = {-1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0};
  cubicish.s = {-1.0, -0.125, -1e-3, 0.0, 1e-3, 0.125, 1.0};
  double prev = 0.0;
  for (double eps : {0.05, 0.1, 0.15, 0.2}) {
    const double t = zero_scal_solve(cubicish, d, eps);
    CHECK(t > prev);
    prev = t;
  }

  BaseFamily positive;
  positive.t = {-1.0, 1.0};
  positive.s = {0.5, 1.5};
  CHECK(thrown_status([&] { zero_scal_solve(positive, d, 0.0); }) ==
        Status::NoSignChange);
}
