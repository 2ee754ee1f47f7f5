#include <cmath>
#include <numbers>

#include "doctest.h"
#include "focklab/multiprecision.hpp"
#include "focklab/quadrature.hpp"
#include "focklab/symbols.hpp"

using namespace focklab::symbols;
using std::numbers::pi;

TEST_CASE("profiles are monotone switches") {
  for (auto kind : {ProfileKind::LinearRamp, ProfileKind::SmoothErf, ProfileKind::SmoothCubic}) {
    const auto p = SwitchProfile::make(kind, 0.7, 0.2);
    CHECK(p(-0.6) == 0.0);
    CHECK(p(1.0) == 1.0);
    CHECK(p(0.2) == doctest::Approx(0.5).epsilon(1e-14));
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double v = p(-1.0 + 2.5 * i / 200.0);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
    CHECK(parse_profile_kind(to_string(kind)) == kind);
  }
  const auto s = SwitchProfile::step();
  CHECK(s(-1e-9) == 0.0);
  CHECK(s(1e-9) == 1.0);
  CHECK_THROWS_AS(parse_profile_kind("sigmoid"), std::invalid_argument);
}

TEST_CASE("custom profile interpolates and clamps") {
  const auto p = SwitchProfile::custom(1.0, {0.0, 0.25, 1.5});
  CHECK(p(0.0) == doctest::Approx(0.25));
  CHECK(p(-0.5) == doctest::Approx(0.125));
  CHECK(p(0.5) == doctest::Approx(0.625));
  CHECK(p(1.0) == 1.0);
  CHECK_THROWS_AS(SwitchProfile::custom(1.0, {0.5}), std::invalid_argument);
}

TEST_CASE("polynomial pieces reproduce the profile") {
  for (const auto& p : {SwitchProfile::linear_ramp(0.8, 0.3), SwitchProfile::smooth_cubic(1.2, -0.4),
                        SwitchProfile::custom(0.5, {0.0, 0.1, 0.7, 1.0})}) {
    for (const auto& piece : p.pieces()) {
      for (int i = 0; i <= 10; ++i) {
        const double s = piece.lo + (piece.hi - piece.lo) * i / 10.0;
        double v = 0.0, pw = 1.0;
        for (double c : piece.coeffs) {
          v += c * pw;
          pw *= s;
        }
        CHECK(v == doctest::Approx(p(s)).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(SwitchProfile::smooth_erf(1.0).pieces(), std::logic_error);
}

TEST_CASE("profile integral matches quadrature") {
  for (auto kind : {ProfileKind::Step, ProfileKind::LinearRamp, ProfileKind::SmoothErf,
                    ProfileKind::SmoothCubic}) {
    const auto p = SwitchProfile::make(kind, 0.6, 0.1);
    const auto rule = focklab::quad::composite_legendre(-2.0, 1.5, p.breakpoints(), 0.05, 20);
    double q = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) q += rule.weights[i] * p(rule.nodes[i]);
    CHECK(p.integral(-2.0, 1.5) == doctest::Approx(q).epsilon(1e-10));
    CHECK(p.integral(1.5, -2.0) == doctest::Approx(-q).epsilon(1e-10));
  }
}

TEST_CASE("symbol evaluation") {
  const HalfPlaneSwitch h{SwitchProfile::step(), pi / 2};
  CHECK(evaluate(h, {0.0, 1.0}).real() == 1.0);
  CHECK(evaluate(h, {5.0, -1.0}).real() == 0.0);
  const Wedge w{0.0, pi / 3};
  CHECK(evaluate(w, std::polar(2.0, 0.5)).real() == 1.0);
  CHECK(evaluate(w, std::polar(2.0, 1.5)).real() == 0.0);
  CHECK(evaluate(w, 0.0).real() == 0.0);
  CHECK(std::abs(evaluate(Phase{}, {3.0, 4.0}) - Complex(0.6, 0.8)) < 1e-15);
  const auto re = AngularFourier::phase_real(), im = AngularFourier::phase_imag();
  const Complex zeta = std::polar(1.7, 0.9);
  CHECK(std::abs(evaluate(re, zeta) - std::cos(0.9)) < 1e-15);
  CHECK(std::abs(evaluate(im, zeta) - std::sin(0.9)) < 1e-15);
  CHECK(std::abs(evaluate(re * re, zeta) - std::cos(0.9) * std::cos(0.9)) < 1e-15);
  CHECK(is_real_valued(re));
  CHECK(is_real_valued(im));
  CHECK_FALSE(is_real_valued(Phase{}));
  CHECK_FALSE(is_real_valued(AngularFourier{{{1, 1.0}}}));
}

TEST_CASE("real polynomials") {
  const auto p = RealPolynomial::parse("x^2*y - 3*x + 1");
  CHECK(p(2.0, 5.0) == doctest::Approx(15.0));
  CHECK(p.degree() == 3);
  CHECK(p.dx()(2.0, 5.0) == doctest::Approx(17.0));
  CHECK(p.dy()(2.0, 5.0) == doctest::Approx(4.0));
  const auto q = RealPolynomial::x() * RealPolynomial::y() + 2.0 * RealPolynomial::constant(1.5);
  CHECK(q(3.0, -1.0) == doctest::Approx(0.0));
  CHECK(RealPolynomial::parse(p.describe())(0.3, -0.7) == doctest::Approx(p(0.3, -0.7)));
  CHECK_THROWS_AS(RealPolynomial::parse("x^-1"), std::invalid_argument);
  CHECK_THROWS_AS(RealPolynomial::parse("x + z"), std::invalid_argument);
  CHECK_THROWS_AS(RealPolynomial::parse(""), std::invalid_argument);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(Wedge{1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Wedge{0.0, 4.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(Wedge{0.0, 1.0}));
  CHECK_THROWS_AS(validate(HalfPlaneSwitch{SwitchProfile::step(), 0.1}), std::invalid_argument);
  CHECK_NOTHROW(validate(HalfPlaneSwitch{SwitchProfile::step(), 0.1}, false));
  CHECK_NOTHROW(validate(HalfPlaneSwitch{SwitchProfile::step(), 0.0}));
  CHECK_THROWS_AS(validate(HalfPlaneSwitch{SwitchProfile{ProfileKind::LinearRamp, 0.0, 0.0, {}}, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(AngularFourier{}), std::invalid_argument);
  CHECK_THROWS_AS(compact_bump(SwitchProfile::linear_ramp(1.0), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("compact bump") {
  const auto c = compact_bump(SwitchProfile::linear_ramp(0.2), 2.0, 0.0);
  CHECK(evaluate(c, 0.0).real() == doctest::Approx(1.0));
  CHECK(evaluate(c, 1.5).real() == doctest::Approx(0.0));
  CHECK(evaluate(c, -1.5).real() == doctest::Approx(0.0));
  CHECK(evaluate(c, {0.0, 7.0}).real() == doctest::Approx(1.0));
}

TEST_CASE("moments") {
  const double sqpi = std::sqrt(pi);
  CHECK(gauss_moment(0) == doctest::Approx(sqpi).epsilon(1e-15));
  CHECK(gauss_moment(1) == 0.0);
  CHECK(gauss_moment(2) == doctest::Approx(sqpi / 2).epsilon(1e-15));
  CHECK(gauss_moment(4) == doctest::Approx(3 * sqpi / 4).epsilon(1e-15));
  const auto step = SwitchProfile::step();
  CHECK(eta_moment<double>(step, 0) == doctest::Approx(sqpi / 2).epsilon(1e-14));
  CHECK(eta_moment<double>(step, 1) == doctest::Approx(0.5).epsilon(1e-14));
  // eta - 1/2 is odd for centered symmetric profiles.
  for (auto kind : {ProfileKind::LinearRamp, ProfileKind::SmoothErf, ProfileKind::SmoothCubic}) {
    const auto p = SwitchProfile::make(kind, 0.9);
    CHECK(eta_moment<double>(p, 0) == doctest::Approx(sqpi / 2).epsilon(1e-12));
    CHECK(eta_moment<double>(p, 2) == doctest::Approx(sqpi / 4).epsilon(1e-12));
  }
  const auto ramp = SwitchProfile::linear_ramp(1.3, 0.2);
  for (int m = 0; m <= 12; ++m) {
    const double d = eta_moment<double>(ramp, m);
    const double h = static_cast<double>(eta_moment<focklab::HighFloat>(ramp, m));
    CHECK(d == doctest::Approx(h).epsilon(1e-12));
  }
  CHECK_THROWS(eta_moment<double>(step, kMaxMomentOrder + 1));
}

TEST_CASE("physical scaling and level count") {
  const HalfPlaneSwitch h{SwitchProfile::linear_ramp(1.0, 0.5), 0.0};
  const auto same = std::get<HalfPlaneSwitch>(scale_physical(h, {2.0, 3.0}));
  CHECK(same.profile.a == doctest::Approx(1.0));
  const auto scaled = std::get<HalfPlaneSwitch>(scale_physical(h, {8.0, 3.0}));
  CHECK(scaled.profile.a == doctest::Approx(2.0));
  CHECK(scaled.profile.center == doctest::Approx(1.0));
  CHECK(level_count({1.0, 2.0}) == 0);
  CHECK(level_count({1.0, 4.0}) == 1);
  CHECK(level_count({2.0, 13.0}) == 2);
  CHECK_THROWS_AS(level_count({1.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(level_count({1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(level_count({0.0, 2.0}), std::invalid_argument);
}

TEST_CASE("kernel tail norms and overlaps") {
  for (int j = 0; j <= 6; ++j) {
    CHECK(kernel_tail_norm(j, 0.0) == doctest::Approx(std::sqrt(std::tgamma(j + 1.0))).epsilon(1e-13));
    double prev = kernel_tail_norm(j, 0.0);
    for (double rho = 0.5; rho <= 8.0; rho += 0.5) {
      const double v = kernel_tail_norm(j, rho);
      CHECK(v < prev);
      prev = v;
    }
  }
  CHECK(kernel_tail_norm(0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  for (int j = 0; j <= 3; ++j) {
    const auto r = kernel_overlap(j, j, {0.3, -0.2}, {0.3, -0.2});
    CHECK(r.value == doctest::Approx(std::tgamma(j + 1.0)).epsilon(1e-10));
  }
  // Overlaps of lowest-level kernels decay like exp(-|z - w|^2 / 4).
  const auto far = kernel_overlap(0, 0, 0.0, {4.0, 0.0});
  CHECK(far.value == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
  CHECK_THROWS_AS(kernel_overlap(0, 0, 0.0, 100.0), std::invalid_argument);
}
