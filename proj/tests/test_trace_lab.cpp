#include <cmath>
#include <numbers>

#include "doctest.h"
#include "focklab/trace_lab.hpp"

using namespace focklab::trace;
using std::numbers::pi;

namespace {

Schedule quick() {
  Schedule s;
  s.N = {32, 64, 96};
  return s;
}

const Complex kMinusI{0.0, -1.0};

}  // namespace

TEST_CASE("square pair: 2 pi tr[A, B] = -i on the lowest level") {
  const auto pair = PairSpec::square(SwitchProfile::step(), pi / 2);
  const auto est = commutator_trace(pair, quick());
  CHECK(est.stabilized);
  CHECK(std::abs(2 * pi * est.value - kMinusI) < 1e-3);
  CHECK(std::abs(est.value.real()) < 1e-10);
  CHECK(est.history.size() == 3);
  for (const auto& step : est.history) CHECK(std::abs(step.unbuffered) < 1e-10);
  CHECK(est.partial_sums.size() == 96);
  const auto j = est.to_json();
  CHECK(j.at("schedule").size() == 3);
  CHECK(j.at("two_pi_value_im").get<double>() == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("trace is antisymmetric and independent of profile and angle") {
  const auto base = commutator_trace(PairSpec::square(SwitchProfile::linear_ramp(0.5), pi / 3), quick());
  PairSpec swapped = PairSpec::square(SwitchProfile::linear_ramp(0.5), pi / 3);
  std::swap(swapped.f, swapped.g);
  const auto flip = commutator_trace(swapped, quick());
  CHECK(std::abs(base.value + flip.value) < 1e-12);
  CHECK(std::abs(2 * pi * base.value - kMinusI) < 1e-3);
  const auto cubic = commutator_trace(PairSpec::square(SwitchProfile::smooth_cubic(0.4), 2 * pi / 3), quick());
  CHECK(std::abs(2 * pi * cubic.value - kMinusI) < 1e-3);
}

TEST_CASE("stacked arena counts levels") {
  const auto est = commutator_trace(PairSpec::square(SwitchProfile::step(), pi / 2, Arena::stacked(1)), quick());
  CHECK(std::abs(2 * pi * est.value - 2.0 * kMinusI) < 1e-3);
  const auto lvl = commutator_trace(PairSpec::square(SwitchProfile::step(), pi / 2, Arena::level(1)), quick());
  CHECK(std::abs(2 * pi * lvl.value - kMinusI) < 1e-3);
}

TEST_CASE("cross-level terms cancel") {
  const auto pair = PairSpec::square(SwitchProfile::step(), pi / 2, Arena::stacked(1));
  const auto ct = cross_term_traces(1, pair, 48, 48);
  CHECK(std::abs(ct.total) < 1e-3);
  CHECK(std::abs(ct.stacked_minus_levels - ct.total) < 1e-10);
  CHECK(ct.Z0 == Complex{});
}

TEST_CASE("polynomial traces follow the Poisson bracket") {
  const auto pair = PairSpec::square(SwitchProfile::step(), pi / 2);
  const auto x = RealPolynomial::x(), y = RealPolynomial::y();
  const auto plain = commutator_trace(pair, quick());
  const auto hh = helton_howe_trace(x, y, pair, quick());
  CHECK(std::abs(hh.value - plain.value) < 1e-12);
  for (const auto& [p, q] : {std::pair{RealPolynomial::parse("x^2"), y},
                             std::pair{RealPolynomial::parse("x*y"), RealPolynomial::parse("x+y")},
                             std::pair{RealPolynomial::parse("x^2 + y"), RealPolynomial::parse("y^2*x")}}) {
    const auto t = helton_howe_trace(p, q, pair, quick());
    const double bracket = poisson_bracket_integral(p, q, Region::Square);
    CHECK(std::abs(2 * pi * t.value - kMinusI * bracket) < 2e-3);
    const auto r = helton_howe_trace(q, p, pair, quick());
    CHECK(std::abs(t.value + r.value) < 1e-3 / (2 * pi));
  }
  CHECK_THROWS(helton_howe_trace(RealPolynomial::parse("x^7"), y, pair, quick()));
}

TEST_CASE("region integrals") {
  CHECK(region_monomial_integral(0, 0, Region::Square) == doctest::Approx(1.0));
  CHECK(region_monomial_integral(2, 3, Region::Square) == doctest::Approx(1.0 / 12));
  CHECK(region_monomial_integral(0, 0, Region::Disc) == doctest::Approx(pi));
  CHECK(region_monomial_integral(2, 0, Region::Disc) == doctest::Approx(pi / 4));
  CHECK(region_monomial_integral(2, 2, Region::Disc) == doctest::Approx(pi / 24));
  CHECK(region_monomial_integral(1, 0, Region::Disc) == 0.0);
  CHECK(poisson_bracket_integral(RealPolynomial::x(), RealPolynomial::y(), Region::Disc) ==
        doctest::Approx(pi));
  CHECK(parse_region(to_string(Region::Disc)) == Region::Disc);
  CHECK_THROWS_AS(parse_region("triangle"), std::invalid_argument);
}

TEST_CASE("switch area identity") {
  for (auto kind : {focklab::symbols::ProfileKind::Step, focklab::symbols::ProfileKind::LinearRamp,
                    focklab::symbols::ProfileKind::SmoothErf,
                    focklab::symbols::ProfileKind::SmoothCubic}) {
    const auto p = SwitchProfile::make(kind, 0.75, 0.3);
    for (double t : {-1.3, 0.2, 2.5}) CHECK(switch_area_identity(p, t) == doctest::Approx(t).epsilon(1e-10));
  }
}

TEST_CASE("inner integral reproduces its closed form") {
  for (double theta : {pi / 3, pi / 2, 3 * pi / 4}) {
    const Complex x{0.4, -0.7}, y{-0.3, 0.9};
    const auto step = inner_integral_check(SwitchProfile::step(), SwitchProfile::step(), theta, x, y);
    CHECK(step.target == doctest::Approx(-y.real() * (x.imag() + x.real() / std::tan(theta))));
    CHECK(step.value == doctest::Approx(step.target).epsilon(1e-12));
    const auto smooth = inner_integral_check(SwitchProfile::smooth_cubic(0.5),
                                             SwitchProfile::linear_ramp(0.8), theta, x, y);
    CHECK(smooth.value == doctest::Approx(smooth.target).epsilon(1e-9));
  }
  CHECK_THROWS_AS(inner_integral_check(SwitchProfile::step(), SwitchProfile::step(), 0.1, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("direct Kubo integral") {
  CHECK(std::abs(kubo_integral_direct(24, true) - 1.0 / pi) < 1e-10);
  CHECK(std::abs(kubo_integral_direct() - kMinusI / (2 * pi)) < 1e-10);
}

TEST_CASE("conjugated symbol expansion") {
  const auto x2 = RealPolynomial::parse("x^2"), x2y2 = RealPolynomial::parse("x^2*y^2");
  const auto e1 = conjugated_symbol_expansion(1, {x2, x2y2});
  REQUIRE(e1.coeffs.size() == 1);
  CHECK(e1.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e1.residual < 1e-10);
  const auto e2 = conjugated_symbol_expansion(2, {x2, x2y2});
  REQUIRE(e2.coeffs.size() == 2);
  CHECK(e2.coeffs[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(e2.coeffs[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e2.residual < 1e-10);
  // Harmonic symbols are untouched by the conjugation.
  const auto h = conjugated_symbol_expansion(2, {RealPolynomial::parse("x^2 - y^2"), RealPolynomial::parse("x*y")});
  CHECK(std::isnan(h.coeffs[0]));
  CHECK(h.residual < 1e-12);
  CHECK_THROWS_AS(conjugated_symbol_expansion(0, {x2}), std::invalid_argument);
}

TEST_CASE("schedule validation") {
  Schedule s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.buffer_for(64) == 64);
  s.N = {64, 32, 96};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.N = {32, 64, 96};
  s.buffer = 8;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.buffer = -1;
  s.buffer_ratio = 0.25;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK(Arena::stacked(2).truncation(10, 5).levels.size() == 3);
  CHECK(Arena::level(3).truncation(10, 5).levels == std::vector<int>{3});
}
