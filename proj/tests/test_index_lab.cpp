#include <cmath>
#include <numbers>

#include "doctest.h"
#include "focklab/index_lab.hpp"

using namespace focklab;
using namespace focklab::index;
using std::numbers::pi;
using symbols::SwitchProfile;

namespace {

IndexSchedule small_switch() { return {{128, 160, 192}, 64, {1e-2, 1e-3}}; }

trace::PairSpec square_pair(const SwitchProfile& p = SwitchProfile::step(),
                            trace::Arena arena = trace::Arena::level(0)) {
  return trace::PairSpec::square(p, pi / 2, arena);
}

}  // namespace

TEST_CASE("phase operator: index -1 inside the disc, 0 outside") {
  const auto op = OperatorFamily::phase(0);
  CHECK(op.kind() == OperatorFamily::Kind::WeightedShift);
  for (Complex lambda : {Complex(0.0), Complex(0.3), Complex(0.0, 0.5)}) {
    const auto r = fredholm_index(op, lambda, IndexSchedule::phase_default());
    REQUIRE(r.stable());
    CHECK(*r.index == -1);
    CHECK(r.label == "stable");
  }
  const auto out = fredholm_index(op, 1.2, IndexSchedule::phase_default());
  REQUIRE(out.stable());
  CHECK(*out.index == 0);
  const auto lvl1 = fredholm_index(OperatorFamily::phase(1), 0.3, IndexSchedule::phase_default());
  REQUIRE(lvl1.stable());
  CHECK(*lvl1.index == -1);
  CHECK(out.to_json().at("label") == "stable");
}

TEST_CASE("square pair: index -1 inside, 0 outside") {
  const auto op = OperatorFamily::from_pair(square_pair());
  const auto in = fredholm_index(op, {0.5, 0.5}, small_switch());
  REQUIRE(in.stable());
  CHECK(*in.index == -1);
  for (const auto& e : in.evidence) {
    CHECK(e.dim_ker == 0);
    CHECK(e.dim_coker == 1);
  }
  const auto out = fredholm_index(op, {2.0, 2.0}, small_switch());
  REQUIRE(out.stable());
  CHECK(*out.index == 0);
  const auto neg = fredholm_index(op, {-0.5, -0.5}, small_switch());
  REQUIRE(neg.stable());
  CHECK(*neg.index == 0);
}

TEST_CASE("index is a homotopy invariant across profiles") {
  const auto op = OperatorFamily::from_pair(square_pair(SwitchProfile::smooth_erf(0.3)));
  const auto r = fredholm_index(op, {0.5, 0.5}, small_switch());
  REQUIRE(r.stable());
  CHECK(*r.index == -1);
}

TEST_CASE("stacked levels add their indices") {
  const auto op = OperatorFamily::from_pair(square_pair(SwitchProfile::step(), trace::Arena::stacked(1)));
  const auto r = fredholm_index(op, {0.5, 0.5}, small_switch());
  REQUIRE(r.stable());
  CHECK(*r.index == -2);
}

TEST_CASE("operator family caches assembled matrices") {
  const auto op = OperatorFamily::from_symbol(symbols::Phase{}, trace::Arena::level(0));
  const auto a = op.matrix(16, 8);
  const auto b = op.matrix(16, 8);
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0);
  const auto w = OperatorFamily::phase(0).shift_weights(5);
  REQUIRE(w.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(w[k] == doctest::Approx(std::abs(a.entries(k + 1, k))).epsilon(1e-13));
}

TEST_CASE("weighted shift on the lowest level") {
  const auto r = weighted_shift_analysis(1000, 0);
  CHECK(r.weights[0] == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-14));
  CHECK(r.weights[1] == doctest::Approx(0.9399856029866254).epsilon(1e-13));
  CHECK(r.increasing);
  CHECK(r.hyponormal);
  CHECK(r.ratio_error < 1e-13);
  CHECK(r.telescope_error < 1e-12);
  CHECK(r.envelope_constant <= 0.25);
  CHECK(r.limit_error < 2.5e-4);
  CHECK(r.oracle_error < 1e-10);
  CHECK(r.to_json().contains("ratio_error"));
}

TEST_CASE("weighted shift on level one") {
  const auto r = weighted_shift_analysis(200, 1);
  CHECK(r.weights[0] == doctest::Approx(0.443113).epsilon(1e-6));
  CHECK(r.weights[1] == doctest::Approx(0.783321).epsilon(1e-6));
  CHECK(r.increasing);
  CHECK(r.hyponormal);
  CHECK(r.oracle_error < 1e-10);
}

TEST_CASE("region geometry and validation") {
  const auto sq = RegionSpec::square(5, 0.1);
  CHECK(sq.inside({0.5, 0.5}));
  CHECK_FALSE(sq.inside({1.5, 0.5}));
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.boundary_distance({0.5, 0.2}) == doctest::Approx(0.2));
  CHECK(sq.grid_points().size() == 25);
  const auto d = RegionSpec::disc(3);
  CHECK(d.area() == doctest::Approx(pi));
  CHECK(d.inside({0.3, 0.3}));
  CHECK_FALSE(d.inside({0.9, 0.9}));
  CHECK_THROWS_AS(RegionSpec::square(0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(RegionSpec::rectangle(1.0, 0.0, 0.0, 1.0).validate(), std::invalid_argument);
  IndexSchedule s = small_switch();
  s.N = {128, 160};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_switch();
  s.taus = {1e-2};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("essential spectrum probe flags the boundary only") {
  const auto op = OperatorFamily::from_pair(square_pair());
  const IndexSchedule sched{{64, 128, 256}, 64, {1e-2, 1e-3}};
  CHECK(essential_spectrum_point(op, {0.5, 0.0}, sched).flagged);
  CHECK_FALSE(essential_spectrum_point(op, {0.5, 0.5}, sched).flagged);
  CHECK_FALSE(essential_spectrum_point(op, {3.0, 0.0}, sched).flagged);
}

TEST_CASE("wedge relations") {
  const double theta = pi / 3;
  double total = 0.0;
  for (auto which : {WedgeRelation::A, WedgeRelation::B, WedgeRelation::C, WedgeRelation::D}) {
    const auto w = relation_wedge(which, theta);
    total += w.t - w.s;
    CHECK(w.t - w.s < pi);
  }
  CHECK(total == doctest::Approx(2 * pi));
  CHECK(parse_wedge_relation("C") == WedgeRelation::C);
  CHECK_THROWS_AS(parse_wedge_relation("E"), std::invalid_argument);
  CHECK(wedge_partition_defect(0, theta, 24) < 1e-10);
  CHECK(wedge_partition_defect(1, theta, 24) < 1e-10);
  const auto rep = wedge_compactness_probe(0, theta, WedgeRelation::A, {8, 16, 32}, 32);
  CHECK(rep.decaying);
  CHECK(rep.steps.size() == 3);
}

TEST_CASE("trace-class probe reports nuclear norms without a verdict") {
  const auto r = trace_class_probe(TraceClassExpression::SwitchCommutator, trace::Arena::level(0), {32, 48, 64});
  REQUIRE(r.nuclear.size() == 3);
  CHECK(r.nuclear[2] == doctest::Approx(r.nuclear[0]).epsilon(1e-3));
  CHECK(r.to_json().contains("nuclear_partial_sums"));
  CHECK(r.to_json().at("verdict").is_null());
  CHECK(parse_trace_class_expression("phase-commutator") == TraceClassExpression::PhaseCommutator);
  CHECK_THROWS_AS(parse_trace_class_expression("nope"), std::invalid_argument);
}
