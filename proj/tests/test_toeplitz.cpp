#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "focklab/toeplitz.hpp"

using namespace focklab;
using namespace focklab::toeplitz;
using symbols::HalfPlaneSwitch;
using symbols::SwitchProfile;
using std::numbers::pi;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

HalfPlaneSwitch step_switch(double theta = 0.0) { return {SwitchProfile::step(), theta}; }

}  // namespace

TEST_CASE("frozen entries of the lowest-level step switch") {
  const auto m = toeplitz_lll(step_switch(), TruncationSpec::level(0, 8, 8));
  CHECK(std::abs(m.entries(0, 0) - 0.5) < 1e-14);
  // <eta z^0, z^1> = 1/(2 sqrt(pi))
  CHECK(std::abs(m.entries(1, 0) - 1.0 / (2.0 * std::sqrt(pi))) < 1e-14);
  CHECK(std::abs(m.entries(1, 0) - 0.28209479177387814) < 1e-14);
  // Diagonal is 1/2 by the reflection x -> -x.
  for (int k = 0; k < 16; ++k) CHECK(std::abs(m.entries(k, k) - 0.5) < 1e-13);
}

TEST_CASE("frozen entry of the linear ramp (adaptive-quadrature oracle)") {
  const auto m = toeplitz_lll(HalfPlaneSwitch{SwitchProfile::linear_ramp(1.0), 0.0},
                              TruncationSpec::level(0, 4, 4));
  CHECK(std::abs(m.entries(1, 0) - 0.21067519823742872) < 1e-13);
  // The ramp minus 1/2 is odd, so entries with even offset vanish off the diagonal.
  CHECK(std::abs(m.entries(2, 0)) < 1e-14);
}

TEST_CASE("switch matrices are Hermitian, real at theta = 0, and between 0 and 1") {
  for (auto kind : {symbols::ProfileKind::Step, symbols::ProfileKind::LinearRamp,
                    symbols::ProfileKind::SmoothErf, symbols::ProfileKind::SmoothCubic}) {
    const HalfPlaneSwitch h{SwitchProfile::make(kind, 0.8), 0.0};
    const auto m = toeplitz_stacked(h, 1, {24, 24, {}});
    CHECK(max_abs(m.entries - m.entries.adjoint()) < 1e-13);
    CHECK(m.entries.imag().cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.entries);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-12);
  }
}

TEST_CASE("constant symbol gives the identity on every level") {
  const auto m = toeplitz_stacked(symbols::RealPolynomial::constant(1.0), 2, {6, 6, {}});
  CHECK(max_abs(m.entries - Matrix::Identity(m.dim(), m.dim())) < 1e-13);
}

TEST_CASE("polynomial symbols match creation and annihilation") {
  // x = Re z acts on level 0 as (A + A*)/2 restricted, so <x e_k, e_{k+1}> = sqrt(k+1)/2.
  const auto m = toeplitz_lll(symbols::RealPolynomial::x(), TruncationSpec::level(0, 6, 0));
  for (int k = 0; k + 1 < 6; ++k) {
    CHECK(std::abs(m.entries(k + 1, k) - std::sqrt(k + 1.0) / 2.0) < 1e-13);
    CHECK(std::abs(m.entries(k, k + 1) - std::sqrt(k + 1.0) / 2.0) < 1e-13);
  }
  const auto s = polynomial_state(symbols::RealPolynomial::x(), 8);
  CHECK(s.coeff(1, 0) == fock::Complex(0.5));
  CHECK(s.coeff(0, 1) == fock::Complex(0.5));
}

TEST_CASE("wedge diagonal is the opening angle over 2 pi") {
  const symbols::Wedge w{0.3, 1.4};
  for (int j : {0, 1, 2}) {
    const auto m = toeplitz_level(w, j, TruncationSpec::level(j, 12, 4));
    for (int k = 0; k < 16; ++k) {
      CHECK(std::abs(m.entries(k, k) - (w.t - w.s) / (2 * pi)) < 1e-12);
    }
    CHECK(max_abs(m.entries - m.entries.adjoint()) < 1e-13);
  }
}

TEST_CASE("phase symbol is a weighted shift") {
  CHECK(phase_weight(0) == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-15));
  const auto m = toeplitz_lll(symbols::Phase{}, TruncationSpec::level(0, 10, 10));
  for (int r = 0; r < m.dim(); ++r) {
    for (int c = 0; c < m.dim(); ++c) {
      if (r == c + 1) {
        CHECK(std::abs(m.entries(r, c) - phase_weight(c)) < 1e-13);
      } else {
        CHECK(std::abs(m.entries(r, c)) < 1e-14);
      }
    }
  }
  // Weights increase to 1.
  for (int k = 0; k < 200; ++k) CHECK(phase_weight(k) < phase_weight(k + 1));
  CHECK(phase_weight(5000) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("selection rule for rotations") {
  // Entries with angular offset d pick up e^{i d theta}; angle 2 pi is the identity.
  const auto m = toeplitz_stacked(HalfPlaneSwitch{SwitchProfile::smooth_cubic(0.5), 0.0}, 1,
                                  {12, 12, {}});
  CHECK(max_abs(rotation_conjugate(m, 0.0).entries - m.entries) == 0.0);
  CHECK(max_abs(rotation_conjugate(m, 2 * pi).entries - m.entries) < 1e-13);
  const auto half = rotation_conjugate(rotation_conjugate(m, 0.7), -0.7);
  CHECK(max_abs(half.entries - m.entries) < 1e-14);
}

TEST_CASE("separable and position routes agree") {
  for (double theta : {0.0, pi / 3, pi / 2}) {
    for (const auto& p : {SwitchProfile::step(), SwitchProfile::linear_ramp(0.7, 0.2)}) {
      const HalfPlaneSwitch h{p, theta};
      const TruncationSpec t{10, 6, {0, 1}};
      const auto sep = assemble(h, t, Route::Separable);
      const auto pos = assemble(h, t, Route::Position);
      CHECK(max_abs(sep.entries - pos.entries) < 1e-11);
      // Rotating the fixed-axis matrix reproduces the rotated symbol.
      const auto rot = rotation_conjugate(assemble(HalfPlaneSwitch{p, 0.0}, t, Route::Separable), theta);
      CHECK(max_abs(rot.entries - sep.entries) < 1e-11);
    }
  }
}

TEST_CASE("separable integrals") {
  CHECK(std::abs(separable_integral(SwitchProfile::step(), 0, 0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(separable_integral(SwitchProfile::step(), 0, 0, 1) - 0.5) < 1e-15);
  // (1/pi) Int_{x>0} z e^{-|z|^2} = 1/(2 sqrt(pi)); on the upper half plane it is i/(2 sqrt(pi)).
  CHECK(std::abs(separable_integral(SwitchProfile::step(), 1, 0, 0) - 0.5 / std::sqrt(pi)) < 1e-15);
  CHECK(std::abs(separable_integral(SwitchProfile::step(), 1, 0, 1) - Complex(0, 0.5 / std::sqrt(pi))) <
        1e-15);
}

TEST_CASE("stacked assembly: diagonal blocks are the levels, cross block frozen") {
  const HalfPlaneSwitch h = step_switch();
  const auto st = toeplitz_stacked(h, 1, {8, 8, {}});
  for (int pos = 0; pos < 2; ++pos) {
    const auto lv = toeplitz_level(h, pos, {8, 8, {}});
    CHECK(max_abs(st.level_block(pos, pos) - lv.entries) < 1e-13);
  }
  // <eta e_0^{(1)}, e_0^{(0)}> = (1/pi) Int eta(x) conj(z) e^{-|z|^2} = 1/(2 sqrt(pi))
  CHECK(std::abs(st.entries(st.index(0, 0), st.index(1, 0)) - 1.0 / (2 * std::sqrt(pi))) < 1e-14);
  CHECK(max_abs(st.level_block(0, 1) - st.level_block(1, 0).adjoint()) < 1e-13);
}

TEST_CASE("buffer changes do not move the exposed block") {
  const HalfPlaneSwitch h{SwitchProfile::smooth_erf(0.6), 0.0};
  const auto small = toeplitz_level(h, 1, {20, 4, {}});
  const auto big = toeplitz_level(h, 1, {20, 40, {}});
  CHECK(max_abs(small.exposed() - big.exposed()) < 1e-13);
  const auto cut = big.truncated(20, 4);
  CHECK(max_abs(cut.entries - small.entries) < 1e-13);
  CHECK_THROWS_AS(big.truncated(40, 40), std::invalid_argument);
}

TEST_CASE("truncation validation and csv export") {
  CHECK_THROWS_AS((TruncationSpec{0, 4, {0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TruncationSpec{4, -1, {0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TruncationSpec{4, 4, {}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TruncationSpec{4, 4, {-1}}.validate()), std::invalid_argument);
  const auto m = toeplitz_lll(step_switch(), TruncationSpec::level(0, 2, 1));
  std::ostringstream os;
  export_csv(m, os);
  const std::string s = os.str();
  CHECK(s.rfind("# basis=levels[0]", 0) == 0);
  CHECK(s.find("row,col,re,im") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 2 + 9);
}
