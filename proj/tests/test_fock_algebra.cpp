#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "focklab/fock_algebra.hpp"

using namespace focklab::fock;

namespace {

PolyState random_state(std::mt19937_64& rng, int max_deg, int terms) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::normal_distribution<double> g;
  PolyState u;
  for (int t = 0; t < terms; ++t) {
    const int m = deg(rng);
    const int n = std::uniform_int_distribution<int>(0, max_deg - m)(rng);
    u.add(m, n, Complex(g(rng), g(rng)) / std::sqrt(std::tgamma(m + n + 1.0)));
  }
  return u;
}

// Same expansion with |coefficients|; bounds the rounding error of an inner product.
PolyState magnitudes(const PolyState& u) {
  PolyState out(u.budget());
  for (const auto& [k, c] : u.terms()) out.add(k.m, k.n, std::abs(c));
  return out;
}

double rounding_bound(const PolyState& u, const PolyState& v) {
  return 64 * std::numeric_limits<double>::epsilon() * inner_product(magnitudes(u), magnitudes(v)).real();
}

}  // namespace

TEST_CASE("inner product of monomials") {
  // <z^m zb^n, z^p zb^q> = delta_{m+q, n+p} (m+q)!
  CHECK(inner_product(PolyState::monomial(3, 1), PolyState::monomial(2, 0)) == Complex(6.0));
  CHECK(inner_product(PolyState::monomial(3, 1), PolyState::monomial(3, 0)) == Complex(0.0));
  CHECK(inner_product(PolyState::monomial(0, 0), PolyState::monomial(0, 0)) == Complex(1.0));
  CHECK(inner_product(PolyState::monomial(1, 1), PolyState::monomial(1, 1)) == Complex(2.0));
  // Antilinear in the second slot.
  const auto u = PolyState::monomial(2, 0, Complex(0, 1));
  CHECK(inner_product(u, u) == Complex(2.0));
}

TEST_CASE("budget and range errors") {
  PolyState u(4);
  CHECK_THROWS_AS(u.add(3, 2, 1.0), BudgetError);
  PolyState big(400);
  big.add(100, 80, 1.0);
  CHECK_THROWS_AS(inner_product(big, big), RangeError);
}

TEST_CASE("operator actions on monomials") {
  const auto u = PolyState::monomial(2, 3);
  CHECK(apply_A(u).coeff(2, 2) == Complex(3.0));
  const auto cu = apply_C(u);
  CHECK(cu.coeff(1, 3) == Complex(-2.0));
  CHECK(cu.coeff(2, 4) == Complex(1.0));
  // P(z^m zb^n) = m!/(m-n)! z^{m-n}, zero when n > m.
  CHECK(apply_P(PolyState::monomial(4, 2)).coeff(2, 0) == Complex(12.0));
  CHECK(apply_P(PolyState::monomial(1, 2)).empty());
}

TEST_CASE("level basis vectors are orthonormal eigenvectors of CA") {
  for (int j = 0; j <= 4; ++j) {
    for (int k = 0; k <= 10; ++k) {
      const auto e = level_basis_vector(j, k);
      CHECK(std::abs(inner_product(e, e) - 1.0) <= rounding_bound(e, e));
      CHECK(norm(number_op(e) - Complex(j) * e) < 1e-12);
      // Matches C^j z^k / sqrt(j! k!) built by repeated application.
      PolyState direct = PolyState::monomial(k, 0, 1.0 / std::sqrt(std::tgamma(j + 1.0) * std::tgamma(k + 1.0)));
      for (int i = 0; i < j; ++i) direct = apply_C(direct);
      CHECK(norm(direct - e) < 1e-12);
      for (int j2 = 0; j2 <= 4; ++j2) {
        for (int k2 = 0; k2 <= 10; ++k2) {
          if (j2 == j && k2 == k) continue;
          const auto f = level_basis_vector(j2, k2);
          CHECK(std::abs(inner_product(e, f)) <= rounding_bound(e, f));
        }
      }
    }
  }
}

TEST_CASE("randomized commutator [A,C] = 1 and adjointness") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 120; ++trial) {
    const auto u = random_state(rng, 20, 6);
    const auto v = random_state(rng, 20, 6);
    const auto comm = apply_A(apply_C(u)) - apply_C(apply_A(u));
    CHECK(comm.distance(u) < 1e-12);
    const Complex lhs = inner_product(apply_C(u), v, Summation::Extended);
    const Complex rhs = inner_product(u, apply_A(v), Summation::Extended);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("partial isometries V_j") {
  for (int j = 0; j <= 3; ++j) {
    for (int i = 0; i <= 3; ++i) {
      for (int k = 0; k <= 8; ++k) {
        const auto e = level_basis_vector(i, k);
        // V_j maps the lowest level onto level j: V_j e_k^{(0)} = e_k^{(j)}.
        if (i == 0) CHECK(norm(apply_Vj(e, j) - level_basis_vector(j, k)) < 1e-12);
        CHECK(norm(apply_Vj_adjoint(apply_Vj(e, j), j) - apply_P(e)) < 1e-12);
        CHECK(norm(apply_Vj(apply_Vj_adjoint(e, j), j) - apply_Pj(e, j)) < 1e-12);
        // P_j is the projection onto level j.
        if (i == j) {
          CHECK(norm(apply_Pj(e, j) - e) < 1e-12);
        } else {
          CHECK(norm(apply_Pj(e, j)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("multiplication is pointwise") {
  const auto u = PolyState::monomial(1, 2, 2.0);
  const auto v = PolyState::monomial(3, 0, Complex(0, 1));
  const auto w = multiply(u, v);
  CHECK(w.coeff(4, 2) == Complex(0, 2));
  CHECK(w.terms().size() == 1);
}

TEST_CASE("compensated and plain summation agree on benign input") {
  const auto e = level_basis_vector(2, 5);
  CHECK(std::abs(inner_product(e, e, Summation::Plain) - inner_product(e, e, Summation::Compensated)) < 1e-13);
}
