#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace focklab::fock {

using Complex = std::complex<double>;

// Power of z (m) and of conj(z) (n). Angular momentum is m - n.
struct MonomialIndex {
  int m = 0;
  int n = 0;
  auto operator<=>(const MonomialIndex&) const = default;
  int degree() const { return m + n; }
  int angular() const { return m - n; }
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultBudget = 64;

// Finite linear combination of monomials z^m conj(z)^n with total degree <= budget.
class PolyState {
 public:
  using Map = std::map<MonomialIndex, Complex>;

  explicit PolyState(int budget = kDefaultBudget);
  static PolyState monomial(int m, int n, Complex c = 1.0, int budget = kDefaultBudget);

  int budget() const { return budget_; }
  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_degree() const;
  Complex coeff(int m, int n) const;

  // Adds c to the coefficient of z^m conj(z)^n; throws BudgetError past the budget.
  void add(int m, int n, Complex c);

  PolyState& operator+=(const PolyState& o);
  PolyState& operator-=(const PolyState& o);
  PolyState& operator*=(Complex s);
  friend PolyState operator+(PolyState a, const PolyState& b) { return a += b; }
  friend PolyState operator-(PolyState a, const PolyState& b) { return a -= b; }
  friend PolyState operator*(Complex s, PolyState a) { return a *= s; }

  // Largest coefficient modulus of this - o.
  double distance(const PolyState& o) const;

 private:
  int budget_;
  Map terms_;
};

// Compensated: Kahan summation of double products. Extended: products and sums in
// 50-digit arithmetic, so only the stored coefficients carry rounding.
enum class Summation { Plain, Compensated, Extended };

// <u, v> in L^2(C, dmu), linear in u. <z^m zb^n, z^p zb^q> = delta_{m+q,n+p} (m+q)!.
Complex inner_product(const PolyState& u, const PolyState& v,
                      Summation mode = Summation::Plain);
double norm(const PolyState& u);

PolyState apply_A(const PolyState& u);
PolyState apply_C(const PolyState& u);
PolyState apply_P(const PolyState& u);
PolyState apply_Vj(const PolyState& u, int j);
PolyState apply_Vj_adjoint(const PolyState& u, int j);
PolyState apply_Pj(const PolyState& u, int j);
PolyState number_op(const PolyState& u);

// Pointwise product of two functions; budget is the larger of the two.
PolyState multiply(const PolyState& u, const PolyState& v);

// e_k^{(j)} = C^j z^k / sqrt(j! k!), built from its closed-form expansion.
PolyState level_basis_vector(int j, int k, int budget = kDefaultBudget);

struct LevelBasisVector {
  int level;
  int index;
  PolyState state;
};
LevelBasisVector make_level_basis_vector(int j, int k, int budget = kDefaultBudget);

}  // namespace focklab::fock
