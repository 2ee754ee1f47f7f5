#include "focklab/fock_algebra.hpp"

#include "focklab/multiprecision.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace focklab::fock {

namespace {

// Largest n with n! finite in double.
constexpr int kMaxFactorial = 170;

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// n! by repeated multiplication: exact through 22!, within n ulp beyond.
const std::vector<double>& factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kMaxFactorial + 1, 1.0);
    for (int n = 1; n <= kMaxFactorial; ++n) t[n] = t[n - 1] * n;
    return t;
  }();
  return table;
}

const HighFloat& high_factorial(int n) {
  static const std::vector<HighFloat> table = [] {
    std::vector<HighFloat> t(kMaxFactorial + 1, HighFloat(1));
    for (int n = 1; n <= kMaxFactorial; ++n) t[n] = t[n - 1] * n;
    return t;
  }();
  if (n > kMaxFactorial) {
    throw RangeError("factorial of degree " + std::to_string(n) + " exceeds double range");
  }
  return table[n];
}

double factorial_checked(int n) {
  if (n > kMaxFactorial) {
    throw RangeError("factorial of degree " + std::to_string(n) + " exceeds double range");
  }
  return factorial_table()[n];
}

// m! / (m-n)!, exact while the product stays below 2^53.
double falling_factorial(int m, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= static_cast<double>(m - i);
  return r;
}

}  // namespace

PolyState::PolyState(int budget) : budget_(budget) {
  if (budget < 0) throw BudgetError("negative budget");
}

PolyState PolyState::monomial(int m, int n, Complex c, int budget) {
  PolyState s(budget);
  s.add(m, n, c);
  return s;
}

int PolyState::max_degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k.degree());
  return d;
}

Complex PolyState::coeff(int m, int n) const {
  auto it = terms_.find({m, n});
  return it == terms_.end() ? Complex{} : it->second;
}

void PolyState::add(int m, int n, Complex c) {
  if (m < 0 || n < 0) throw std::invalid_argument("negative monomial exponent");
  if (m + n > budget_) {
    throw BudgetError("degree " + std::to_string(m + n) + " exceeds budget " +
                      std::to_string(budget_));
  }
  if (c == Complex{}) return;
  auto [it, fresh] = terms_.try_emplace({m, n}, c);
  if (!fresh) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

PolyState& PolyState::operator+=(const PolyState& o) {
  budget_ = std::max(budget_, o.budget_);
  for (const auto& [k, c] : o.terms_) add(k.m, k.n, c);
  return *this;
}

PolyState& PolyState::operator-=(const PolyState& o) {
  budget_ = std::max(budget_, o.budget_);
  for (const auto& [k, c] : o.terms_) add(k.m, k.n, -c);
  return *this;
}

PolyState& PolyState::operator*=(Complex s) {
  if (s == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

double PolyState::distance(const PolyState& o) const {
  PolyState d = *this;
  d -= o;
  double r = 0.0;
  for (const auto& [k, c] : d.terms()) r = std::max(r, std::abs(c));
  return r;
}

Complex inner_product(const PolyState& u, const PolyState& v, Summation mode) {
  // Group v by angular momentum: only matching angular momenta pair up.
  std::map<int, std::vector<std::pair<MonomialIndex, Complex>>> by_angular;
  for (const auto& [k, c] : v.terms()) by_angular[k.angular()].push_back({k, c});

  if (mode == Summation::Extended) {
    HighFloat re = 0, im = 0;
    for (const auto& [a, ca] : u.terms()) {
      auto it = by_angular.find(a.angular());
      if (it == by_angular.end()) continue;
      for (const auto& [b, cb] : it->second) {
        const HighFloat& f = high_factorial(a.m + b.n);
        const HighFloat ar = ca.real(), ai = ca.imag(), br = cb.real(), bi = cb.imag();
        re += (ar * br + ai * bi) * f;
        im += (ai * br - ar * bi) * f;
      }
    }
    return {static_cast<double>(re), static_cast<double>(im)};
  }
  Complex sum{}, carry{};
  for (const auto& [a, ca] : u.terms()) {
    auto it = by_angular.find(a.angular());
    if (it == by_angular.end()) continue;
    for (const auto& [b, cb] : it->second) {
      const int deg = a.m + b.n;
      const Complex term = ca * std::conj(cb) * factorial_checked(deg);
      if (mode == Summation::Plain) {
        sum += term;
      } else {
        // Kahan summation on each component.
        const Complex y = term - carry;
        const Complex t = sum + y;
        carry = (t - sum) - y;
        sum = t;
      }
    }
  }
  return sum;
}

double norm(const PolyState& u) {
  return std::sqrt(std::max(0.0, inner_product(u, u, Summation::Compensated).real()));
}

PolyState apply_A(const PolyState& u) {
  PolyState out(u.budget());
  for (const auto& [k, c] : u.terms()) {
    if (k.n > 0) out.add(k.m, k.n - 1, c * static_cast<double>(k.n));
  }
  return out;
}

PolyState apply_C(const PolyState& u) {
  PolyState out(u.budget());
  for (const auto& [k, c] : u.terms()) {
    if (k.m > 0) out.add(k.m - 1, k.n, -c * static_cast<double>(k.m));
    out.add(k.m, k.n + 1, c);
  }
  return out;
}

PolyState apply_P(const PolyState& u) {
  PolyState out(u.budget());
  for (const auto& [k, c] : u.terms()) {
    if (k.m >= k.n) out.add(k.m - k.n, 0, c * falling_factorial(k.m, k.n));
  }
  return out;
}

namespace {
PolyState power(PolyState (*op)(const PolyState&), PolyState u, int j) {
  for (int i = 0; i < j; ++i) u = op(u);
  return u;
}
double inv_sqrt_factorial(int j) { return 1.0 / std::sqrt(factorial_checked(j)); }
}  // namespace

PolyState apply_Vj(const PolyState& u, int j) {
  PolyState out = power(apply_C, apply_P(u), j);
  out *= inv_sqrt_factorial(j);
  return out;
}

PolyState apply_Vj_adjoint(const PolyState& u, int j) {
  PolyState out = apply_P(power(apply_A, u, j));
  out *= inv_sqrt_factorial(j);
  return out;
}

PolyState apply_Pj(const PolyState& u, int j) {
  PolyState out = power(apply_C, apply_P(power(apply_A, u, j)), j);
  out *= 1.0 / factorial_checked(j);
  return out;
}

PolyState number_op(const PolyState& u) { return apply_C(apply_A(u)); }

PolyState multiply(const PolyState& u, const PolyState& v) {
  PolyState out(std::max(u.budget(), v.budget()));
  for (const auto& [a, ca] : u.terms()) {
    for (const auto& [b, cb] : v.terms()) out.add(a.m + b.m, a.n + b.n, ca * cb);
  }
  return out;
}

PolyState level_basis_vector(int j, int k, int budget) {
  if (j < 0 || k < 0) throw std::invalid_argument("negative level or index");
  if (j + k > budget) {
    throw BudgetError("e_k^(j) with j+k = " + std::to_string(j + k) + " exceeds budget " +
                      std::to_string(budget));
  }
  // C^j z^k = sum_i (-1)^i i! C(j,i) C(k,i) z^{k-i} zb^{j-i}
  PolyState out(budget);
  if (j + k <= kMaxFactorial) {
    const double inv_norm = 1.0 / std::sqrt(factorial_checked(j) * factorial_checked(k));
    for (int i = 0; i <= std::min(j, k); ++i) {
      const double mag = falling_factorial(j, i) * falling_factorial(k, i) / factorial_checked(i);
      out.add(k - i, j - i, ((i % 2 == 0) ? 1.0 : -1.0) * mag * inv_norm);
    }
    return out;
  }
  const double lnorm = -0.5 * (log_factorial(j) + log_factorial(k));
  for (int i = 0; i <= std::min(j, k); ++i) {
    const double lmag = log_factorial(j) - log_factorial(j - i) + log_factorial(k) -
                        log_factorial(k - i) - log_factorial(i) + lnorm;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    out.add(k - i, j - i, sign * std::exp(lmag));
  }
  return out;
}

LevelBasisVector make_level_basis_vector(int j, int k, int budget) {
  return {j, k, level_basis_vector(j, k, budget)};
}

}  // namespace focklab::fock
