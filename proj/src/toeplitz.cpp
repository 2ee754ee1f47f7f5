#include "focklab/toeplitz.hpp"

#include <algorithm>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "focklab/fock_algebra.hpp"
#include "focklab/multiprecision.hpp"
#include "focklab/quadrature.hpp"

namespace focklab::toeplitz {

using symbols::SwitchProfile;
using symbols::SymbolSpec;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCancellationLimit = 1e12;

double lfact(int n) { return std::lgamma(n + 1.0); }
double lbinom(int n, int k) { return lfact(n) - lfact(k) - lfact(n - k); }

// One monomial z^m zb^n of e_k^{(j)} with coefficient sign * exp(logmag).
struct LevelMonomial {
  int m;
  int n;
  double sign;
  double logmag;
};

std::vector<LevelMonomial> level_monomials(int j, int k) {
  std::vector<LevelMonomial> out;
  const double lnorm = -0.5 * (lfact(j) + lfact(k));
  for (int r = 0; r <= std::min(j, k); ++r) {
    out.push_back({k - r, j - r, (r % 2 == 0) ? 1.0 : -1.0,
                   lfact(j) - lfact(j - r) + lfact(k) - lfact(k - r) - lfact(r) + lnorm});
  }
  return out;
}

// ------------------------------------------------------------ position route

// Normalized Hermite functions phi_0..phi_pmax at x, with running rescaling so
// that phi_0 underflow far from the origin does not zero out high orders.
void hermite_column(int pmax, double x, double* out) {
  double scale = -0.5 * x * x - 0.25 * std::log(kPi);  // log of the common factor
  double prev = 0.0, cur = 1.0;
  auto emit = [&](int n, double v) {
    const double lg = scale + std::log(std::abs(v) + 1e-300);
    out[n] = (lg < -745.0 || v == 0.0) ? 0.0 : v * std::exp(scale);
  };
  emit(0, cur);
  for (int n = 0; n < pmax; ++n) {
    const double next =
        std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev *= 1e-150;
      cur *= 1e-150;
      scale += 150.0 * std::log(10.0);
    }
    emit(n + 1, cur);
  }
}

// E(p', p) = Integral eta(s) phi_p(s) phi_p'(s) ds.
Eigen::MatrixXd position_moments(const SwitchProfile& prof, int pmax) {
  const double reach = std::sqrt(2.0 * pmax + 1.0) + 10.0;
  const double lo = std::min(-reach, prof.center - prof.a - 1.0);
  const double hi = std::max(reach, prof.center + prof.a + 1.0);
  const auto rule = quad::composite_legendre(lo, hi, prof.breakpoints(), 0.2, 20);
  std::vector<double> xs, ws;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double e = prof(rule.nodes[i]);
    if (e == 0.0) continue;
    xs.push_back(rule.nodes[i]);
    ws.push_back(rule.weights[i] * e);
  }
  const int nq = static_cast<int>(xs.size());
  Eigen::MatrixXd P(pmax + 1, nq);
  for (int i = 0; i < nq; ++i) hermite_column(pmax, xs[i], P.col(i).data());
  Eigen::MatrixXd Pw = P;
  for (int i = 0; i < nq; ++i) Pw.col(i) *= ws[i];
  return Pw * P.transpose();
}

// Coefficients of |j,k> on |p>_+ |j+k-p>_- for p = 0..j+k, where the + mode
// carries Re(zeta) as its position quadrature.
std::vector<double> mode_coefficients(int j, int k) {
  std::vector<double> c(j + k + 1, 0.0);
  for (int p = 0; p <= j + k; ++p) {
    const int q = j + k - p;
    const double pref =
        0.5 * (lfact(p) + lfact(q) - lfact(j) - lfact(k)) - 0.5 * (j + k) * std::log(2.0);
    double s = 0.0;
    for (int t = std::max(0, p - j); t <= std::min(k, p); ++t) {
      const double sign = ((k - t) % 2 == 0) ? 1.0 : -1.0;
      s += sign * std::exp(lbinom(j, p - t) + lbinom(k, t) + pref);
    }
    c[p] = s;
  }
  return c;
}

// Real symmetric matrix of eta(Re zeta) over the given levels, K indices each.
Eigen::MatrixXd position_matrix(const SwitchProfile& prof, const std::vector<int>& levels, int K) {
  const int jmax = *std::max_element(levels.begin(), levels.end());
  const Eigen::MatrixXd E = position_moments(prof, jmax + K - 1);
  const int L = static_cast<int>(levels.size());
  std::vector<std::vector<double>> coef(L * K);
  std::vector<int> total(L * K);
  for (int a = 0; a < L; ++a) {
    for (int k = 0; k < K; ++k) {
      coef[a * K + k] = mode_coefficients(levels[a], k);
      total[a * K + k] = levels[a] + k;
    }
  }
  Eigen::MatrixXd M(L * K, L * K);
  for (int col = 0; col < L * K; ++col) {
    const auto& cc = coef[col];
    const int n1 = total[col];
    for (int row = col; row < L * K; ++row) {
      const auto& cr = coef[row];
      const int n2 = total[row];
      double s = 0.0;
      for (int q = 0; q <= std::min(n1, n2); ++q) s += cr[n2 - q] * cc[n1 - q] * E(n2 - q, n1 - q);
      M(row, col) = M(col, row) = s;
    }
  }
  return M;
}

// ------------------------------------------------------------ separable route

using HF = HighFloat;

struct HighComplex {
  HF re = 0;
  HF im = 0;
};

struct SeparableTerm {
  HighComplex value;
  HF abs_sum = 0;
};

class SeparableEngine {
 public:
  SeparableEngine(const SwitchProfile& prof, int axis, int max_order)
      : axis_(axis) {
    if (max_order > symbols::kMaxMomentOrder) {
      throw std::range_error("separable route: total degree " + std::to_string(max_order) +
                             " exceeds the moment order limit");
    }
    eta_.resize(max_order + 1);
    gauss_.resize(max_order + 1);
    for (int m = 0; m <= max_order; ++m) {
      eta_[m] = symbols::eta_moment<HF>(prof, m);
      gauss_[m] = symbols::gauss_moment_t<HF>(m);
    }
    binom_.assign(max_order + 1, std::vector<HF>(max_order + 1, HF(0)));
    for (int n = 0; n <= max_order; ++n) {
      binom_[n][0] = 1;
      for (int r = 1; r <= n; ++r) binom_[n][r] = binom_[n - 1][r - 1] + (r < n ? binom_[n - 1][r] : HF(0));
    }
  }

  // Unnormalized (1/pi) integral of f z^a zb^b exp(-|z|^2).
  const SeparableTerm& integral(int a, int b) {
    auto key = std::make_pair(a, b);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SeparableTerm out;
    // (x + iy)^a (x - iy)^b = sum_{r,s} C(a,r) C(b,s) x^{a+b-r-s} y^{r+s} i^r (-i)^s
    for (int t = 0; t <= a + b; ++t) {
      HF kt = 0;
      for (int r = std::max(0, t - b); r <= std::min(a, t); ++r) {
        const int s = t - r;
        HF term = binom_[a][r] * binom_[b][s];
        if (s % 2 == 1) term = -term;
        kt += term;
      }
      if (kt == 0) continue;
      // i^t as (re, im)
      const int phase = t % 4;
      HF moment;
      if (axis_ == 0) {
        if (t % 2 == 1) continue;
        moment = gauss_[t] * eta_[a + b - t];
      } else {
        if ((a + b - t) % 2 == 1) continue;
        moment = eta_[t] * gauss_[a + b - t];
      }
      const HF v = kt * moment;
      switch (phase) {
        case 0: out.value.re += v; break;
        case 1: out.value.im += v; break;
        case 2: out.value.re -= v; break;
        case 3: out.value.im -= v; break;
      }
      HF absterms = 0;
      for (int r = std::max(0, t - b); r <= std::min(a, t); ++r) absterms += binom_[a][r] * binom_[b][t - r];
      out.abs_sum += absterms * abs(moment);
    }
    const HF inv_pi = 1 / boost::math::constants::pi<HF>();
    out.value.re *= inv_pi;
    out.value.im *= inv_pi;
    out.abs_sum *= inv_pi;
    return cache_.emplace(key, out).first->second;
  }

 private:
  int axis_;
  std::vector<HF> eta_, gauss_;
  std::vector<std::vector<HF>> binom_;
  std::map<std::pair<int, int>, SeparableTerm> cache_;
};

struct HighMonomial {
  int m;
  int n;
  HF weight;
};

// Expansion of e_k^{(j)} with exact high-precision weights.
std::vector<HighMonomial> level_monomials_high(int j, int k) {
  using boost::math::factorial;
  std::vector<HighMonomial> out;
  const HF norm = sqrt(factorial<HF>(j) * factorial<HF>(k));
  for (int r = 0; r <= std::min(j, k); ++r) {
    HF w = factorial<HF>(j) * factorial<HF>(k) /
           (factorial<HF>(j - r) * factorial<HF>(k - r) * factorial<HF>(r) * norm);
    if (r % 2 == 1) w = -w;
    out.push_back({k - r, j - r, w});
  }
  return out;
}

Matrix separable_matrix(const SwitchProfile& prof, double theta, const std::vector<int>& levels,
                        int K) {
  // theta = pi/2 is integrated directly along the imaginary axis; other angles
  // use the axis-0 integrals times the rotation phase.
  const bool vertical = std::abs(theta - 0.5 * kPi) < 1e-15;
  const int jmax = *std::max_element(levels.begin(), levels.end());
  SeparableEngine engine(prof, vertical ? 1 : 0, 2 * (K - 1 + jmax));
  const int L = static_cast<int>(levels.size());
  std::vector<std::vector<HighMonomial>> basis(L * K);
  for (int a = 0; a < L; ++a) {
    for (int k = 0; k < K; ++k) basis[a * K + k] = level_monomials_high(levels[a], k);
  }
  Matrix M(L * K, L * K);
  for (int c = 0; c < L * K; ++c) {
    for (int r = 0; r < L * K; ++r) {
      HighComplex acc;
      HF abs_acc = 0;
      for (const auto& u : basis[c]) {
        for (const auto& v : basis[r]) {
          // f z^m zb^n paired with z^p zb^q integrates z^{m+q} zb^{n+p}.
          const auto& term = engine.integral(u.m + v.n, u.n + v.m);
          const HF w = u.weight * v.weight;
          acc.re += w * term.value.re;
          acc.im += w * term.value.im;
          abs_acc += abs(w) * term.abs_sum;
        }
      }
      const int lc = levels[c / K], kc = c % K, lr = levels[r / K], kr = r % K;
      if (abs_acc > kCancellationLimit) {
        std::ostringstream os;
        os << "separable route: cancellation ratio " << static_cast<double>(abs_acc)
           << " at row (" << lr << "," << kr << ") col (" << lc << "," << kc << ")";
        throw CancellationError(os.str());
      }
      Complex val(static_cast<double>(acc.re), static_cast<double>(acc.im));
      if (!vertical && theta != 0.0) val *= std::polar(1.0, ((kc - lc) - (kr - lr)) * theta);
      M(r, c) = val;
    }
  }
  return M;
}

// ------------------------------------------------------------ closed forms

// Matrix of an angular symbol g(arg zeta) whose Fourier data enter through
// angular(dm) = (1/2pi) Integral g(phi) e^{i dm phi} dphi.
template <class Angular>
Matrix angular_matrix(const std::vector<int>& levels, int K, Angular angular) {
  const int L = static_cast<int>(levels.size());
  Matrix M = Matrix::Zero(L * K, L * K);
  for (int cp = 0; cp < L; ++cp) {
    for (int k = 0; k < K; ++k) {
      const auto cm = level_monomials(levels[cp], k);
      for (int rp = 0; rp < L; ++rp) {
        for (int l = 0; l < K; ++l) {
          const auto rm = level_monomials(levels[rp], l);
          const int dm = (k - levels[cp]) - (l - levels[rp]);
          const Complex ang = angular(dm);
          if (ang == Complex{}) continue;
          double s = 0.0;
          for (const auto& u : cm) {
            for (const auto& v : rm) {
              const int a = u.m + v.n, b = u.n + v.m;
              // (1/pi) Integral r^{a+b} e^{-r^2} r dr over (0, inf) times 2pi = Gamma((a+b)/2 + 1)
              s += u.sign * v.sign * std::exp(u.logmag + v.logmag + std::lgamma(0.5 * (a + b) + 1.0));
            }
          }
          M(rp * K + l, cp * K + k) = s * ang;
        }
      }
    }
  }
  return M;
}

Matrix wedge_matrix(const symbols::Wedge& w, const std::vector<int>& levels, int K) {
  return angular_matrix(levels, K, [&](int dm) -> Complex {
    if (dm == 0) return (w.t - w.s) / (2 * kPi);
    const Complex i(0, 1);
    return (std::exp(i * (double)dm * w.t) - std::exp(i * (double)dm * w.s)) / (i * (double)dm * 2.0 * kPi);
  });
}

// g(phi) = sum c_n e^{i n phi} pairs with e^{i dm phi} through c_{-dm}.
Matrix fourier_matrix(const symbols::AngularFourier& g, const std::vector<int>& levels, int K) {
  return angular_matrix(levels, K, [&](int dm) -> Complex {
    auto it = g.coeffs.find(-dm);
    return it == g.coeffs.end() ? Complex{} : it->second;
  });
}

Matrix phase_matrix(const std::vector<int>& levels, int K) {
  return fourier_matrix({{{1, 1.0}}}, levels, K);
}

Matrix polynomial_matrix(const symbols::RealPolynomial& p, const std::vector<int>& levels, int K) {
  const int jmax = *std::max_element(levels.begin(), levels.end());
  const int budget = std::max(fock::kDefaultBudget, 2 * (K + jmax) + std::max(0, p.degree()));
  const fock::PolyState f = polynomial_state(p, budget);
  const int L = static_cast<int>(levels.size());
  std::vector<fock::PolyState> basis;
  for (int a = 0; a < L; ++a) {
    for (int k = 0; k < K; ++k) basis.push_back(fock::level_basis_vector(levels[a], k, budget));
  }
  Matrix M(L * K, L * K);
  for (int c = 0; c < L * K; ++c) {
    const auto fe = fock::multiply(f, basis[c]);
    for (int r = 0; r < L * K; ++r) M(r, c) = fock::inner_product(fe, basis[r]);
  }
  return M;
}

Matrix switch_matrix(const symbols::HalfPlaneSwitch& h, const std::vector<int>& levels, int K,
                     Route route) {
  if (route == Route::Separable) return separable_matrix(h.profile, h.theta, levels, K);
  Matrix M = position_matrix(h.profile, levels, K).cast<Complex>();
  if (h.theta != 0.0) {
    for (int c = 0; c < M.cols(); ++c) {
      const int dc = c % K - levels[c / K];
      for (int r = 0; r < M.rows(); ++r) {
        const int dr = r % K - levels[r / K];
        M(r, c) *= std::polar(1.0, (dc - dr) * h.theta);
      }
    }
  }
  return M;
}

std::string level_tag(const std::vector<int>& levels) {
  std::ostringstream os;
  os << "levels[";
  for (size_t i = 0; i < levels.size(); ++i) os << (i ? "," : "") << levels[i];
  os << "]";
  return os.str();
}

}  // namespace

// ------------------------------------------------------------ public API

fock::PolyState polynomial_state(const symbols::RealPolynomial& p, int budget) {
  // x = (z + zb)/2, y = (z - zb)/(2i)
  fock::PolyState fx(budget), fy(budget);
  fx.add(1, 0, 0.5);
  fx.add(0, 1, 0.5);
  fy.add(1, 0, Complex(0, -0.5));
  fy.add(0, 1, Complex(0, 0.5));
  fock::PolyState f(budget);
  for (const auto& [e, c] : p.coeffs) {
    fock::PolyState term = fock::PolyState::monomial(0, 0, c, budget);
    for (int i = 0; i < e.first; ++i) term = fock::multiply(term, fx);
    for (int i = 0; i < e.second; ++i) term = fock::multiply(term, fy);
    f += term;
  }
  return f;
}

TruncationSpec TruncationSpec::level(int j, int N, int B) { return {N, B, {j}}; }

TruncationSpec TruncationSpec::stacked(int ell, int N, int B) {
  TruncationSpec t{N, B, {}};
  for (int j = 0; j <= ell; ++j) t.levels.push_back(j);
  return t;
}

void TruncationSpec::validate() const {
  if (N < 1) throw std::invalid_argument("truncation: N must be >= 1");
  if (B < 0) throw std::invalid_argument("truncation: B must be >= 0");
  if (levels.empty()) throw std::invalid_argument("truncation: empty level set");
  for (int j : levels) {
    if (j < 0) throw std::invalid_argument("truncation: negative level");
  }
}

Matrix OperatorMatrix::level_block(int i_pos, int j_pos) const {
  return entries.block(i_pos * block(), j_pos * block(), block(), block());
}

Matrix OperatorMatrix::section(int rows, int cols) const {
  if (rows > block() || cols > block()) throw std::invalid_argument("section exceeds block size");
  const int L = num_levels();
  Matrix S(L * rows, L * cols);
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) {
      S.block(a * rows, b * cols, rows, cols) = entries.block(a * block(), b * block(), rows, cols);
    }
  }
  return S;
}

OperatorMatrix OperatorMatrix::truncated(int N2, int B2) const {
  if (N2 + B2 > block()) throw std::invalid_argument("truncated: larger than the assembled block");
  OperatorMatrix out{section(N2 + B2, N2 + B2), N2, B2, levels, basis_tag, provenance};
  return out;
}

OperatorMatrix assemble(const SymbolSpec& sym, const TruncationSpec& trunc, Route route) {
  trunc.validate();
  const int K = trunc.block();
  const auto& levels = trunc.levels;
  struct V {
    const std::vector<int>& levels;
    int K;
    Route route;
    Matrix operator()(const symbols::HalfPlaneSwitch& h) const {
      return switch_matrix(h, levels, K, route);
    }
    Matrix operator()(const symbols::CompactProfile& c) const {
      Matrix M = Matrix::Zero(levels.size() * K, levels.size() * K);
      for (const auto& [w, h] : c.parts) M += w * switch_matrix(h, levels, K, route);
      return M;
    }
    Matrix operator()(const symbols::Wedge& w) const { return wedge_matrix(w, levels, K); }
    Matrix operator()(const symbols::Phase&) const { return phase_matrix(levels, K); }
    Matrix operator()(const symbols::AngularFourier& g) const {
      return fourier_matrix(g, levels, K);
    }
    Matrix operator()(const symbols::RealPolynomial& p) const {
      return polynomial_matrix(p, levels, K);
    }
  };
  OperatorMatrix out;
  out.entries = std::visit(V{levels, K, route}, sym);
  out.N = trunc.N;
  out.B = trunc.B;
  out.levels = levels;
  out.basis_tag = level_tag(levels);
  out.provenance = symbols::describe(sym);
  return out;
}

OperatorMatrix toeplitz_lll(const SymbolSpec& sym, const TruncationSpec& trunc, Route route) {
  TruncationSpec t = trunc;
  t.levels = {0};
  return assemble(sym, t, route);
}

OperatorMatrix toeplitz_level(const SymbolSpec& sym, int j, const TruncationSpec& trunc,
                              Route route) {
  TruncationSpec t = trunc;
  t.levels = {j};
  return assemble(sym, t, route);
}

OperatorMatrix toeplitz_stacked(const SymbolSpec& sym, int ell, const TruncationSpec& trunc,
                                Route route) {
  return assemble(sym, TruncationSpec::stacked(ell, trunc.N, trunc.B), route);
}

OperatorMatrix rotation_conjugate(const OperatorMatrix& mat, double theta) {
  OperatorMatrix out = mat;
  const int K = mat.block();
  for (int c = 0; c < mat.dim(); ++c) {
    const int dc = c % K - mat.levels[c / K];
    for (int r = 0; r < mat.dim(); ++r) {
      const int dr = r % K - mat.levels[r / K];
      out.entries(r, c) *= std::polar(1.0, (dc - dr) * theta);
    }
  }
  std::ostringstream os;
  os << "rotate(" << theta << "," << mat.provenance << ")";
  out.provenance = os.str();
  return out;
}

Complex separable_integral(const SwitchProfile& profile, int a, int b, int axis) {
  SeparableEngine engine(profile, axis, a + b);
  const auto& t = engine.integral(a, b);
  const HF scale = exp(HF(0.5 * (lfact(a) + lfact(b))));
  if (t.abs_sum / scale > kCancellationLimit) {
    throw CancellationError("separable_integral: cancellation ratio above limit at (" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
  }
  return {static_cast<double>(t.value.re), static_cast<double>(t.value.im)};
}

double phase_weight(int k) {
  // Gamma(k + 3/2) / sqrt(k! (k+1)!) = [Gamma(k + 3/2) / Gamma(k + 1)] / sqrt(k + 1)
  return boost::math::tgamma_ratio(k + 1.5, k + 1.0) / std::sqrt(k + 1.0);
}

void export_csv(const OperatorMatrix& mat, std::ostream& os) {
  os << "# basis=" << mat.basis_tag << " N=" << mat.N << " B=" << mat.B
     << " symbol=" << mat.provenance << "\n";
  os << "row,col,re,im\n";
  os.precision(17);
  for (int c = 0; c < mat.dim(); ++c) {
    for (int r = 0; r < mat.dim(); ++r) {
      const Complex v = mat.entries(r, c);
      if (v == Complex{}) continue;
      os << r << "," << c << "," << v.real() << "," << v.imag() << "\n";
    }
  }
}

}  // namespace focklab::toeplitz
