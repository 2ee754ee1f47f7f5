#include "focklab/trace_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "focklab/fock_algebra.hpp"
#include "focklab/quadrature.hpp"

namespace focklab::trace {

using toeplitz::Matrix;
using toeplitz::OperatorMatrix;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct KahanSum {
  Complex sum{};
  Complex carry{};
  void add(Complex x) {
    const Complex y = x - carry;
    const Complex t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// sum_m X(e, m) Y(m, e) for row/column e.
Complex row_col(const Matrix& X, const Matrix& Y, int e) {
  return X.row(e).transpose().cwiseProduct(Y.col(e)).sum();
}

std::vector<int> exposed_indices(int num_levels, int K, int N) {
  std::vector<int> idx;
  idx.reserve(num_levels * N);
  for (int a = 0; a < num_levels; ++a) {
    for (int k = 0; k < N; ++k) idx.push_back(a * K + k);
  }
  return idx;
}

// Buffered trace of [X, Y]; partial sums in fixed index order.
Complex buffered_trace(const Matrix& X, const Matrix& Y, const std::vector<int>& exposed,
                       std::vector<Complex>* partial) {
  KahanSum acc;
  if (partial) partial->clear();
  for (int e : exposed) {
    acc.add(row_col(X, Y, e) - row_col(Y, X, e));
    if (partial) partial->push_back(acc.sum);
  }
  return acc.sum;
}

// tr(X_N Y_N - Y_N X_N) on the exposed block only: zero up to rounding.
Complex unbuffered_trace(const Matrix& X, const Matrix& Y, const std::vector<int>& exposed) {
  const int n = static_cast<int>(exposed.size());
  Matrix Xe(n, n), Ye(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      Xe(r, c) = X(exposed[r], exposed[c]);
      Ye(r, c) = Y(exposed[r], exposed[c]);
    }
  }
  Complex s{};
  for (int e = 0; e < n; ++e) s += row_col(Xe, Ye, e) - row_col(Ye, Xe, e);
  const double scale = std::max(1.0, Xe.norm() * Ye.norm());
  if (std::abs(s) > 1e-10 * scale) {
    throw std::logic_error("unbuffered commutator trace is not zero; matrices are inconsistent");
  }
  return s;
}

void finish(TraceEstimate& est, const Schedule& schedule) {
  est.tolerance = schedule.tolerance;
  est.value = est.history.back().value;
  const size_t n = est.history.size();
  if (n < 3) {
    est.stabilized = false;
    est.gap = n == 2 ? kTwoPi * std::abs(est.history[1].value - est.history[0].value)
                     : std::numeric_limits<double>::infinity();
    return;
  }
  const double g1 = kTwoPi * std::abs(est.history[n - 1].value - est.history[n - 2].value);
  const double g2 = kTwoPi * std::abs(est.history[n - 2].value - est.history[n - 3].value);
  est.gap = std::max(g1, g2);
  est.stabilized = est.gap < schedule.tolerance;
}

struct PairMatrices {
  OperatorMatrix F;
  OperatorMatrix G;
};

PairMatrices assemble_pair(const PairSpec& pair, const Schedule& schedule, toeplitz::Route route) {
  schedule.validate();
  symbols::validate(pair.f, false);
  symbols::validate(pair.g, false);
  const int Nmax = schedule.N.back();
  const auto trunc = pair.arena.truncation(Nmax, schedule.buffer_for(Nmax));
  return {toeplitz::assemble(pair.f, trunc, route), toeplitz::assemble(pair.g, trunc, route)};
}

// All buffered entries of F and G at the given step.
std::pair<Matrix, Matrix> step_matrices(const PairMatrices& pm, int N, int B) {
  if (N + B == pm.F.block()) return {pm.F.entries, pm.G.entries};
  return {pm.F.truncated(N, B).entries, pm.G.truncated(N, B).entries};
}

// Sum of c_ij A^i B^j from cached powers.
Matrix poly_of_pair(const RealPolynomial& p, const std::vector<Matrix>& Ap,
                    const std::vector<Matrix>& Bp) {
  const int n = static_cast<int>(Ap[0].rows());
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [e, c] : p.coeffs) {
    const auto [i, j] = e;
    if (i == 0) {
      out += c * Bp[j];
    } else if (j == 0) {
      out += c * Ap[i];
    } else {
      out.noalias() += c * (Ap[i] * Bp[j]);
    }
  }
  return out;
}

std::vector<Matrix> powers(const Matrix& X, int deg) {
  std::vector<Matrix> out{Matrix::Identity(X.rows(), X.cols())};
  for (int d = 1; d <= deg; ++d) out.push_back(d == 1 ? X : Matrix(out.back() * X));
  return out;
}

RealPolynomial poisson_bracket(const RealPolynomial& p, const RealPolynomial& q) {
  return p.dx() * q.dy() + (-1.0) * (p.dy() * q.dx());
}

RealPolynomial ddbar(const RealPolynomial& f) {
  return 0.25 * (f.dx().dx() + f.dy().dy());
}

double step_area(double lo1, double hi1, double lo2, double hi2, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double corners[4][2] = {{lo1, lo2}, {hi1, lo2}, {hi1, hi2}, {lo1, hi2}};
  double u[4][2];
  for (int v = 0; v < 4; ++v) {
    u[v][0] = corners[v][0];
    u[v][1] = (corners[v][1] - corners[v][0] * c) / s;
  }
  double twice = 0.0;
  for (int v = 0; v < 4; ++v) {
    const int w = (v + 1) % 4;
    twice += u[v][0] * u[w][1] - u[w][0] * u[v][1];
  }
  return 0.5 * std::abs(twice);
}

// Integral over the line of eta(s + shift) - eta(s), by composite Gauss-Legendre.
double shifted_difference(const SwitchProfile& prof, double shift) {
  const double R = std::abs(prof.center) + prof.a + std::abs(shift) + 1.0;
  std::vector<double> br = prof.breakpoints();
  for (double b : prof.breakpoints()) br.push_back(b - shift);
  const auto rule = quad::composite_legendre(-R, R, br, 0.25, 20);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    s += rule.weights[i] * (prof(x + shift) - prof(x));
  }
  return s;
}

}  // namespace

// ------------------------------------------------------------ types

nlohmann::json TraceEstimate::to_json() const {
  nlohmann::json j;
  j["value_re"] = value.real();
  j["value_im"] = value.imag();
  j["two_pi_value_re"] = kTwoPi * value.real();
  j["two_pi_value_im"] = kTwoPi * value.imag();
  j["stabilized"] = stabilized;
  j["gap"] = gap;
  j["tolerance"] = tolerance;
  nlohmann::json sched = nlohmann::json::array();
  for (const auto& h : history) {
    sched.push_back({{"N", h.N},
                     {"B", h.B},
                     {"value_re", h.value.real()},
                     {"value_im", h.value.imag()},
                     {"unbuffered_abs", std::abs(h.unbuffered)}});
  }
  j["schedule"] = sched;
  return j;
}

toeplitz::TruncationSpec Arena::truncation(int N, int B) const {
  return kind == Kind::Level ? toeplitz::TruncationSpec::level(j, N, B)
                             : toeplitz::TruncationSpec::stacked(j, N, B);
}

std::string Arena::describe() const {
  return (kind == Kind::Level ? "level " : "stacked ") + std::to_string(j);
}

PairSpec PairSpec::square(const SwitchProfile& profile, double theta, Arena arena) {
  return {symbols::HalfPlaneSwitch{profile, 0.0}, symbols::HalfPlaneSwitch{profile, theta}, arena};
}

PairSpec PairSpec::disc(Arena arena) {
  return {symbols::AngularFourier::phase_real(), symbols::AngularFourier::phase_imag(), arena};
}

int Schedule::buffer_for(int n) const {
  return buffer >= 0 ? buffer : static_cast<int>(std::lround(buffer_ratio * n));
}

void Schedule::validate() const {
  if (N.empty()) throw std::invalid_argument("schedule: empty N list");
  for (size_t i = 0; i < N.size(); ++i) {
    if (N[i] < 1) throw std::invalid_argument("schedule: N must be positive");
    if (i > 0 && N[i] <= N[i - 1]) throw std::invalid_argument("schedule: N must increase strictly");
    if (2 * buffer_for(N[i]) < N[i]) throw std::invalid_argument("schedule: buffer must be >= N/2");
  }
  if (!(tolerance > 0)) throw std::invalid_argument("schedule: tolerance must be positive");
}

// ------------------------------------------------------------ traces

TraceEstimate commutator_trace(const PairSpec& pair, const Schedule& schedule,
                               toeplitz::Route route) {
  const auto pm = assemble_pair(pair, schedule, route);
  TraceEstimate est;
  for (int N : schedule.N) {
    const int B = schedule.buffer_for(N);
    const auto [F, G] = step_matrices(pm, N, B);
    const auto exposed = exposed_indices(pm.F.num_levels(), N + B, N);
    TraceStep step{N, B, buffered_trace(F, G, exposed, &est.partial_sums), {}};
    step.unbuffered = unbuffered_trace(F, G, exposed);
    est.history.push_back(step);
  }
  finish(est, schedule);
  return est;
}

TraceEstimate helton_howe_trace(const RealPolynomial& p, const RealPolynomial& q,
                                const PairSpec& pair, const Schedule& schedule,
                                toeplitz::Route route) {
  if (p.degree() > 6 || q.degree() > 6) {
    throw std::invalid_argument("helton_howe_trace: polynomial degree above 6");
  }
  const auto pm = assemble_pair(pair, schedule, route);
  int dA = 0, dB = 0;
  for (const auto* poly : {&p, &q}) {
    for (const auto& [e, c] : poly->coeffs) {
      dA = std::max(dA, e.first);
      dB = std::max(dB, e.second);
    }
  }
  TraceEstimate est;
  for (int N : schedule.N) {
    const int B = schedule.buffer_for(N);
    const auto [F, G] = step_matrices(pm, N, B);
    const auto Ap = powers(F, dA), Bp = powers(G, dB);
    const Matrix P = poly_of_pair(p, Ap, Bp), Q = poly_of_pair(q, Ap, Bp);
    const auto exposed = exposed_indices(pm.F.num_levels(), N + B, N);
    TraceStep step{N, B, buffered_trace(P, Q, exposed, &est.partial_sums), {}};
    step.unbuffered = unbuffered_trace(P, Q, exposed);
    est.history.push_back(step);
  }
  finish(est, schedule);
  return est;
}

// ------------------------------------------------------------ integrals

std::string to_string(Region r) { return r == Region::Square ? "square" : "disc"; }

Region parse_region(const std::string& name) {
  if (name == "square") return Region::Square;
  if (name == "disc") return Region::Disc;
  throw std::invalid_argument("unknown region: " + name);
}

double region_monomial_integral(int i, int j, Region region) {
  if (region == Region::Square) return 1.0 / ((i + 1.0) * (j + 1.0));
  if (i % 2 || j % 2) return 0.0;
  // Integral over the disc: 2 Gamma((i+1)/2) Gamma((j+1)/2) / ((i+j+2) Gamma((i+j+2)/2))
  return 2.0 * std::tgamma(0.5 * (i + 1)) * std::tgamma(0.5 * (j + 1)) /
         ((i + j + 2.0) * std::tgamma(0.5 * (i + j + 2)));
}

double poisson_bracket_integral(const RealPolynomial& p, const RealPolynomial& q, Region region) {
  double s = 0.0;
  for (const auto& [e, c] : poisson_bracket(p, q).coeffs) {
    s += c * region_monomial_integral(e.first, e.second, region);
  }
  return s;
}

double switch_area_identity(const SwitchProfile& profile, double t) {
  const double R = std::abs(profile.center) + profile.a + std::abs(t) + 1.0;
  return profile.integral(-R + t, R + t) - profile.integral(-R, R);
}

InnerIntegral inner_integral_check(const SwitchProfile& p1, const SwitchProfile& p2, double theta,
                                   Complex x, Complex y) {
  if (theta < kPi / 12 - 1e-12 || theta > 11 * kPi / 12 + 1e-12) {
    throw std::invalid_argument("inner_integral_check: theta outside [pi/12, 11pi/12]");
  }
  const double s = std::sin(theta), c = std::cos(theta);
  const double y1 = y.real();
  const double d = x.real() * c + x.imag() * s;
  InnerIntegral out{0.0, -y1 * (x.imag() + x.real() * c / s)};
  if (p1.kind == symbols::ProfileKind::Step && p2.kind == symbols::ProfileKind::Step) {
    // First factor is +-1 on an interval of s1 = Re u, second on an interval of
    // s2 = Re(e^{-i theta} u); the product lives on a parallelogram.
    const double c1 = p1.center, c2 = p2.center;
    const double sign1 = y1 > 0 ? 1.0 : -1.0;
    const double lo1 = std::min(c1 - y1, c1), hi1 = std::max(c1 - y1, c1);
    const double sign2 = d > 0 ? -1.0 : 1.0;
    const double lo2 = std::min(c2 - d, c2), hi2 = std::max(c2 - d, c2);
    out.value = sign1 * sign2 * step_area(lo1, hi1, lo2, hi2, theta);
  } else {
    out.value = shifted_difference(p1, y1) * (-shifted_difference(p2, d)) / s;
  }
  return out;
}

Complex kubo_integral_direct(int nodes, bool unit_integrand) {
  if (nodes < 2) throw std::invalid_argument("kubo_integral_direct: need at least 2 nodes");
  const auto rule = quad::gauss_hermite(nodes);
  const auto& t = rule.nodes;
  const auto& w = rule.weights;
  KahanSum acc;
  for (int a = 0; a < nodes; ++a) {
    for (int b = 0; b < nodes; ++b) {
      const double x1 = t[a], x2 = t[b], wx = w[a] * w[b];
      for (int c = 0; c < nodes; ++c) {
        Complex inner{};
        for (int d = 0; d < nodes; ++d) {
          const double y1 = t[c], y2 = t[d];
          // x conj(y)
          const Complex xy(x1 * y1 + x2 * y2, x2 * y1 - x1 * y2);
          const double h = unit_integrand ? 1.0 : y2 * x1 - y1 * x2;
          inner += w[d] * std::exp(xy) * h;
        }
        acc.add(wx * w[c] * inner);
      }
    }
  }
  return acc.sum / (kPi * kPi * kPi);
}

// ------------------------------------------------------------ conjugated symbol expansion

ExpansionResult conjugated_symbol_expansion(int j, const std::vector<RealPolynomial>& fs,
                                            int kmax) {
  if (j < 1 || j > 3) throw std::invalid_argument("conjugated_symbol_expansion: need 1 <= j <= 3");
  if (fs.empty() || kmax < 1) throw std::invalid_argument("conjugated_symbol_expansion: no data");
  int deg = 0;
  for (const auto& f : fs) deg = std::max(deg, f.degree());
  const int budget = std::max(fock::kDefaultBudget, 2 * (kmax + j) + deg + 4);

  std::vector<fock::PolyState> e;
  for (int k = 0; k < kmax; ++k) e.push_back(fock::level_basis_vector(0, k, budget));

  const int rows_per_f = kmax * kmax;
  const int R = static_cast<int>(fs.size()) * rows_per_f;
  Eigen::VectorXcd lhs(R);
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(R, j);
  for (size_t fi = 0; fi < fs.size(); ++fi) {
    const auto F = toeplitz::polynomial_state(fs[fi], budget);
    std::vector<fock::PolyState> G;
    RealPolynomial g = fs[fi];
    for (int nu = 1; nu <= j; ++nu) {
      g = ddbar(g);
      G.push_back(toeplitz::polynomial_state(g, budget));
    }
    for (int k = 0; k < kmax; ++k) {
      const auto Vk = fock::apply_Vj(e[k], j);
      const auto lifted = fock::apply_Vj_adjoint(fock::apply_Pj(fock::multiply(F, Vk), j), j);
      const auto plain = fock::multiply(F, e[k]);
      for (int l = 0; l < kmax; ++l) {
        const int r = static_cast<int>(fi) * rows_per_f + k * kmax + l;
        lhs(r) = fock::inner_product(lifted, e[l]) - fock::inner_product(plain, e[l]);
        for (int nu = 0; nu < j; ++nu) {
          cols(r, nu) = fock::inner_product(fock::multiply(G[nu], e[k]), e[l]);
        }
      }
    }
  }

  ExpansionResult out;
  out.level = j;
  out.coeffs.assign(j, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> ident;
  for (int nu = 0; nu < j; ++nu) {
    if (cols.col(nu).cwiseAbs().maxCoeff() > 1e-12) ident.push_back(nu);
  }
  // Real coefficients: stack real and imaginary parts.
  Eigen::MatrixXd A(2 * R, ident.size());
  Eigen::VectorXd b(2 * R);
  b << lhs.real(), lhs.imag();
  for (size_t c = 0; c < ident.size(); ++c) {
    A.col(c) << cols.col(ident[c]).real(), cols.col(ident[c]).imag();
  }
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(ident.size());
  if (!ident.empty()) sol = A.colPivHouseholderQr().solve(b);
  for (size_t c = 0; c < ident.size(); ++c) out.coeffs[ident[c]] = sol(c);
  out.residual = ident.empty() ? b.cwiseAbs().maxCoeff() : (A * sol - b).cwiseAbs().maxCoeff();
  return out;
}

// ------------------------------------------------------------ stacked cross terms

CrossTerms cross_term_traces(int ell, const PairSpec& pair, int N, int B, toeplitz::Route route) {
  if (ell < 0 || ell > 2) throw std::invalid_argument("cross_term_traces: need 0 <= ell <= 2");
  if (N < 1 || 2 * B < N) throw std::invalid_argument("cross_term_traces: need N >= 1, B >= N/2");
  const auto trunc = toeplitz::TruncationSpec::stacked(ell, N, B);
  const auto F = toeplitz::assemble(pair.f, trunc, route);
  const auto G = toeplitz::assemble(pair.g, trunc, route);
  const int L = ell + 1;
  std::vector<std::vector<Matrix>> Fb(L), Gb(L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      Fb[i].push_back(F.level_block(i, j));
      Gb[i].push_back(G.level_block(i, j));
    }
  }
  // Exposed trace of X Y - Y' X' on one level.
  auto tr = [&](const Matrix& X, const Matrix& Y, const Matrix& U, const Matrix& V) {
    KahanSum acc;
    for (int k = 0; k < N; ++k) acc.add(row_col(X, Y, k) - row_col(U, V, k));
    return acc.sum;
  };

  CrossTerms out;
  // Off-diagonal level blocks of the commutator have no diagonal, so Z0 vanishes identically.
  out.Z0 = 0.0;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      if (i == j) continue;
      out.Z1 += tr(Fb[i][j], Gb[j][i], Gb[i][j], Fb[j][i]);
      out.Z2 += tr(Fb[j][i], Gb[i][j], Gb[j][i], Fb[i][j]);
      out.Z3 += tr(Gb[i][j], Fb[j][i], Fb[i][j], Gb[j][i]);
    }
  }
  out.total = out.Z0 + out.Z1 + out.Z2 + out.Z3;
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      const Complex a = tr(Gb[i][j], Fb[j][i], Fb[i][j], Gb[j][i]);
      const Complex b = tr(Gb[j][i], Fb[i][j], Fb[j][i], Gb[i][j]);
      out.lidskii.push_back({i, j, a + b});
    }
  }
  const auto exposed = exposed_indices(L, N + B, N);
  Complex stacked = buffered_trace(F.entries, G.entries, exposed, nullptr);
  Complex levels{};
  for (int i = 0; i < L; ++i) {
    levels += buffered_trace(Fb[i][i], Gb[i][i], exposed_indices(1, N + B, N), nullptr);
  }
  out.stacked_minus_levels = stacked - levels;
  return out;
}

}  // namespace focklab::trace
