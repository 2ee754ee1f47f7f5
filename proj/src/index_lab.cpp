#include "focklab/index_lab.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "focklab/quadrature.hpp"

namespace focklab::index {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const Complex kI(0.0, 1.0);

Eigen::VectorXd singular_values(const Matrix& S) {
  Eigen::BDCSVD<Matrix> svd(S);
  return svd.singularValues();
}

int count_below(const Eigen::VectorXd& sv, double tau) {
  return static_cast<int>((sv.array() < tau).count());
}

// Smallest singular value after dropping the `skip` smallest.
double after_skip(const Eigen::VectorXd& sv, int skip) {
  const int n = static_cast<int>(sv.size());
  return skip < n ? sv(n - 1 - skip) : kNaN;
}

// Rectangular sections (rows K per level, columns N per level) of T - lambda and
// T* - conj(lambda).
std::pair<Matrix, Matrix> rectangular_sections(const toeplitz::OperatorMatrix& T, Complex lambda) {
  const int K = T.block(), N = T.N, L = T.num_levels();
  Matrix ker = T.section(K, N);
  Matrix coker = T.section(N, K).adjoint();
  for (int a = 0; a < L; ++a) {
    for (int k = 0; k < N; ++k) {
      ker(a * K + k, a * N + k) -= lambda;
      coker(a * K + k, a * N + k) -= std::conj(lambda);
    }
  }
  return {ker, coker};
}

Matrix square_section(const toeplitz::OperatorMatrix& T, Complex lambda) {
  Matrix S = T.exposed();
  S.diagonal().array() -= lambda;
  return S;
}

// Smallest singular value of the cokernel section of a weighted shift minus lambda,
// estimated from its explicit null vector v_{k+1} = conj(lambda) v_k / w_k.
double shift_coker_sigma(const std::vector<double>& w, Complex lambda, int N) {
  const double mod = std::abs(lambda);
  if (mod == 0.0) return 0.0;
  // log|v_k|, v_0 = 1; the residual after truncation at N is |lambda| |v_{N-1}|.
  double logv = 0.0, log_norm2 = 0.0;  // log of sum |v_k|^2, running log-sum-exp
  for (int k = 0; k < N; ++k) {
    if (k > 0) logv += std::log(mod) - std::log(w[k - 1]);
    const double t = 2.0 * logv;
    log_norm2 = k == 0 ? t : std::max(log_norm2, t) + std::log1p(std::exp(-std::abs(log_norm2 - t)));
  }
  return std::exp(std::log(mod) + logv - 0.5 * log_norm2);
}

}  // namespace

// ------------------------------------------------------------ operator family

OperatorFamily OperatorFamily::from_pair(const trace::PairSpec& pair) {
  // A pair of angular symbols whose combination f + i g is c e^{i arg} is c T_Phase.
  const auto* fa = std::get_if<symbols::AngularFourier>(&pair.f);
  const auto* ga = std::get_if<symbols::AngularFourier>(&pair.g);
  if (fa && ga && pair.arena.kind == trace::Arena::Kind::Level) {
    std::map<int, Complex> c;
    for (const auto& [n, v] : fa->coeffs) c[n] += v;
    for (const auto& [n, v] : ga->coeffs) c[n] += kI * v;
    bool only_one = true;
    for (const auto& [n, v] : c) {
      if (n != 1 && std::abs(v) > 1e-15) only_one = false;
    }
    if (only_one && std::abs(c[1] - 1.0) < 1e-15) {
      OperatorFamily op = phase(pair.arena.j);
      op.description_ = "T_f + i T_g = T_phase, f = " + symbols::describe(pair.f) +
                        ", g = " + symbols::describe(pair.g) + ", " + pair.arena.describe();
      return op;
    }
  }
  OperatorFamily op;
  op.kind_ = Kind::Matrix;
  op.arena_ = pair.arena;
  op.terms_ = {{1.0, pair.f}, {kI, pair.g}};
  op.description_ = "T_f + i T_g, f = " + symbols::describe(pair.f) +
                    ", g = " + symbols::describe(pair.g) + ", " + pair.arena.describe();
  return op;
}

OperatorFamily OperatorFamily::from_symbol(const symbols::SymbolSpec& sym,
                                           const trace::Arena& arena) {
  if (std::holds_alternative<symbols::Phase>(sym) && arena.kind == trace::Arena::Kind::Level) {
    return phase(arena.j);
  }
  OperatorFamily op;
  op.kind_ = Kind::Matrix;
  op.arena_ = arena;
  op.terms_ = {{1.0, sym}};
  op.description_ = "T_f, f = " + symbols::describe(sym) + ", " + arena.describe();
  return op;
}

OperatorFamily OperatorFamily::phase(int level) {
  if (level < 0) throw std::invalid_argument("phase: negative level");
  OperatorFamily op;
  op.kind_ = Kind::WeightedShift;
  op.arena_ = trace::Arena::level(level);
  op.terms_ = {{1.0, symbols::Phase{}}};
  op.description_ = "T_phase, level " + std::to_string(level);
  return op;
}

toeplitz::OperatorMatrix OperatorFamily::matrix(int N, int B) const {
  // Assembly dominates index work; copies of a family share the cache.
  auto& slot = cache_->matrices;
  const auto key = std::make_pair(N, B);
  if (auto it = slot.find(key); it != slot.end()) return it->second;
  const auto trunc = arena_.truncation(N, B);
  toeplitz::OperatorMatrix out;
  for (const auto& [c, sym] : terms_) {
    auto m = toeplitz::assemble(sym, trunc);
    if (out.entries.size() == 0) {
      out = m;
      out.entries *= c;
    } else {
      out.entries += c * m.entries;
    }
  }
  out.provenance = description_;
  if (slot.size() > 4) slot.clear();
  slot.emplace(key, out);
  return out;
}

std::vector<double> OperatorFamily::shift_weights(int n) const {
  if (kind_ != Kind::WeightedShift) throw std::logic_error("shift_weights: not a weighted shift");
  std::vector<double> w(n);
  if (arena_.j == 0) {
    for (int k = 0; k < n; ++k) w[k] = toeplitz::phase_weight(k);
    return w;
  }
  const auto m = toeplitz::toeplitz_level(symbols::Phase{}, arena_.j, {n + 1, 0, {arena_.j}});
  for (int k = 0; k < n; ++k) w[k] = m.entries(k + 1, k).real();
  return w;
}

// ------------------------------------------------------------ schedules and reports

IndexSchedule IndexSchedule::switch_default() { return {{320, 384, 448}, 64, {1e-2, 1e-3}}; }

IndexSchedule IndexSchedule::phase_default() { return {{256, 512, 1024}, 64, {1e-6, 1e-7}}; }

void IndexSchedule::validate() const {
  if (N.size() < 3) throw std::invalid_argument("index schedule: need at least 3 N values");
  for (size_t i = 0; i < N.size(); ++i) {
    if (N[i] < 1 || (i > 0 && N[i] <= N[i - 1])) {
      throw std::invalid_argument("index schedule: N must be positive and strictly increasing");
    }
  }
  if (B < 1) throw std::invalid_argument("index schedule: buffer must be >= 1");
  if (taus.size() < 2) throw std::invalid_argument("index schedule: need two thresholds");
  for (double t : taus) {
    if (!(t > 0)) throw std::invalid_argument("index schedule: thresholds must be positive");
  }
}

nlohmann::json IndexReport::to_json() const {
  nlohmann::json j;
  j["lambda_re"] = lambda.real();
  j["lambda_im"] = lambda.imag();
  j["label"] = label;
  j["index"] = index ? nlohmann::json(*index) : nlohmann::json(nullptr);
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : evidence) {
    ev.push_back({{"N", e.N},
                  {"tau", e.tau},
                  {"dim_ker", e.dim_ker},
                  {"dim_coker", e.dim_coker},
                  {"sigma_ker", e.sigma_ker},
                  {"sigma_coker", e.sigma_coker}});
  }
  j["evidence"] = ev;
  return j;
}

// ------------------------------------------------------------ index

IndexReport fredholm_index(const OperatorFamily& op, Complex lambda, const IndexSchedule& schedule) {
  schedule.validate();
  IndexReport rep;
  rep.lambda = lambda;
  const int Nmax = schedule.N.back();
  if (op.kind() == OperatorFamily::Kind::WeightedShift) {
    // Lower bidiagonal with positive subdiagonal: T - lambda is injective.
    const auto w = op.shift_weights(Nmax);
    for (int N : schedule.N) {
      const double sc = shift_coker_sigma(w, lambda, N);
      for (double tau : schedule.taus) {
        rep.evidence.push_back({N, tau, 0, sc < tau ? 1 : 0, kNaN, sc});
      }
    }
  } else {
    const auto full = op.matrix(Nmax, schedule.B);
    for (int N : schedule.N) {
      const auto T = N == Nmax ? full : full.truncated(N, schedule.B);
      const auto [ker, coker] = rectangular_sections(T, lambda);
      const auto sk = singular_values(ker), sc = singular_values(coker);
      for (double tau : schedule.taus) {
        rep.evidence.push_back({N, tau, count_below(sk, tau), count_below(sc, tau),
                                sk(sk.size() - 1), sc(sc.size() - 1)});
      }
    }
  }
  const int first = rep.evidence.front().dim_ker - rep.evidence.front().dim_coker;
  bool same = true;
  for (const auto& e : rep.evidence) same = same && (e.dim_ker - e.dim_coker == first);
  if (same) {
    rep.index = first;
    rep.label = "stable";
  } else {
    rep.label = "unstable";
  }
  return rep;
}

// ------------------------------------------------------------ regions

RegionSpec RegionSpec::square(int grid, double band) {
  RegionSpec r;
  r.grid = grid;
  r.band = band;
  return r;
}

RegionSpec RegionSpec::disc(int grid, double band) {
  RegionSpec r;
  r.kind = Kind::Disc;
  r.x0 = r.y0 = -1.0;
  r.x1 = r.y1 = 1.0;
  r.grid = grid;
  r.band = band;
  return r;
}

RegionSpec RegionSpec::rectangle(double x0, double x1, double y0, double y1, int grid, double band) {
  RegionSpec r{Kind::Rectangle, x0, x1, y0, y1, grid, band, 0.25};
  return r;
}

void RegionSpec::validate() const {
  if (grid < 1) throw std::invalid_argument("region: grid resolution must be >= 1");
  if (band < 0) throw std::invalid_argument("region: band must be >= 0");
  if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("region: empty rectangle");
}

bool RegionSpec::inside(Complex z) const {
  if (kind == Kind::Disc) return std::abs(z) < 1.0;
  return z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1;
}

double RegionSpec::boundary_distance(Complex z) const {
  if (kind == Kind::Disc) return std::abs(std::abs(z) - 1.0);
  const double x = z.real(), y = z.imag();
  if (inside(z)) return std::min({x - x0, x1 - x, y - y0, y1 - y});
  const double dx = std::max({x0 - x, 0.0, x - x1});
  const double dy = std::max({y0 - y, 0.0, y - y1});
  return std::hypot(dx, dy);
}

double RegionSpec::area() const { return kind == Kind::Disc ? kPi : (x1 - x0) * (y1 - y0); }

std::vector<Complex> RegionSpec::grid_points() const {
  validate();
  std::vector<Complex> pts;
  const double ax = x0 - margin, bx = x1 + margin, ay = y0 - margin, by = y1 + margin;
  for (int iy = 0; iy < grid; ++iy) {
    for (int ix = 0; ix < grid; ++ix) {
      const double x = grid == 1 ? 0.5 * (ax + bx) : ax + (bx - ax) * ix / (grid - 1);
      const double y = grid == 1 ? 0.5 * (ay + by) : ay + (by - ay) * iy / (grid - 1);
      pts.emplace_back(x, y);
    }
  }
  return pts;
}

std::string RegionSpec::describe() const {
  std::ostringstream os;
  if (kind == Kind::Disc) {
    os << "disc";
  } else {
    os << (kind == Kind::Square ? "square" : "rectangle") << "[" << x0 << "," << x1 << "]x[" << y0
       << "," << y1 << "]";
  }
  os << " grid=" << grid << " band=" << band << " margin=" << margin;
  return os.str();
}

// ------------------------------------------------------------ essential spectrum

ProbePoint essential_spectrum_point(const OperatorFamily& op, Complex lambda,
                                    const IndexSchedule& schedule) {
  schedule.validate();
  ProbePoint pt;
  pt.lambda = lambda;
  const double tau = *std::max_element(schedule.taus.begin(), schedule.taus.end());
  const auto full = op.matrix(schedule.N.back(), schedule.B);
  for (int N : schedule.N) {
    const auto T = N == schedule.N.back() ? full : full.truncated(N, schedule.B);
    const auto [ker, coker] = rectangular_sections(T, lambda);
    const auto sk = singular_values(ker), sc = singular_values(coker);
    const auto sq = singular_values(square_section(T, lambda));
    pt.N.push_back(N);
    pt.sigma_square.push_back(sq(sq.size() - 1));
    pt.gap.push_back(std::min(after_skip(sk, count_below(sk, tau)),
                              after_skip(sc, count_below(sc, tau))));
  }
  // Least-squares fit gap = g_inf + c / sqrt(N).
  const int n = static_cast<int>(pt.N.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = 1.0 / std::sqrt(static_cast<double>(pt.N[i]));
    sx += x;
    sy += pt.gap[i];
    sxx += x * x;
    sxy += x * pt.gap[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  pt.gap_limit = (sy - slope * sx) / n;
  pt.flagged = pt.gap_limit < 0.25 * pt.gap.back();
  return pt;
}

std::vector<ProbePoint> essential_spectrum_probe(const OperatorFamily& op, const RegionSpec& region,
                                                 const IndexSchedule& schedule) {
  std::vector<ProbePoint> out;
  for (Complex lam : region.grid_points()) {
    ProbePoint pt = essential_spectrum_point(op, lam, schedule);
    pt.in_band = region.boundary_distance(lam) < region.band;
    out.push_back(std::move(pt));
  }
  return out;
}

// ------------------------------------------------------------ weighted shift

nlohmann::json ShiftReport::to_json() const {
  nlohmann::json j;
  j["level"] = level;
  j["kmax"] = static_cast<int>(weights.size()) - 1;
  j["increasing"] = increasing;
  j["hyponormal"] = hyponormal;
  j["ratio_error"] = ratio_error;
  j["telescope_error"] = telescope_error;
  j["limit_error"] = limit_error;
  j["envelope_constant"] = envelope_constant;
  j["oracle_error"] = oracle_error;
  return j;
}

namespace {
// 2 Integral R_k R_{k+1} e^{-r^2} r dr with R_k the radial part of e_k^{(j)}.
double radial_weight_oracle(int j, int k) {
  auto radial = [j](int kk, double r) {
    double s = 0.0;
    for (int q = 0; q <= std::min(j, kk); ++q) {
      const double lc = std::lgamma(q + 1.0) + std::lgamma(j + 1.0) - std::lgamma(q + 1.0) -
                        std::lgamma(j - q + 1.0) + std::lgamma(kk + 1.0) - std::lgamma(q + 1.0) -
                        std::lgamma(kk - q + 1.0) - 0.5 * (std::lgamma(j + 1.0) + std::lgamma(kk + 1.0));
      s += (q % 2 ? -1.0 : 1.0) * std::exp(lc) * std::pow(r, kk + j - 2 * q);
    }
    return s;
  };
  const auto rule = quad::composite_legendre(0.0, 14.0, {}, 0.25, 20);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i];
    s += rule.weights[i] * 2.0 * radial(k, r) * radial(k + 1, r) * std::exp(-r * r) * r;
  }
  return s;
}
}  // namespace

ShiftReport weighted_shift_analysis(int kmax, int level) {
  if (kmax < 1 || kmax > 1000000) throw std::invalid_argument("weighted_shift_analysis: need 1 <= kmax <= 1e6");
  if (level < 0 || level > 4) throw std::invalid_argument("weighted_shift_analysis: need 0 <= level <= 4");
  ShiftReport rep;
  rep.level = level;
  rep.weights = OperatorFamily::phase(level).shift_weights(kmax + 1);
  const auto& a = rep.weights;
  double sum = 0.0, carry = 0.0, prev_sq = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    // Diagonal of [T*, T]: a_k^2 - a_{k-1}^2.
    const double d = a[k] * a[k] - prev_sq;
    prev_sq = a[k] * a[k];
    if (d <= 0) rep.hyponormal = false;
    const double y = d - carry, t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    rep.partial_trace.push_back(sum);
    rep.telescope_error = std::max(rep.telescope_error, std::abs(sum - a[k] * a[k]));
    if (k > 0 && !(a[k] > a[k - 1])) rep.increasing = false;
    if (k >= 8) rep.envelope_constant = std::max(rep.envelope_constant, k * std::abs(a[k] - 1.0));
    if (level == 0 && k < kmax) {
      const double r = (k + 1.5) / std::sqrt((k + 1.0) * (k + 2.0));
      rep.ratio_error = std::max(rep.ratio_error, std::abs(a[k + 1] / a[k] - r));
    }
  }
  if (level != 0) rep.ratio_error = kNaN;
  rep.limit_error = std::abs(a[kmax] - 1.0);
  for (int k = 0; k <= std::min(kmax, 20); ++k) {
    rep.oracle_error = std::max(rep.oracle_error, std::abs(a[k] - radial_weight_oracle(level, k)));
  }
  return rep;
}

// ------------------------------------------------------------ principal function

nlohmann::json PrincipalFunctionMap::to_json() const {
  nlohmann::json j;
  j["region"] = region.describe();
  j["mismatches"] = mismatches;
  j["unstable"] = unstable;
  j["excluded"] = excluded;
  j["matches"] = matches;
  j["integral_side_re"] = integral_side.real();
  j["integral_side_im"] = integral_side.imag();
  j["trace_side_re"] = trace_side.real();
  j["trace_side_im"] = trace_side.imag();
  j["cross_check_gap"] = cross_check_gap;
  j["cross_check_closed"] = cross_check_closed;
  j["trace"] = trace.to_json();
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& c : cells) cells_json.push_back(c.to_json());
  j["cells"] = cells_json;
  return j;
}

PrincipalFunctionMap principal_function_reconstruct(const trace::PairSpec& pair,
                                                    const RegionSpec& region,
                                                    const IndexSchedule& schedule,
                                                    const trace::Schedule& trace_schedule) {
  region.validate();
  schedule.validate();
  const OperatorFamily op = OperatorFamily::from_pair(pair);
  PrincipalFunctionMap map;
  map.region = region;
  std::optional<int> interior;
  bool unanimous = true;
  int stable = 0;
  for (Complex lam : region.grid_points()) {
    if (region.boundary_distance(lam) < region.band) {
      IndexReport r;
      r.lambda = lam;
      r.label = "excluded";
      map.cells.push_back(r);
      ++map.excluded;
      continue;
    }
    IndexReport r = fredholm_index(op, lam, schedule);
    if (!r.stable()) {
      ++map.unstable;
    } else {
      ++stable;
      const bool in = region.inside(lam);
      if (*r.index != (in ? -1 : 0)) ++map.mismatches;
      if (in) {
        if (interior && *interior != *r.index) unanimous = false;
        interior = r.index;
      } else if (*r.index != 0) {
        unanimous = false;
      }
    }
    map.cells.push_back(std::move(r));
  }
  map.matches = stable > 0 && map.mismatches == 0;

  // Integral of g: unanimous maps give g_interior * area exactly; otherwise a cell sum.
  double integral_g = 0.0;
  if (unanimous && interior) {
    integral_g = *interior * region.area();
  } else {
    const double bx = region.x1 - region.x0 + 2 * region.margin;
    const double by = region.y1 - region.y0 + 2 * region.margin;
    const double cell = region.grid > 1 ? bx * by / ((region.grid - 1.0) * (region.grid - 1.0)) : 0.0;
    for (const auto& c : map.cells) {
      if (c.stable()) integral_g += *c.index * cell;
    }
  }
  map.trace = trace::commutator_trace(pair, trace_schedule);
  // 2 pi * (-1/(2 pi i)) = i
  map.integral_side = kI * integral_g;
  map.trace_side = 2.0 * kPi * map.trace.value;
  map.cross_check_gap = std::abs(map.integral_side - map.trace_side);
  map.cross_check_closed = map.trace.stabilized && map.cross_check_gap <= trace_schedule.tolerance;
  return map;
}

// ------------------------------------------------------------ compactness and trace class

WedgeRelation parse_wedge_relation(const std::string& name) {
  if (name == "A") return WedgeRelation::A;
  if (name == "B") return WedgeRelation::B;
  if (name == "C") return WedgeRelation::C;
  if (name == "D") return WedgeRelation::D;
  throw std::invalid_argument("unknown wedge relation: " + name);
}

symbols::Wedge relation_wedge(WedgeRelation which, double theta) {
  switch (which) {
    case WedgeRelation::A: return {theta / 2, (kPi + theta) / 2};
    case WedgeRelation::B: return {(kPi + theta) / 2, kPi + theta / 2};
    case WedgeRelation::C: return {kPi + theta / 2, (3 * kPi + theta) / 2};
    case WedgeRelation::D: return {(3 * kPi + theta) / 2, 2 * kPi + theta / 2};
  }
  throw std::logic_error("relation_wedge: bad relation");
}

DecayReport wedge_compactness_probe(int j, double theta, WedgeRelation which,
                                    const std::vector<int>& Ns, int B) {
  if (Ns.empty() || B < 0) throw std::invalid_argument("wedge probe: empty schedule");
  const int Nmax = *std::max_element(Ns.begin(), Ns.end());
  const toeplitz::TruncationSpec trunc{Nmax, B, {j}};
  // A and C pair with f2 (rotated switch), B and D with f1.
  const bool uses_f2 = which == WedgeRelation::A || which == WedgeRelation::C;
  const symbols::HalfPlaneSwitch f{symbols::SwitchProfile::step(), uses_f2 ? theta : 0.0};
  const auto Tf = toeplitz::assemble(f, trunc);
  const auto Tchi = toeplitz::assemble(relation_wedge(which, theta), trunc);
  const bool minus_chi = which == WedgeRelation::A || which == WedgeRelation::D;
  DecayReport rep;
  for (int N : Ns) {
    const Matrix F = Tf.truncated(N, B).entries, X = Tchi.truncated(N, B).entries;
    Matrix prod = (F * X).topLeftCorner(N, N);
    if (minus_chi) prod -= X.topLeftCorner(N, N);
    const auto sv = singular_values(prod);
    DecayStep step{N, {}};
    for (int i = (N + 1) / 2; i < N; ++i) step.trailing.push_back(sv(i));
    rep.steps.push_back(std::move(step));
  }
  // Values already at rounding level (1e-12) count as decayed.
  rep.decaying = rep.steps.size() > 1;
  for (size_t i = 1; i < rep.steps.size(); ++i) {
    const auto& prev = rep.steps[i - 1].trailing;
    const auto& cur = rep.steps[i].trailing;
    if (prev.empty() || cur.empty()) {
      rep.decaying = false;
    } else if (!(cur.front() < prev.front()) && cur.front() > 1e-12) {
      rep.decaying = false;
    }
  }
  return rep;
}

double wedge_partition_defect(int j, double theta, int K) {
  const toeplitz::TruncationSpec trunc{K, 0, {j}};
  Matrix sum = Matrix::Zero(K, K);
  for (auto w : {WedgeRelation::A, WedgeRelation::B, WedgeRelation::C, WedgeRelation::D}) {
    sum += toeplitz::assemble(relation_wedge(w, theta), trunc).entries;
  }
  return (sum - Matrix::Identity(K, K)).cwiseAbs().maxCoeff();
}

TraceClassExpression parse_trace_class_expression(const std::string& name) {
  if (name == "switch-commutator") return TraceClassExpression::SwitchCommutator;
  if (name == "phase-commutator") return TraceClassExpression::PhaseCommutator;
  if (name == "compressed-product") return TraceClassExpression::CompressedProduct;
  throw std::invalid_argument("unknown trace-class expression: " + name);
}

nlohmann::json TraceClassReport::to_json() const {
  nlohmann::json j;
  j["expression"] = expression;
  j["arena"] = arena;
  j["N"] = N;
  j["nuclear_partial_sums"] = nuclear;
  j["verdict"] = nullptr;
  return j;
}

TraceClassReport trace_class_probe(TraceClassExpression expr, const trace::Arena& arena,
                                   const std::vector<int>& Ns, double buffer_ratio) {
  if (Ns.empty()) throw std::invalid_argument("trace_class_probe: empty schedule");
  const int Nmax = *std::max_element(Ns.begin(), Ns.end());
  const int Bmax = static_cast<int>(std::lround(buffer_ratio * Nmax));
  const auto trunc = arena.truncation(Nmax, Bmax);
  TraceClassReport rep;
  rep.arena = arena.describe();
  symbols::SymbolSpec f, g;
  std::optional<symbols::SymbolSpec> fg;
  const auto phi1 = symbols::AngularFourier::phase_real();
  const auto phi2 = symbols::AngularFourier::phase_imag();
  switch (expr) {
    case TraceClassExpression::SwitchCommutator:
      rep.expression = "[T_f1, T_f2], step switches, theta = pi/2";
      f = symbols::HalfPlaneSwitch{symbols::SwitchProfile::step(), 0.0};
      g = symbols::HalfPlaneSwitch{symbols::SwitchProfile::step(), kPi / 2};
      break;
    case TraceClassExpression::PhaseCommutator:
      rep.expression = "[T_phi1, T_phi2]";
      f = phi1;
      g = phi2;
      break;
    case TraceClassExpression::CompressedProduct:
      rep.expression = "T_phi1 T_phi2 - T_{phi1 phi2}";
      f = phi1;
      g = phi2;
      fg = phi1 * phi2;
      break;
  }
  const auto F = toeplitz::assemble(f, trunc), G = toeplitz::assemble(g, trunc);
  std::optional<toeplitz::OperatorMatrix> FG;
  if (fg) FG = toeplitz::assemble(*fg, trunc);
  for (int N : Ns) {
    const int B = static_cast<int>(std::lround(buffer_ratio * N));
    toeplitz::OperatorMatrix Fs = F.truncated(N, B), Gs = G.truncated(N, B);
    toeplitz::OperatorMatrix X = Fs;
    if (fg) {
      X.entries = Fs.entries * Gs.entries - FG->truncated(N, B).entries;
    } else {
      X.entries = Fs.entries * Gs.entries - Gs.entries * Fs.entries;
    }
    rep.N.push_back(N);
    rep.nuclear.push_back(singular_values(X.exposed()).sum());
  }
  return rep;
}

}  // namespace focklab::index
