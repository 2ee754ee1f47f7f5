#include "focklab/symbols.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "focklab/multiprecision.hpp"
#include "focklab/quadrature.hpp"

namespace focklab::symbols {

namespace {
constexpr double kPi = std::numbers::pi;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double smooth_erf_core(double u) {  // u in (-1, 1)
  return 0.5 * (1.0 + std::erf(2.0 * std::tan(0.5 * kPi * u)));
}
}  // namespace

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Step: return "step";
    case ProfileKind::LinearRamp: return "linear-ramp";
    case ProfileKind::SmoothErf: return "smooth-erf";
    case ProfileKind::SmoothCubic: return "smooth-cubic";
    case ProfileKind::CustomSampled: return "custom-sampled";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(const std::string& name) {
  for (auto k : {ProfileKind::Step, ProfileKind::LinearRamp, ProfileKind::SmoothErf,
                 ProfileKind::SmoothCubic, ProfileKind::CustomSampled}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown profile kind '" + name + "'");
}

SwitchProfile SwitchProfile::step(double center) {
  return {ProfileKind::Step, 0.0, center, {}};
}
SwitchProfile SwitchProfile::linear_ramp(double a, double center) {
  return {ProfileKind::LinearRamp, a, center, {}};
}
SwitchProfile SwitchProfile::smooth_erf(double a, double center) {
  return {ProfileKind::SmoothErf, a, center, {}};
}
SwitchProfile SwitchProfile::smooth_cubic(double a, double center) {
  return {ProfileKind::SmoothCubic, a, center, {}};
}
SwitchProfile SwitchProfile::custom(double a, std::vector<double> samples, double center) {
  if (samples.size() < 2) throw std::invalid_argument("custom profile needs >= 2 samples");
  for (double& v : samples) v = clamp01(v);
  return {ProfileKind::CustomSampled, a, center, std::move(samples)};
}

SwitchProfile SwitchProfile::make(ProfileKind kind, double a, double center) {
  switch (kind) {
    case ProfileKind::Step: return step(center);
    case ProfileKind::LinearRamp: return linear_ramp(a, center);
    case ProfileKind::SmoothErf: return smooth_erf(a, center);
    case ProfileKind::SmoothCubic: return smooth_cubic(a, center);
    case ProfileKind::CustomSampled:
      throw std::invalid_argument("custom-sampled profiles need explicit samples");
  }
  throw std::invalid_argument("bad profile kind");
}

double SwitchProfile::operator()(double s) const {
  const double x = s - center;
  if (kind == ProfileKind::Step) return x > 0 ? 1.0 : (x < 0 ? 0.0 : 0.5);
  if (x <= -a) return 0.0;
  if (x >= a) return 1.0;
  const double u = (x + a) / (2.0 * a);
  switch (kind) {
    case ProfileKind::LinearRamp: return u;
    case ProfileKind::SmoothCubic: return u * u * (3.0 - 2.0 * u);
    case ProfileKind::SmoothErf: return smooth_erf_core(x / a);
    case ProfileKind::CustomSampled: {
      const double pos = u * static_cast<double>(samples.size() - 1);
      const size_t i = std::min(samples.size() - 2, static_cast<size_t>(pos));
      const double t = pos - static_cast<double>(i);
      return clamp01(samples[i] + t * (samples[i + 1] - samples[i]));
    }
    default: return 0.0;
  }
}

SwitchProfile SwitchProfile::shifted(double offset) const {
  SwitchProfile p = *this;
  p.center += offset;
  return p;
}

std::vector<double> SwitchProfile::breakpoints() const {
  if (kind == ProfileKind::Step) return {center};
  std::vector<double> b{center - a, center + a};
  if (kind == ProfileKind::CustomSampled) {
    const size_t n = samples.size();
    b.clear();
    for (size_t i = 0; i < n; ++i) b.push_back(center - a + 2.0 * a * i / (n - 1));
  }
  return b;
}

std::vector<SwitchProfile::Piece> SwitchProfile::pieces() const {
  if (kind == ProfileKind::Step) return {};
  if (kind == ProfileKind::SmoothErf) {
    throw std::logic_error("smooth-erf profile has no polynomial pieces");
  }
  const double lo = center - a, hi = center + a;
  // u = alpha + beta s maps the window to [0, 1].
  const double beta = 1.0 / (2.0 * a), alpha = -lo * beta;
  switch (kind) {
    case ProfileKind::LinearRamp: return {{lo, hi, {alpha, beta}}};
    case ProfileKind::SmoothCubic: {
      const double a2 = alpha * alpha, b2 = beta * beta;
      return {{lo,
               hi,
               {3 * a2 - 2 * a2 * alpha, 6 * alpha * beta - 6 * a2 * beta,
                3 * b2 - 6 * alpha * b2, -2 * b2 * beta}}};
    }
    case ProfileKind::CustomSampled: {
      std::vector<Piece> out;
      const size_t n = samples.size();
      const double h = 2.0 * a / static_cast<double>(n - 1);
      for (size_t i = 0; i + 1 < n; ++i) {
        const double s0 = lo + h * i;
        const double slope = (samples[i + 1] - samples[i]) / h;
        out.push_back({s0, s0 + h, {samples[i] - slope * s0, slope}});
      }
      return out;
    }
    default: return {};
  }
}

double SwitchProfile::integral(double lo, double hi) const {
  if (hi < lo) return -integral(hi, lo);
  const double right = (kind == ProfileKind::Step) ? center : center + a;
  double total = std::max(0.0, hi - std::max(lo, right));
  if (kind == ProfileKind::Step) return total;
  const double wlo = std::max(lo, center - a), whi = std::min(hi, center + a);
  if (whi <= wlo) return total;
  if (kind == ProfileKind::SmoothErf) {
    const auto rule = quad::composite_legendre(wlo, whi, {}, 0.05, 20);
    for (size_t i = 0; i < rule.nodes.size(); ++i) total += rule.weights[i] * (*this)(rule.nodes[i]);
    return total;
  }
  for (const auto& p : pieces()) {
    const double u = std::max(wlo, p.lo), v = std::min(whi, p.hi);
    if (v <= u) continue;
    double pu = 1.0, pv = 1.0;
    for (size_t k = 0; k < p.coeffs.size(); ++k) {
      pu *= u;
      pv *= v;
      total += p.coeffs[k] * (pv - pu) / static_cast<double>(k + 1);
    }
  }
  return total;
}

std::string SwitchProfile::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "(a=" << a << ",center=" << center;
  if (kind == ProfileKind::CustomSampled) os << ",samples=" << samples.size();
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------- polynomials

RealPolynomial RealPolynomial::x() { return monomial(1, 0); }
RealPolynomial RealPolynomial::y() { return monomial(0, 1); }
RealPolynomial RealPolynomial::constant(double c) { return monomial(0, 0, c); }
RealPolynomial RealPolynomial::monomial(int i, int j, double c) {
  RealPolynomial p;
  if (c != 0.0) p.coeffs[{i, j}] = c;
  return p;
}

RealPolynomial RealPolynomial::parse(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw std::invalid_argument("empty polynomial");
  RealPolynomial out;
  size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("cannot parse polynomial '" + text + "': " + why);
  };
  while (pos < s.size()) {
    double sign = 1.0;
    if (s[pos] == '+' || s[pos] == '-') {
      if (s[pos] == '-') sign = -1.0;
      ++pos;
    }
    double coef = 1.0;
    int i = 0, j = 0;
    bool any = false;
    while (pos < s.size() && s[pos] != '+' && s[pos] != '-') {
      if (s[pos] == '*') {
        ++pos;
        continue;
      }
      if (s[pos] == 'x' || s[pos] == 'y') {
        const char var = s[pos++];
        int e = 1;
        if (pos < s.size() && s[pos] == '^') {
          ++pos;
          size_t used = 0;
          try {
            e = std::stoi(s.substr(pos), &used);
          } catch (const std::exception&) {
            fail("bad exponent");
          }
          if (e < 0) fail("negative exponent");
          pos += used;
        }
        (var == 'x' ? i : j) += e;
      } else {
        size_t used = 0;
        try {
          coef *= std::stod(s.substr(pos), &used);
        } catch (const std::exception&) {
          fail("unexpected character");
        }
        pos += used;
      }
      any = true;
    }
    if (!any) fail("empty term");
    out = out + monomial(i, j, sign * coef);
  }
  return out;
}

int RealPolynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : coeffs) d = std::max(d, e.first + e.second);
  return d;
}

double RealPolynomial::operator()(double x, double y) const {
  double s = 0.0;
  for (const auto& [e, c] : coeffs) s += c * std::pow(x, e.first) * std::pow(y, e.second);
  return s;
}

RealPolynomial RealPolynomial::dx() const {
  RealPolynomial p;
  for (const auto& [e, c] : coeffs) {
    if (e.first > 0) p = p + monomial(e.first - 1, e.second, c * e.first);
  }
  return p;
}

RealPolynomial RealPolynomial::dy() const {
  RealPolynomial p;
  for (const auto& [e, c] : coeffs) {
    if (e.second > 0) p = p + monomial(e.first, e.second - 1, c * e.second);
  }
  return p;
}

std::string RealPolynomial::describe() const {
  if (coeffs.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : coeffs) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    if (e.first) os << "*x^" << e.first;
    if (e.second) os << "*y^" << e.second;
  }
  return os.str();
}

RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
  RealPolynomial r = a;
  for (const auto& [e, c] : b.coeffs) {
    r.coeffs[e] += c;
    if (r.coeffs[e] == 0.0) r.coeffs.erase(e);
  }
  return r;
}

RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
  RealPolynomial r;
  for (const auto& [ea, ca] : a.coeffs) {
    for (const auto& [eb, cb] : b.coeffs) {
      r = r + RealPolynomial::monomial(ea.first + eb.first, ea.second + eb.second, ca * cb);
    }
  }
  return r;
}

RealPolynomial operator*(double s, const RealPolynomial& a) {
  RealPolynomial r;
  for (const auto& [e, c] : a.coeffs) {
    if (s * c != 0.0) r.coeffs[e] = s * c;
  }
  return r;
}

// ---------------------------------------------------------------- angular symbols

AngularFourier AngularFourier::phase_real() { return {{{1, 0.5}, {-1, 0.5}}}; }

AngularFourier AngularFourier::phase_imag() {
  return {{{1, Complex(0, -0.5)}, {-1, Complex(0, 0.5)}}};
}

AngularFourier AngularFourier::operator*(const AngularFourier& o) const {
  AngularFourier r;
  for (const auto& [n, c] : coeffs) {
    for (const auto& [m, d] : o.coeffs) r.coeffs[n + m] += c * d;
  }
  std::erase_if(r.coeffs, [](const auto& kv) { return std::abs(kv.second) == 0.0; });
  return r;
}

// ---------------------------------------------------------------- symbol specs

Complex evaluate(const SymbolSpec& sym, Complex zeta) {
  struct V {
    Complex zeta;
    Complex operator()(const HalfPlaneSwitch& h) const {
      return h.profile((std::polar(1.0, -h.theta) * zeta).real());
    }
    Complex operator()(const Wedge& w) const {
      if (zeta == Complex{}) return 0.0;
      double phi = std::arg(zeta) - w.s;
      phi = std::fmod(phi, 2 * kPi);
      if (phi < 0) phi += 2 * kPi;
      return (phi > 0 && phi < w.t - w.s) ? 1.0 : 0.0;
    }
    Complex operator()(const Phase&) const {
      const double r = std::abs(zeta);
      return r == 0 ? Complex{} : zeta / r;
    }
    Complex operator()(const AngularFourier& g) const {
      if (zeta == Complex{}) return 0.0;
      Complex s{};
      for (const auto& [n, c] : g.coeffs) s += c * std::polar(1.0, n * std::arg(zeta));
      return s;
    }
    Complex operator()(const RealPolynomial& p) const { return p(zeta.real(), zeta.imag()); }
    Complex operator()(const CompactProfile& c) const {
      Complex s{};
      for (const auto& [w, h] : c.parts) s += w * (*this)(h);
      return s;
    }
  };
  return std::visit(V{zeta}, sym);
}

std::string describe(const SymbolSpec& sym) {
  struct V {
    std::string operator()(const HalfPlaneSwitch& h) const {
      std::ostringstream os;
      os << "half-plane-switch(" << h.profile.describe() << ",theta=" << h.theta << ")";
      return os.str();
    }
    std::string operator()(const Wedge& w) const {
      std::ostringstream os;
      os << "wedge(s=" << w.s << ",t=" << w.t << ")";
      return os.str();
    }
    std::string operator()(const Phase&) const { return "phase"; }
    std::string operator()(const AngularFourier& g) const {
      std::ostringstream os;
      os << "angular(";
      bool first = true;
      for (const auto& [n, c] : g.coeffs) {
        os << (first ? "" : ",") << n << ":" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag()
           << "i";
        first = false;
      }
      os << ")";
      return os.str();
    }
    std::string operator()(const RealPolynomial& p) const {
      return "polynomial(" + p.describe() + ")";
    }
    std::string operator()(const CompactProfile& c) const {
      std::ostringstream os;
      os << "compact(";
      for (size_t i = 0; i < c.parts.size(); ++i) {
        os << (i ? "," : "") << c.parts[i].first << "*" << (*this)(c.parts[i].second);
      }
      os << ")";
      return os.str();
    }
  };
  return std::visit(V{}, sym);
}

bool is_real_valued(const SymbolSpec& sym) {
  if (std::holds_alternative<Phase>(sym)) return false;
  if (const auto* g = std::get_if<AngularFourier>(&sym)) {
    for (const auto& [n, c] : g->coeffs) {
      auto it = g->coeffs.find(-n);
      const Complex partner = it == g->coeffs.end() ? Complex{} : it->second;
      if (std::abs(c - std::conj(partner)) > 1e-15) return false;
    }
  }
  return true;
}

namespace {
void validate_profile(const SwitchProfile& p) {
  if (!std::isfinite(p.a) || !std::isfinite(p.center) || p.a < 0) {
    throw std::invalid_argument("switch profile: window half-width must be finite and >= 0");
  }
  if (p.kind != ProfileKind::Step && p.a <= 0) {
    throw std::invalid_argument("switch profile " + to_string(p.kind) + " needs a > 0");
  }
  if (p.kind == ProfileKind::CustomSampled && p.samples.size() < 2) {
    throw std::invalid_argument("custom profile needs >= 2 samples");
  }
}

void validate_switch(const HalfPlaneSwitch& h, bool strict) {
  validate_profile(h.profile);
  if (!std::isfinite(h.theta)) throw std::invalid_argument("switch angle not finite");
  if (strict && h.theta != 0.0 && (h.theta < kPi / 12 - 1e-12 || h.theta > 11 * kPi / 12 + 1e-12)) {
    throw std::invalid_argument("switch angle outside the validated range [pi/12, 11pi/12]");
  }
}
}  // namespace

void validate(const SymbolSpec& sym, bool strict) {
  struct V {
    bool strict;
    void operator()(const HalfPlaneSwitch& h) const { validate_switch(h, strict); }
    void operator()(const Wedge& w) const {
      if (!(w.s < w.t && w.t < w.s + kPi)) {
        throw std::invalid_argument("wedge requires s < t < s + pi");
      }
    }
    void operator()(const Phase&) const {}
    void operator()(const AngularFourier& g) const {
      if (g.coeffs.empty()) throw std::invalid_argument("empty angular symbol");
    }
    void operator()(const RealPolynomial& p) const {
      for (const auto& [e, c] : p.coeffs) {
        if (!std::isfinite(c)) throw std::invalid_argument("polynomial coefficient not finite");
      }
    }
    void operator()(const CompactProfile& c) const {
      if (c.parts.empty()) throw std::invalid_argument("empty compact profile");
      for (const auto& [w, h] : c.parts) validate_switch(h, strict);
    }
  };
  std::visit(V{strict}, sym);
}

CompactProfile compact_bump(const SwitchProfile& base, double rho, double theta) {
  if (!(rho > 0)) throw std::invalid_argument("compact bump needs rho > 0");
  if (base.a >= 0.5 * rho) throw std::invalid_argument("compact bump needs a < rho/2");
  CompactProfile c;
  c.parts.push_back({1.0, {base.shifted(-0.5 * rho), theta}});
  c.parts.push_back({-1.0, {base.shifted(0.5 * rho), theta}});
  return c;
}

// ---------------------------------------------------------------- moments

namespace {

// Integral of s^n exp(-s^2) over [0, x] (signed).
template <class Real>
Real half_moment(int n, const Real& x) {
  using boost::math::tgamma_lower;
  if (x == 0) return Real(0);
  const Real ap = Real(n + 1) / 2;
  const Real g = tgamma_lower(ap, x * x) / 2;
  if (x > 0 || (n % 2 == 1)) return g;
  return -g;
}

// Integral of s^n exp(-s^2) over [x, infinity).
template <class Real>
Real tail_moment(int n, const Real& x) {
  const Real ap = Real(n + 1) / 2;
  if (x >= 0) return boost::math::tgamma(ap, x * x) / 2;
  return boost::math::tgamma(ap) / 2 - half_moment<Real>(n, x);
}

}  // namespace

template <class Real>
Real gauss_moment_t(int m) {
  if (m < 0) throw std::invalid_argument("negative moment order");
  if (m % 2 == 1) return Real(0);
  return boost::math::tgamma(Real(m + 1) / 2);
}

double gauss_moment(int m) { return gauss_moment_t<double>(m); }

template <class Real>
Real eta_moment(const SwitchProfile& profile, int m) {
  if (m < 0) throw std::invalid_argument("negative moment order");
  if (m > kMaxMomentOrder) {
    throw std::range_error("eta_moment: order " + std::to_string(m) + " exceeds " +
                           std::to_string(kMaxMomentOrder));
  }
  const Real c = profile.center, a = profile.a;
  if (profile.kind == ProfileKind::Step) return tail_moment<Real>(m, c);
  Real total = tail_moment<Real>(m, c + a);
  if (profile.kind == ProfileKind::SmoothErf) {
    using std::tan;
    const Real pi = boost::math::constants::pi<Real>();
    auto f = [&](Real s) -> Real {
      const Real u = (s - c) / a;
      Real v = (1 + boost::math::erf(2 * tan(pi * u / 2))) / 2;
      using std::exp;
      using std::pow;
      return v * pow(s, m) * exp(-s * s);
    };
    boost::math::quadrature::tanh_sinh<Real> integrator;
    total += integrator.integrate(f, c - a, c + a);
    return total;
  }
  for (const auto& piece : profile.pieces()) {
    const Real lo = piece.lo, hi = piece.hi;
    for (size_t p = 0; p < piece.coeffs.size(); ++p) {
      if (piece.coeffs[p] == 0.0) continue;
      const int n = m + static_cast<int>(p);
      total += Real(piece.coeffs[p]) * (half_moment<Real>(n, hi) - half_moment<Real>(n, lo));
    }
  }
  return total;
}

template double eta_moment<double>(const SwitchProfile&, int);
template HighFloat eta_moment<HighFloat>(const SwitchProfile&, int);
template double gauss_moment_t<double>(int);
template HighFloat gauss_moment_t<HighFloat>(int);

// ---------------------------------------------------------------- physical scaling

SymbolSpec scale_physical(const SymbolSpec& sym, const LandauParameters& params) {
  if (!(params.b > 0)) throw std::invalid_argument("magnetic strength b must be > 0");
  const double r = std::sqrt(params.b / 2.0);  // window widths scale by (b/2)^{1/2}
  auto scale_switch = [r](HalfPlaneSwitch h) {
    h.profile.a *= r;
    h.profile.center *= r;
    return h;
  };
  struct V {
    double r;
    decltype(scale_switch) ss;
    SymbolSpec operator()(const HalfPlaneSwitch& h) const { return ss(h); }
    SymbolSpec operator()(const Wedge& w) const { return w; }
    SymbolSpec operator()(const Phase& p) const { return p; }
    SymbolSpec operator()(const AngularFourier& g) const { return g; }
    SymbolSpec operator()(const RealPolynomial& p) const {
      RealPolynomial q;
      for (const auto& [e, c] : p.coeffs) q.coeffs[e] = c * std::pow(r, -(e.first + e.second));
      return q;
    }
    SymbolSpec operator()(const CompactProfile& c) const {
      CompactProfile out;
      for (const auto& [w, h] : c.parts) out.parts.push_back({w, ss(h)});
      return out;
    }
  };
  return std::visit(V{r, scale_switch}, sym);
}

int level_count(const LandauParameters& params) {
  if (!(params.b > 0)) throw std::invalid_argument("magnetic strength b must be > 0");
  const double x = (params.E / params.b - 1.0) / 2.0;
  if (!(x > 0)) throw std::invalid_argument("Fermi energy at or below the lowest Landau level");
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-12 * std::max(1.0, x)) {
    throw std::invalid_argument("Fermi energy sits on a Landau level");
  }
  return static_cast<int>(std::floor(x));
}

// ---------------------------------------------------------------- kernel estimates

double kernel_tail_norm(int j, double rho) {
  if (j < 0 || rho < 0) throw std::invalid_argument("kernel_tail_norm: j, rho must be >= 0");
  return std::sqrt(boost::math::tgamma(static_cast<double>(j + 1), rho * rho));
}

namespace {
double overlap_sum(int j, int k, Complex d, const quad::Rule& r) {
  double s = 0.0;
  for (size_t a = 0; a < r.nodes.size(); ++a) {
    for (size_t b = 0; b < r.nodes.size(); ++b) {
      const Complex u{r.nodes[a], r.nodes[b]};
      s += r.weights[a] * r.weights[b] * std::pow(std::abs(u - d), j) * std::pow(std::abs(u + d), k);
    }
  }
  return s * std::exp(-std::norm(d)) / kPi;
}
}  // namespace

OverlapResult kernel_overlap(int j, int k, Complex z, Complex w) {
  if (j < 0 || k < 0) throw std::invalid_argument("kernel_overlap: negative level");
  if (std::abs(z) > 50 || std::abs(w) > 50) {
    throw std::invalid_argument("kernel_overlap: points outside the quadrature box |z| <= 50");
  }
  const Complex d = 0.5 * (z - w);
  const double coarse = overlap_sum(j, k, d, quad::gauss_hermite(64));
  const double fine = overlap_sum(j, k, d, quad::gauss_hermite(96));
  return {fine, std::abs(fine - coarse)};
}

}  // namespace focklab::symbols
