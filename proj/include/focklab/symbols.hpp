#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace focklab::symbols {

using Complex = std::complex<double>;

inline constexpr int kMaxMomentOrder = 200;

enum class ProfileKind { Step, LinearRamp, SmoothErf, SmoothCubic, CustomSampled };

std::string to_string(ProfileKind kind);
ProfileKind parse_profile_kind(const std::string& name);

// Switch profile eta: 0 left of center - a, 1 right of center + a, monotone in between.
struct SwitchProfile {
  ProfileKind kind = ProfileKind::Step;
  double a = 0.0;
  double center = 0.0;
  // CustomSampled: values on a uniform grid over [center - a, center + a], clamped to [0, 1].
  std::vector<double> samples;

  static SwitchProfile step(double center = 0.0);
  static SwitchProfile linear_ramp(double a, double center = 0.0);
  static SwitchProfile smooth_erf(double a, double center = 0.0);
  static SwitchProfile smooth_cubic(double a, double center = 0.0);
  static SwitchProfile custom(double a, std::vector<double> samples, double center = 0.0);
  static SwitchProfile make(ProfileKind kind, double a, double center = 0.0);

  double operator()(double s) const;
  SwitchProfile shifted(double offset) const;

  // Points where the profile or a derivative jumps.
  std::vector<double> breakpoints() const;
  bool piecewise_polynomial() const { return kind != ProfileKind::SmoothErf; }

  // Polynomial pieces on the window, in powers of s: {lo, hi, c0, c1, ...}.
  struct Piece {
    double lo;
    double hi;
    std::vector<double> coeffs;
  };
  std::vector<Piece> pieces() const;

  // Integral of eta over [lo, hi], exact for piecewise-polynomial kinds.
  double integral(double lo, double hi) const;

  std::string describe() const;
};

// f(zeta) = eta(Re(e^{-i theta} zeta)). theta = 0 is the fixed-axis symbol.
struct HalfPlaneSwitch {
  SwitchProfile profile;
  double theta = 0.0;
};

// Indicator of the sector s < arg(zeta) < t.
struct Wedge {
  double s = 0.0;
  double t = 0.0;
};

// zeta / |zeta|.
struct Phase {};

// Angular symbol sum_n c_n e^{i n arg(zeta)}; vanishes at the origin.
struct AngularFourier {
  std::map<int, Complex> coeffs;

  static AngularFourier phase_real();  // Re(zeta/|zeta|)
  static AngularFourier phase_imag();  // Im(zeta/|zeta|)
  // Pointwise product of two angular symbols.
  AngularFourier operator*(const AngularFourier& o) const;
};

// Real polynomial sum c_ij x^i y^j in zeta = x + iy.
struct RealPolynomial {
  std::map<std::pair<int, int>, double> coeffs;

  static RealPolynomial x();
  static RealPolynomial y();
  static RealPolynomial constant(double c);
  static RealPolynomial monomial(int i, int j, double c = 1.0);
  // Parses sums like "x^2*y - 3*x + 1".
  static RealPolynomial parse(const std::string& text);

  int degree() const;
  double operator()(double x, double y) const;
  RealPolynomial dx() const;
  RealPolynomial dy() const;
  std::string describe() const;

  friend RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(double s, const RealPolynomial& a);
};

// Weighted sum of half-plane switches; used for compactly supported profiles.
struct CompactProfile {
  std::vector<std::pair<double, HalfPlaneSwitch>> parts;
};

using SymbolSpec =
    std::variant<HalfPlaneSwitch, Wedge, Phase, AngularFourier, RealPolynomial, CompactProfile>;

Complex evaluate(const SymbolSpec& sym, Complex zeta);
std::string describe(const SymbolSpec& sym);
bool is_real_valued(const SymbolSpec& sym);

// Throws std::invalid_argument on violated preconditions. `strict` applies the
// validated-path angle range [pi/12, 11 pi/12] to rotated switches.
void validate(const SymbolSpec& sym, bool strict = true);

// v(s) = eta(s + rho/2) - eta(s - rho/2) along direction theta; support in (-rho, rho).
CompactProfile compact_bump(const SwitchProfile& base, double rho, double theta);

// Integral of eta(x) x^m exp(-x^2) over the real line. Real is double or a
// boost::multiprecision float.
template <class Real>
Real eta_moment(const SwitchProfile& profile, int m);

// Integral of y^m exp(-y^2) over the real line.
double gauss_moment(int m);
template <class Real>
Real gauss_moment_t(int m);

struct LandauParameters {
  double b = 1.0;
  double E = 2.0;
};

SymbolSpec scale_physical(const SymbolSpec& sym, const LandauParameters& params);
int level_count(const LandauParameters& params);

// Norm of k_z^{(j)} outside the disc of radius rho about z: sqrt(Gamma(j+1, rho^2)).
double kernel_tail_norm(int j, double rho);

struct OverlapResult {
  double value;
  double error_estimate;
};
// <|k_z^{(j)}|, |k_w^{(k)}|> by tensor Gauss-Hermite quadrature about (z+w)/2.
OverlapResult kernel_overlap(int j, int k, Complex z, Complex w);

}  // namespace focklab::symbols
