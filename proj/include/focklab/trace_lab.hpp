#pragma once

#include <complex>
#include <string>
#include <vector>

#include "focklab/symbols.hpp"
#include "focklab/toeplitz.hpp"
#include "json.hpp"

namespace focklab::trace {

using Complex = std::complex<double>;
using symbols::RealPolynomial;
using symbols::SwitchProfile;
using symbols::SymbolSpec;

inline constexpr double kDefaultTolerance = 1e-3;

struct TraceStep {
  int N = 0;
  int B = 0;
  Complex value;
  // tr(F_N G_N - G_N F_N) on the exposed block alone; always ~0, kept as a sanity record.
  Complex unbuffered;
};

struct TraceEstimate {
  Complex value;
  // Running sums of the exposed diagonal at the largest N.
  std::vector<Complex> partial_sums;
  std::vector<TraceStep> history;
  bool stabilized = false;
  // Largest 2*pi*|change| over the last two refinements.
  double gap = 0.0;
  double tolerance = kDefaultTolerance;

  nlohmann::json to_json() const;
};

// Where the pair acts: one level F_j, or the stack F_0 + ... + F_ell.
struct Arena {
  enum class Kind { Level, Stacked };
  Kind kind = Kind::Level;
  int j = 0;

  static Arena level(int j) { return {Kind::Level, j}; }
  static Arena stacked(int ell) { return {Kind::Stacked, ell}; }
  toeplitz::TruncationSpec truncation(int N, int B) const;
  std::string describe() const;
};

// A = T_f, B = T_g on the arena.
struct PairSpec {
  SymbolSpec f;
  SymbolSpec g;
  Arena arena;

  // eta(Re z) and eta(Re(e^{-i theta} z)); their joint range is the unit square.
  static PairSpec square(const SwitchProfile& profile, double theta, Arena arena = {});
  // Re(z/|z|), Im(z/|z|); joint range the closed unit disc.
  static PairSpec disc(Arena arena = {});
};

struct Schedule {
  std::vector<int> N{32, 64, 96, 128};
  // Fixed buffer when >= 0, otherwise B = buffer_ratio * N.
  int buffer = -1;
  double buffer_ratio = 1.0;
  double tolerance = kDefaultTolerance;

  int buffer_for(int n) const;
  void validate() const;
};

TraceEstimate commutator_trace(const PairSpec& pair, const Schedule& schedule,
                               toeplitz::Route route = toeplitz::Route::Auto);

// tr[p(A,B), q(A,B)] with every monomial ordered A^i B^j.
TraceEstimate helton_howe_trace(const RealPolynomial& p, const RealPolynomial& q,
                                const PairSpec& pair, const Schedule& schedule,
                                toeplitz::Route route = toeplitz::Route::Auto);

enum class Region { Square, Disc };
std::string to_string(Region r);
Region parse_region(const std::string& name);

// Exact integral of {p, q} = p_x q_y - p_y q_x over [0,1]^2 or the unit disc.
double poisson_bracket_integral(const RealPolynomial& p, const RealPolynomial& q, Region region);
// Exact integral of x^i y^j over the region.
double region_monomial_integral(int i, int j, Region region);

// Integral of eta(x + t) - eta(x) over the line; equals t.
double switch_area_identity(const SwitchProfile& profile, double t);

struct InnerIntegral {
  double value;
  double target;  // -y1 (x2 + cot(theta) x1)
};
// Integral over the plane of (f1(u+y) - f1(u)) (f2(u) - f2(u+x)), with f1 = eta1(Re u)
// and f2 = eta2(Re(e^{-i theta} u)). Step profiles use the exact parallelogram area.
InnerIntegral inner_integral_check(const SwitchProfile& p1, const SwitchProfile& p2, double theta,
                                   Complex x, Complex y);

// (1/pi^3) Integral e^{x conj(y)} e^{-|x|^2-|y|^2} (y2 x1 - y1 x2) dA(x) dA(y), by tensor
// Gauss-Hermite. With unit_integrand the bracket factor is replaced by 1 (value 1/pi).
Complex kubo_integral_direct(int nodes = 24, bool unit_integrand = false);

struct ExpansionResult {
  int level = 0;
  // c_nu for nu = 1..level; NaN where the data leave c_nu unidentified.
  std::vector<double> coeffs;
  double residual = 0.0;
};
// Fits V_j^* T_{f,j} V_j - T_f = sum_nu c_nu T_{(d dbar)^nu f} over matrix elements
// k, l < kmax for every f in fs, using exact polynomial-space arithmetic.
ExpansionResult conjugated_symbol_expansion(int j, const std::vector<RealPolynomial>& fs,
                                            int kmax = 6);

struct LidskiiPair {
  int i;
  int j;
  Complex value;
};
struct CrossTerms {
  Complex Z0, Z1, Z2, Z3;
  Complex total;
  std::vector<LidskiiPair> lidskii;
  // Stacked trace minus the sum of per-level traces; equals total.
  Complex stacked_minus_levels;
};
// Off-diagonal level contributions to the stacked commutator trace.
CrossTerms cross_term_traces(int ell, const PairSpec& pair, int N, int B,
                             toeplitz::Route route = toeplitz::Route::Auto);

}  // namespace focklab::trace
