#include "focklab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "focklab/fock_algebra.hpp"
#include "focklab/index_lab.hpp"
#include "focklab/symbols.hpp"
#include "focklab/toeplitz.hpp"
#include "focklab/trace_lab.hpp"

namespace focklab::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;
const std::complex<double> kI(0.0, 1.0);

using symbols::SwitchProfile;
using trace::Arena;
using trace::PairSpec;
using Complex = std::complex<double>;

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

std::string fix(double x, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << x;
  return os.str();
}

std::string cplx(Complex z) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// 1. Exact ladder algebra on the level bases.
CriterionResult exact_algebra() {
  CriterionResult r{1, "exact algebra: [A,C]=1, C=A*, V_j*V_j=P, V_jV_j*=P_j, CA=j on F_j", false, ""};
  double worst = 0.0;
  for (int i = 0; i <= 4; ++i) {
    for (int k = 0; k <= 12; ++k) {
      const auto u = fock::level_basis_vector(i, k);
      // [A, C] u = u
      worst = std::max(worst, fock::norm(fock::apply_A(fock::apply_C(u)) -
                                         fock::apply_C(fock::apply_A(u)) - u));
      // C A e_k^{(i)} = i e_k^{(i)}
      worst = std::max(worst, fock::norm(fock::number_op(u) - Complex(i) * u));
      for (int j = 0; j <= 4; ++j) {
        const auto PjU = fock::apply_Pj(u, j);
        const auto VVs = fock::apply_Vj(fock::apply_Vj_adjoint(u, j), j);
        worst = std::max(worst, fock::norm(VVs - PjU));
        const auto VsV = fock::apply_Vj_adjoint(fock::apply_Vj(u, j), j);
        worst = std::max(worst, fock::norm(VsV - fock::apply_P(u)));
      }
      for (int i2 = 0; i2 <= 4; ++i2) {
        for (int k2 = 0; k2 <= 12; ++k2) {
          const auto v = fock::level_basis_vector(i2, k2);
          const Complex lhs = fock::inner_product(fock::apply_C(u), v, fock::Summation::Extended);
          const Complex rhs = fock::inner_product(u, fock::apply_A(v), fock::Summation::Extended);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
    }
  }
  r.pass = worst <= 1e-12;
  r.detail = "max defect " + sci(worst) + " (tol 1e-12)";
  return r;
}

// 2. The closing Gaussian integral of the lowest-level trace computation.
CriterionResult kubo_integral() {
  CriterionResult r{2, "4D Gaussian integral = -i/(2pi)", false, ""};
  const auto t0 = std::chrono::steady_clock::now();
  const Complex v = trace::kubo_integral_direct(24);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double err = std::abs(v - Complex(0, -1.0 / (2 * kPi)));
  r.pass = err <= 1e-6 && secs < 5.0;
  r.detail = "value " + cplx(v) + ", error " + sci(err) + ", " + fix(secs, 3) + " s";
  return r;
}

// 3. Inner-integral identity for step switches.
CriterionResult inner_integral() {
  CriterionResult r{3, "inner-integral identity, step profiles, theta in {pi/2, pi/3}", false, ""};
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  double worst = 0.0;
  for (double theta : {kPi / 2, kPi / 3}) {
    for (int s = 0; s < 10; ++s) {
      const Complex x(U(rng), U(rng)), y(U(rng), U(rng));
      const auto res = trace::inner_integral_check(SwitchProfile::step(), SwitchProfile::step(),
                                                   theta, x, y);
      worst = std::max(worst, std::abs(res.value - res.target));
    }
  }
  r.pass = worst <= 1e-10;
  r.detail = "max |value - target| " + sci(worst) + " over 20 samples (tol 1e-10)";
  return r;
}

std::string trace_detail(const trace::TraceEstimate& e) {
  return "2pi*trace " + cplx(2 * kPi * e.value) + ", gap " + sci(e.gap) +
         (e.stabilized ? ", stabilized" : ", NOT stabilized");
}

bool close_rel(Complex v, Complex target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

const Complex kUnitTarget = 1.0 / (2 * kPi * kI);

// 4. Lowest-level trace.
CriterionResult lowest_level() {
  CriterionResult r{4, "lowest-level trace 1/(2 pi i)", false, ""};
  const auto e = trace::commutator_trace(PairSpec::square(SwitchProfile::step(), kPi / 2), {});
  const double mod = 2 * kPi * std::abs(e.value);
  r.pass = e.stabilized && std::abs(mod - 1.0) <= 0.05 &&
           std::abs(e.value.real()) <= 0.05 * std::abs(e.value);
  r.detail = trace_detail(e);
  return r;
}

// 5. Level-1 trace.
CriterionResult level_one() {
  CriterionResult r{5, "level-1 trace 1/(2 pi i)", false, ""};
  const auto e = trace::commutator_trace(
      PairSpec::square(SwitchProfile::step(), kPi / 2, Arena::level(1)), {});
  r.pass = e.stabilized && close_rel(e.value, kUnitTarget, 0.05);
  r.detail = trace_detail(e);
  return r;
}

// 6. Stacked traces and cross terms.
CriterionResult stacked() {
  CriterionResult r{6, "stacked traces (l+1)/(2 pi i), cross terms vanish", false, ""};
  const auto e1 = trace::commutator_trace(
      PairSpec::square(SwitchProfile::step(), kPi / 2, Arena::stacked(1)), {});
  const auto e2 = trace::commutator_trace(
      PairSpec::square(SwitchProfile::step(), kPi / 2, Arena::stacked(2)), {});
  const auto ct = trace::cross_term_traces(1, PairSpec::square(SwitchProfile::step(), kPi / 2), 128, 128);
  const double cross = 2 * kPi * std::abs(ct.total);
  r.pass = e1.stabilized && e2.stabilized && close_rel(e1.value, 2.0 * kUnitTarget, 0.07) &&
           close_rel(e2.value, 3.0 * kUnitTarget, 0.10) && cross <= 0.05;
  r.detail = "l=1: " + trace_detail(e1) + "; l=2: " + trace_detail(e2) + "; |2pi*cross| " + sci(cross);
  return r;
}

// 7. Independence of the switch profile.
CriterionResult switch_independence() {
  CriterionResult r{7, "trace independent of switch profile", false, ""};
  const auto base = trace::commutator_trace(PairSpec::square(SwitchProfile::step(), kPi / 2), {});
  bool ok = base.stabilized;
  std::string detail;
  for (const auto& prof : {SwitchProfile::smooth_erf(0.5), SwitchProfile::linear_ramp(0.5)}) {
    const auto e = trace::commutator_trace(PairSpec::square(prof, kPi / 2), {});
    const double shift = 2 * kPi * std::abs(e.value - base.value);
    ok = ok && e.stabilized && shift < e.tolerance;
    detail += prof.describe() + ": shift " + sci(shift) + (e.stabilized ? "" : " (NOT stabilized)") + "; ";
  }
  r.pass = ok;
  r.detail = detail + "tolerance " + sci(base.tolerance);
  return r;
}

// 8. Shift weights of the phase symbol.
CriterionResult shift_weights() {
  CriterionResult r{8, "phase shift weights a_k", false, ""};
  const auto rep = index::weighted_shift_analysis(1000);
  const auto& a = rep.weights;
  const double a0 = std::abs(a[0] - std::sqrt(kPi) / 2);
  const double a500 = std::abs(a[500] - 1.0), a500sq = std::abs(a[500] * a[500] - 1.0);
  r.pass = a0 <= 1e-12 && rep.ratio_error <= 1e-12 && rep.increasing && a500 <= 1.5e-3 &&
           rep.telescope_error <= 1e-13 && a500sq <= 3e-3 && rep.hyponormal;
  r.detail = "|a0 - sqrt(pi)/2| " + sci(a0) + ", ratio error " + sci(rep.ratio_error) +
             (rep.increasing ? ", increasing" : ", NOT increasing") + ", |a500 - 1| " + sci(a500) +
             ", telescope error " + sci(rep.telescope_error) + ", |a500^2 - 1| " + sci(a500sq);
  return r;
}

// 9. Index values.
CriterionResult index_values() {
  CriterionResult r{9, "Fredholm index values", false, ""};
  bool ok = true;
  std::string detail;
  auto check = [&](const index::OperatorFamily& op, Complex lam, int want,
                   const index::IndexSchedule& s, const std::string& tag) {
    const auto rep = index::fredholm_index(op, lam, s);
    const bool good = rep.stable() && *rep.index == want;
    ok = ok && good;
    detail += tag + "(" + cplx(lam) + ")=" + (rep.stable() ? std::to_string(*rep.index) : rep.label) +
              (good ? "" : " [want " + std::to_string(want) + "]") + "; ";
  };
  const auto phase = index::OperatorFamily::phase(0);
  for (Complex lam : {Complex(0, 0), Complex(0.3, 0), Complex(0, 0.5)}) {
    check(phase, lam, -1, index::IndexSchedule::phase_default(), "T_phase");
  }
  const auto TF = index::OperatorFamily::from_pair(PairSpec::square(SwitchProfile::step(), kPi / 2));
  for (Complex lam : {Complex(0.5, 0.5), Complex(0.3, 0.3), Complex(0.7, 0.3), Complex(0.3, 0.7)}) {
    check(TF, lam, -1, index::IndexSchedule::switch_default(), "T_F");
  }
  for (Complex lam : {Complex(2, 2), Complex(-0.5, -0.5)}) {
    check(TF, lam, 0, index::IndexSchedule::switch_default(), "T_F");
  }
  check(index::OperatorFamily::phase(1), 0.3, -1, index::IndexSchedule::phase_default(), "T_phase,1");
  r.pass = ok;
  r.detail = detail;
  return r;
}

trace::Schedule disc_trace_schedule() {
  trace::Schedule s;
  s.N = {512, 768, 1024};
  s.buffer_ratio = 0.5;
  return s;
}

// 10. Principal-function maps.
CriterionResult principal_maps() {
  CriterionResult r{10, "principal function maps -chi_S and -chi_D", false, ""};
  bool ok = true;
  std::string detail;
  auto run = [&](const PairSpec& pair, const index::RegionSpec& region, const index::IndexSchedule& s,
                 const trace::Schedule& ts, const std::string& tag) {
    const auto map = index::principal_function_reconstruct(pair, region, s, ts);
    const int considered = static_cast<int>(map.cells.size()) - map.excluded;
    const bool good = map.matches && map.unstable * 10 <= considered && map.cross_check_closed;
    ok = ok && good;
    detail += tag + ": mismatches " + std::to_string(map.mismatches) + ", unstable " +
              std::to_string(map.unstable) + ", excluded " + std::to_string(map.excluded) +
              ", cross-check gap " + sci(map.cross_check_gap) + "; ";
  };
  run(PairSpec::square(SwitchProfile::step(), kPi / 2), index::RegionSpec::square(9, 0.1),
      index::IndexSchedule::switch_default(), {}, "square");
  run(PairSpec::disc(), index::RegionSpec::disc(9, 0.1), index::IndexSchedule::phase_default(),
      disc_trace_schedule(), "disc");
  r.pass = ok;
  r.detail = detail;
  return r;
}

// 11. Trace functional on polynomials of the pair.
CriterionResult helton_howe() {
  CriterionResult r{11, "polynomial trace functional vs area integrals", false, ""};
  using symbols::RealPolynomial;
  struct Case {
    RealPolynomial p, q;
    bool disc;
    std::string tag;
  };
  const std::vector<Case> cases{
      {RealPolynomial::x(), RealPolynomial::y(), false, "x,y square"},
      {RealPolynomial::parse("x^2"), RealPolynomial::y(), false, "x^2,y square"},
      {RealPolynomial::parse("x*y"), RealPolynomial::parse("x+y"), false, "xy,x+y square"},
      {RealPolynomial::x(), RealPolynomial::y(), true, "x,y disc"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto pair = c.disc ? PairSpec::disc() : PairSpec::square(SwitchProfile::step(), kPi / 2);
    const auto e = trace::helton_howe_trace(c.p, c.q, pair, c.disc ? disc_trace_schedule() : trace::Schedule{});
    const double area = trace::poisson_bracket_integral(
        c.p, c.q, c.disc ? trace::Region::Disc : trace::Region::Square);
    // g = -chi, so (-1/(2 pi i)) Integral {p,q} g = Integral {p,q} / (2 pi i)
    const Complex target = area / (2 * kPi * kI);
    const bool good = e.stabilized && (std::abs(target) > 0
                                           ? close_rel(e.value, target, 0.07)
                                           : std::abs(e.value) <= 0.01 / (2 * kPi));
    ok = ok && good;
    detail += c.tag + ": " + cplx(e.value) + " vs " + cplx(target) + (good ? "" : " FAIL") + "; ";
  }
  r.pass = ok;
  r.detail = detail;
  return r;
}

// 12. Conjugated-symbol coefficients.
CriterionResult expansion() {
  CriterionResult r{12, "conjugated symbol expansion coefficients", false, ""};
  using symbols::RealPolynomial;
  const std::vector<RealPolynomial> fs{RealPolynomial::parse("x^2"), RealPolynomial::parse("y^2"),
                                       RealPolynomial::parse("x*y"), RealPolynomial::parse("x^2*y^2")};
  const auto e1 = trace::conjugated_symbol_expansion(1, fs);
  const auto e2 = trace::conjugated_symbol_expansion(2, fs);
  // Frozen values from an exact rational computation.
  const double c21 = 2.0, c22 = 0.5;
  const bool ok1 = std::abs(e1.coeffs[0] - 1.0) <= 1e-10 && e1.residual <= 1e-10;
  const bool ok2 = std::abs(e2.coeffs[0] - c21) <= 1e-10 && std::abs(e2.coeffs[1] - c22) <= 1e-10 &&
                   e2.residual <= 1e-10;
  r.pass = ok1 && ok2;
  r.detail = "j=1: c1 " + fix(e1.coeffs[0], 12) + " residual " + sci(e1.residual) + "; j=2: (" +
             fix(e2.coeffs[0], 12) + ", " + fix(e2.coeffs[1], 12) + ") residual " + sci(e2.residual);
  return r;
}

// 13. Kernel localization estimates.
CriterionResult kernel_estimates() {
  CriterionResult r{13, "kernel tail and overlap decay", false, ""};
  bool ok = true;
  std::string detail = "tail constants sup rho<=6 of norm*e^{rho^2/3}:";
  for (int j = 0; j <= 3; ++j) {
    double sup = 0.0, prev = 0.0;
    bool tail_decreasing = true;
    for (int i = 0; i <= 600; ++i) {
      const double rho = 0.01 * i;
      const double v = symbols::kernel_tail_norm(j, rho) * std::exp(rho * rho / 3.0);
      sup = std::max(sup, v);
      // Past the peak rho^2 = 3j + 1 the product must fall.
      if (rho * rho > 3.0 * j + 1.0 && v > prev) tail_decreasing = false;
      prev = v;
    }
    ok = ok && std::isfinite(sup) && tail_decreasing;
    detail += " j=" + std::to_string(j) + ":" + fix(sup, 3);
  }
  detail += "; overlap constants sup d<=6 of overlap*e^{d^2/8}:";
  const Complex dir = std::polar(1.0, kPi / 5);
  for (auto [j, k] : std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {1, 3}, {3, 3}}) {
    double sup = 0.0, prev = 0.0, qerr = 0.0;
    bool tail_decreasing = true;
    for (int i = 0; i <= 24; ++i) {
      const double d = 0.25 * i;
      const auto ov = symbols::kernel_overlap(j, k, 0.0, d * dir);
      const double v = ov.value * std::exp(d * d / 8.0);
      qerr = std::max(qerr, ov.error_estimate);
      sup = std::max(sup, v);
      // The prefactor grows like d^{j+k}; past d^2 = 4(j+k) + 1 the product must fall.
      if (d * d > 4.0 * (j + k) + 1.0 && v > prev) tail_decreasing = false;
      prev = v;
    }
    ok = ok && std::isfinite(sup) && tail_decreasing;
    detail += " (" + std::to_string(j) + "," + std::to_string(k) + "):" + fix(sup, 3) +
              " [quad " + sci(qerr) + "]";
  }
  r.pass = ok;
  r.detail = detail;
  return r;
}

// 14. Dual-route assembly and rotation covariance.
CriterionResult dual_route() {
  CriterionResult r{14, "dual-route assembly and rotation covariance", false, ""};
  double route_gap = 0.0, rot_gap = 0.0;
  // k,l <= 40 on the lowest level. On level 1 the separable guard (ratio 1e12) trips
  // at k = 37, so that level is compared on k,l <= 36.
  const toeplitz::TruncationSpec t0{41, 0, {0}}, t1{37, 0, {1}}, ts{20, 0, {0, 1}};
  for (const auto& prof : {SwitchProfile::step(), SwitchProfile::linear_ramp(0.5),
                           SwitchProfile::smooth_erf(0.5), SwitchProfile::smooth_cubic(0.75)}) {
    const symbols::HalfPlaneSwitch h{prof, 0.0};
    for (const auto& t : {t0, t1, ts}) {
      const auto a = toeplitz::assemble(h, t, toeplitz::Route::Position);
      const auto b = toeplitz::assemble(h, t, toeplitz::Route::Separable);
      route_gap = std::max(route_gap, (a.entries - b.entries).cwiseAbs().maxCoeff());
    }
  }
  for (const auto& t : {t0, t1}) {
    const symbols::HalfPlaneSwitch h0{SwitchProfile::step(), 0.0}, h90{SwitchProfile::step(), kPi / 2};
    const auto rotated = toeplitz::rotation_conjugate(toeplitz::assemble(h0, t, toeplitz::Route::Position), kPi / 2);
    const auto direct = toeplitz::assemble(h90, t, toeplitz::Route::Separable);
    rot_gap = std::max(rot_gap, (rotated.entries - direct.entries).cwiseAbs().maxCoeff());
  }
  r.pass = route_gap <= 1e-8 && rot_gap <= 1e-10;
  r.detail = "max route gap " + sci(route_gap) + " (tol 1e-8), rotation gap " + sci(rot_gap) +
             " (tol 1e-10)";
  return r;
}

}  // namespace

CriterionResult run_criterion(int id) {
  static const std::vector<std::function<CriterionResult()>> table{
      exact_algebra, kubo_integral, inner_integral, lowest_level, level_one,
      stacked,       switch_independence, shift_weights, index_values, principal_maps,
      helton_howe,   expansion,     kernel_estimates, dual_route};
  if (id < 1 || id > kCriterionCount) throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1]();
  } catch (const std::exception& e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "algebra") return {1, 12, 14};
  if (suite == "traces") return {2, 3, 4, 5, 6, 7, 11};
  if (suite == "index") return {8, 9, 10};
  if (suite == "kernels") return {13};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  throw std::invalid_argument("unknown suite: " + suite);
}

nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}};
}

}  // namespace focklab::acceptance
