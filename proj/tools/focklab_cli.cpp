// focklab: command-line runner for the Toeplitz operator laboratory.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "focklab/acceptance.hpp"
#include "focklab/index_lab.hpp"
#include "focklab/symbols.hpp"
#include "focklab/toeplitz.hpp"
#include "focklab/trace_lab.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kValidation = 2, kStabilization = 3, kAcceptance = 4 };

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_schedule(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("bad --n-schedule entry '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty --n-schedule");
  return out;
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// Effective configuration of a subcommand: every long option, defaults resolved.
json config_echo(const CLI::App* sub) {
  json cfg;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "-h") continue;
    const std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& res = opt->results();
      cfg[key] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      cfg[key] = opt->get_default_str();
    }
  }
  return cfg;
}

void write_json(const json& report, const std::string& path) {
  const std::string text = report.dump(2);
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path);
  os << text << "\n";
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path);
  os.precision(17);
  return os;
}

struct Common {
  std::string n_schedule = "32,64,96,128";
  int buffer = -1;
  double theta = kPi / 2;
  std::string profile = "step";
  double a = 0.5;
  double tolerance = focklab::trace::kDefaultTolerance;
  std::string out_json;
  std::string out_csv;
};

void add_output(CLI::App* sub, Common& c) {
  sub->add_option("--out-json", c.out_json, "JSON report path (stdout when empty)");
  sub->add_option("--out-csv", c.out_csv, "CSV table path");
}

void add_pair_options(CLI::App* sub, Common& c) {
  sub->add_option("--theta", c.theta, "angle of the second switch (radians)")->capture_default_str();
  sub->add_option("--profile", c.profile, "switch profile: step, linear-ramp, smooth-erf, smooth-cubic")
      ->capture_default_str();
  sub->add_option("--a", c.a, "half-width of the switch window")->capture_default_str();
}

void add_schedule_options(CLI::App* sub, Common& c) {
  sub->add_option("--n-schedule", c.n_schedule, "comma-separated exposed sizes N")->capture_default_str();
  sub->add_option("--buffer", c.buffer, "buffer B (-1: B = N for traces, 64 for index)")
      ->capture_default_str();
  sub->add_option("--tolerance", c.tolerance, "stabilization tolerance on 2pi*|trace|")
      ->capture_default_str();
}

focklab::symbols::SwitchProfile make_profile(const Common& c) {
  try {
    const auto kind = focklab::symbols::parse_profile_kind(c.profile);
    if (kind == focklab::symbols::ProfileKind::CustomSampled) {
      throw ValidationError("custom-sampled profiles are not available from the command line");
    }
    if (kind != focklab::symbols::ProfileKind::Step && !(c.a > 0)) {
      throw ValidationError("--a must be positive for profile " + c.profile);
    }
    return focklab::symbols::SwitchProfile::make(kind, c.a);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

focklab::trace::Schedule make_trace_schedule(const Common& c) {
  focklab::trace::Schedule s;
  s.N = parse_schedule(c.n_schedule);
  if (c.buffer >= 0) s.buffer = c.buffer;
  s.tolerance = c.tolerance;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return s;
}

json base_report(const std::string& name, const CLI::App* sub) {
  return {{"tool", "focklab"}, {"version", kVersion}, {"subcommand", name}, {"config", config_echo(sub)}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------ subcommands

int cmd_conductance(const CLI::App* sub, const Common& c, int stack, int level) {
  if (stack > 2) throw ValidationError("--stack must be <= 2");
  const auto t0 = std::chrono::steady_clock::now();
  const auto prof = make_profile(c);
  focklab::symbols::validate(focklab::symbols::HalfPlaneSwitch{prof, c.theta}, true);
  const auto sched = make_trace_schedule(c);
  const auto arena = level >= 0 ? focklab::trace::Arena::level(level)
                                : focklab::trace::Arena::stacked(std::max(stack, 0));
  const int levels = level >= 0 ? 1 : std::max(stack, 0) + 1;
  const auto est = focklab::trace::commutator_trace(
      focklab::trace::PairSpec::square(prof, c.theta, arena), sched);
  // sigma_Hall = -i tr
  const double sigma = (Complex(0, -1) * est.value).real();
  const double target = -levels / (2 * kPi);
  const double tol = levels == 1 ? 0.05 : levels == 2 ? 0.07 : 0.10;
  const bool pass = est.stabilized && std::abs(sigma - target) <= tol * std::abs(target);

  json rep = base_report("conductance", sub);
  rep["results"] = {{"trace", est.to_json()},
                    {"raw_trace", complex_json(est.value)},
                    {"two_pi_trace", complex_json(2 * kPi * est.value)},
                    {"sigma_hall", sigma},
                    {"target_sigma_hall", target},
                    {"arena", arena.describe()}};
  rep["verdicts"] = {{"stabilized", est.stabilized}, {"within_target", pass}};
  rep["timing_seconds"] = seconds_since(t0);
  if (!c.out_csv.empty()) {
    auto os = open_csv(c.out_csv);
    os << "N,B,value_re,value_im\n";
    for (const auto& h : est.history) os << h.N << "," << h.B << "," << h.value.real() << "," << h.value.imag() << "\n";
  }
  write_json(rep, c.out_json);
  if (!est.stabilized) return kStabilization;
  return pass ? kOk : kAcceptance;
}

int cmd_index_map(const CLI::App* sub, const Common& c, const std::string& region_name, int grid,
                  double band, const std::string& taus) {
  if (grid < 1) throw ValidationError("--grid must be >= 1");
  if (band < 0) throw ValidationError("--band must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();
  focklab::index::RegionSpec region;
  focklab::trace::PairSpec pair;
  focklab::index::IndexSchedule sched;
  focklab::trace::Schedule tsched;
  if (region_name == "square") {
    const auto prof = make_profile(c);
    focklab::symbols::validate(focklab::symbols::HalfPlaneSwitch{prof, c.theta}, true);
    region = focklab::index::RegionSpec::square(grid, band);
    pair = focklab::trace::PairSpec::square(prof, c.theta);
    sched = focklab::index::IndexSchedule::switch_default();
    tsched.tolerance = c.tolerance;
  } else if (region_name == "disc") {
    region = focklab::index::RegionSpec::disc(grid, band);
    pair = focklab::trace::PairSpec::disc();
    sched = focklab::index::IndexSchedule::phase_default();
    tsched.N = {512, 768, 1024};
    tsched.buffer_ratio = 0.5;
    tsched.tolerance = c.tolerance;
  } else {
    throw ValidationError("--region must be square or disc");
  }
  if (sub->get_option("--n-schedule")->count() > 0) sched.N = parse_schedule(c.n_schedule);
  if (c.buffer >= 0) sched.B = c.buffer;
  if (!taus.empty()) {
    sched.taus.clear();
    std::stringstream ss(taus);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        sched.taus.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("bad --taus entry '" + item + "'");
      }
    }
  }
  try {
    sched.validate();
    region.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const auto map = focklab::index::principal_function_reconstruct(pair, region, sched, tsched);
  const int considered = static_cast<int>(map.cells.size()) - map.excluded;
  const bool many_unstable = map.unstable * 10 > considered;

  json rep = base_report("index-map", sub);
  rep["results"] = map.to_json();
  rep["results"]["schedule"] = {{"N", sched.N}, {"B", sched.B}, {"taus", sched.taus}};
  rep["verdicts"] = {{"principal_function_matches", map.matches},
                     {"cross_check_closed", map.cross_check_closed},
                     {"unstable_fraction_ok", !many_unstable}};
  rep["timing_seconds"] = seconds_since(t0);
  if (!c.out_csv.empty()) {
    auto os = open_csv(c.out_csv);
    os << "re,im,index_or_flag\n";
    for (const auto& cell : map.cells) {
      os << cell.lambda.real() << "," << cell.lambda.imag() << ","
         << (cell.stable() ? std::to_string(*cell.index) : cell.label) << "\n";
    }
  }
  write_json(rep, c.out_json);
  if (many_unstable) return kStabilization;
  return map.matches && map.cross_check_closed ? kOk : kAcceptance;
}

int cmd_shift(const CLI::App* sub, const Common& c, int kmax, int level) {
  if (kmax < 1) throw ValidationError("--kmax must be >= 1");
  if (level < 0 || level > 4) throw ValidationError("--level must be in 0..4");
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep_shift = focklab::index::weighted_shift_analysis(kmax, level);
  json rep = base_report("shift", sub);
  rep["results"] = rep_shift.to_json();
  rep["results"]["a_kmax"] = rep_shift.weights.back();
  // Bounded k |a_k - 1| forces a_k -> 1.
  const bool limit_ok = rep_shift.envelope_constant <= 1.0 || kmax < 8;
  json verdicts = {{"increasing", rep_shift.increasing},
                   {"hyponormal", rep_shift.hyponormal},
                   {"limit_one", limit_ok}};
  bool ok = rep_shift.increasing && rep_shift.hyponormal && limit_ok;
  if (level > 0) {
    const auto idx = focklab::index::fredholm_index(focklab::index::OperatorFamily::phase(level), 0.3,
                                                    focklab::index::IndexSchedule::phase_default());
    rep["results"]["index_at_0.3"] = idx.to_json();
    verdicts["index_minus_one"] = idx.stable() && *idx.index == -1;
    ok = ok && idx.stable() && *idx.index == -1;
  }
  rep["verdicts"] = verdicts;
  rep["timing_seconds"] = seconds_since(t0);
  if (!c.out_csv.empty()) {
    auto os = open_csv(c.out_csv);
    os << "k,a_k,ratio,partial_trace\n";
    const auto& a = rep_shift.weights;
    for (size_t k = 0; k < a.size(); ++k) {
      os << k << "," << a[k] << ",";
      if (k + 1 < a.size()) os << a[k + 1] / a[k];
      os << "," << rep_shift.partial_trace[k] << "\n";
    }
  }
  write_json(rep, c.out_json);
  return ok ? kOk : kAcceptance;
}

int cmd_helton_howe(const CLI::App* sub, const Common& c, const std::string& ptext,
                    const std::string& qtext, const std::string& region_name) {
  focklab::symbols::RealPolynomial p, q;
  try {
    p = focklab::symbols::RealPolynomial::parse(ptext);
    q = focklab::symbols::RealPolynomial::parse(qtext);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  if (p.degree() > 6 || q.degree() > 6) throw ValidationError("polynomial degree above 6");
  const auto t0 = std::chrono::steady_clock::now();
  focklab::trace::Region region;
  focklab::trace::PairSpec pair;
  focklab::trace::Schedule sched;
  if (region_name == "square") {
    region = focklab::trace::Region::Square;
    const auto prof = make_profile(c);
    focklab::symbols::validate(focklab::symbols::HalfPlaneSwitch{prof, c.theta}, true);
    pair = focklab::trace::PairSpec::square(prof, c.theta);
    sched = make_trace_schedule(c);
  } else if (region_name == "disc") {
    region = focklab::trace::Region::Disc;
    pair = focklab::trace::PairSpec::disc();
    sched.N = {512, 768, 1024};
    sched.buffer_ratio = 0.5;
    if (sub->get_option("--n-schedule")->count() > 0) sched.N = parse_schedule(c.n_schedule);
    if (c.buffer >= 0) sched.buffer = c.buffer;
    sched.tolerance = c.tolerance;
    try {
      sched.validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  } else {
    throw ValidationError("--region must be square or disc");
  }
  const auto est = focklab::trace::helton_howe_trace(p, q, pair, sched);
  const double integral = focklab::trace::poisson_bracket_integral(p, q, region);
  // g = -chi_region: (-1/(2 pi i)) Integral {p,q} g = Integral {p,q} / (2 pi i)
  const Complex rhs = integral / (2 * kPi * Complex(0, 1));
  const double discrepancy = std::abs(rhs) > 0 ? std::abs(est.value - rhs) / std::abs(rhs)
                                               : std::abs(est.value - rhs);
  const bool pass = est.stabilized && (std::abs(rhs) > 0 ? discrepancy <= 0.07
                                                         : discrepancy <= 0.01 / (2 * kPi));
  json rep = base_report("helton-howe", sub);
  rep["results"] = {{"lhs", est.to_json()},
                    {"raw_trace", complex_json(est.value)},
                    {"two_pi_trace", complex_json(2 * kPi * est.value)},
                    {"rhs", complex_json(rhs)},
                    {"bracket_integral", integral},
                    {"discrepancy", discrepancy},
                    {"discrepancy_kind", std::abs(rhs) > 0 ? "relative" : "absolute"}};
  rep["verdicts"] = {{"stabilized", est.stabilized}, {"within_target", pass}};
  rep["timing_seconds"] = seconds_since(t0);
  write_json(rep, c.out_json);
  if (!est.stabilized) return kStabilization;
  return pass ? kOk : kAcceptance;
}

int cmd_landau(const CLI::App* sub, const Common& c, double b, double E) {
  if (!(b > 0)) throw ValidationError("--b must be positive");
  int ell = 0;
  try {
    ell = focklab::symbols::level_count({b, E});
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  json rep = base_report("landau", sub);
  rep["results"] = {{"top_level", ell},
                    {"filled_levels", ell + 1},
                    {"length_scale", std::sqrt(b / 2.0)},
                    {"highest_filled_energy", (2 * ell + 1) * b},
                    {"lowest_empty_energy", (2 * ell + 3) * b},
                    {"predicted_sigma_hall", -(ell + 1) / (2 * kPi)}};
  rep["verdicts"] = json::object();
  write_json(rep, c.out_json);
  return kOk;
}

int cmd_verify(const CLI::App* sub, const Common& c, const std::string& suite) {
  std::vector<int> ids;
  try {
    ids = focklab::acceptance::suite_criteria(suite);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const auto t0 = std::chrono::steady_clock::now();
  json rep = base_report("verify", sub);
  json results = json::array();
  bool all = true;
  for (int id : ids) {
    const auto r = focklab::acceptance::run_criterion(id);
    std::cerr << "[" << (r.pass ? "PASS" : "FAIL") << "] " << r.id << ". " << r.name << " : " << r.detail << "\n";
    results.push_back(focklab::acceptance::to_json(r));
    all = all && r.pass;
  }
  rep["results"] = results;
  rep["verdicts"] = {{"all_pass", all}};
  rep["timing_seconds"] = seconds_since(t0);
  write_json(rep, c.out_json);
  return all ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toeplitz operator laboratory: traces, indices and principal functions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value configuration file");
  app.set_version_flag("--version", std::string(kVersion));

  Common c;
  int stack = 0, level = -1, grid = 9, kmax = 500, shift_level = 0;
  double band = 0.1, b = 1.0, E = 2.0;
  std::string region = "square", p = "x", q = "y", suite = "all", taus;

  auto* cond = app.add_subcommand("conductance", "commutator trace and Hall conductance of the switch pair");
  add_schedule_options(cond, c);
  add_pair_options(cond, c);
  cond->add_option("--stack", stack, "stacked levels 0..l (l <= 2)")->capture_default_str();
  cond->add_option("--level", level, "single level j instead of a stack (-1: use --stack)")
      ->capture_default_str();
  add_output(cond, c);

  auto* imap = app.add_subcommand("index-map", "index grid and principal function comparison");
  add_schedule_options(imap, c);
  add_pair_options(imap, c);
  imap->add_option("--region", region, "square or disc")->capture_default_str();
  imap->add_option("--grid", grid, "grid resolution per axis")->capture_default_str();
  imap->add_option("--band", band, "exclusion band around the boundary")->capture_default_str();
  imap->add_option("--taus", taus, "comma-separated singular value thresholds");
  add_output(imap, c);

  auto* shift = app.add_subcommand("shift", "weights of the phase-symbol weighted shift");
  shift->add_option("--kmax", kmax, "largest weight index")->capture_default_str();
  shift->add_option("--level", shift_level, "level j")->capture_default_str();
  add_output(shift, c);

  auto* hh = app.add_subcommand("helton-howe", "trace of [p(A,B), q(A,B)] against the area integral");
  add_schedule_options(hh, c);
  add_pair_options(hh, c);
  hh->add_option("--p", p, "polynomial p(x, y)")->capture_default_str();
  hh->add_option("--q", q, "polynomial q(x, y)")->capture_default_str();
  hh->add_option("--region", region, "square or disc")->capture_default_str();
  add_output(hh, c);

  auto* landau = app.add_subcommand("landau", "filled Landau levels and predicted conductance");
  landau->add_option("--b", b, "magnetic field strength")->capture_default_str();
  landau->add_option("--E", E, "Fermi energy")->capture_default_str();
  add_output(landau, c);

  auto* verify = app.add_subcommand("verify", "run acceptance criteria");
  verify->add_option("suite", suite, "algebra, traces, index, kernels or all")->capture_default_str();
  add_output(verify, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*cond) return cmd_conductance(cond, c, stack, level);
    if (*imap) return cmd_index_map(imap, c, region, grid, band, taus);
    if (*shift) return cmd_shift(shift, c, kmax, shift_level);
    if (*hh) return cmd_helton_howe(hh, c, p, q, region);
    if (*landau) return cmd_landau(landau, c, b, E);
    if (*verify) return cmd_verify(verify, c, suite);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kValidation;
}
