#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "focklab/symbols.hpp"
#include "focklab/toeplitz.hpp"
#include "focklab/trace_lab.hpp"
#include "json.hpp"

namespace focklab::index {

using Complex = std::complex<double>;
using toeplitz::Matrix;

// Operator whose index is estimated. Either an assembled Toeplitz matrix family
// or the phase symbol on one level, which is an explicit weighted shift.
class OperatorFamily {
 public:
  enum class Kind { Matrix, WeightedShift };

  // T = T_f + i T_g on the pair's arena.
  static OperatorFamily from_pair(const trace::PairSpec& pair);
  // T_sym on the arena.
  static OperatorFamily from_symbol(const symbols::SymbolSpec& sym, const trace::Arena& arena);
  // Phase symbol z/|z| on level j.
  static OperatorFamily phase(int level);

  Kind kind() const { return kind_; }
  const trace::Arena& arena() const { return arena_; }
  std::string describe() const { return description_; }

  // Full buffered matrix with N exposed and B buffer indices per level.
  toeplitz::OperatorMatrix matrix(int N, int B) const;
  // Subdiagonal weights w_0..w_{n-1} of the weighted shift.
  std::vector<double> shift_weights(int n) const;

 private:
  Kind kind_ = Kind::Matrix;
  trace::Arena arena_;
  std::vector<std::pair<Complex, symbols::SymbolSpec>> terms_;
  std::string description_;
  struct Cache {
    std::map<std::pair<int, int>, toeplitz::OperatorMatrix> matrices;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct IndexSchedule {
  std::vector<int> N{320, 384, 448};
  int B = 64;
  std::vector<double> taus{1e-2, 1e-3};

  // Assembled switch-symbol operators (values measured on the square pair).
  static IndexSchedule switch_default();
  // Weighted-shift fast path.
  static IndexSchedule phase_default();
  void validate() const;
};

struct Evidence {
  int N = 0;
  double tau = 0.0;
  int dim_ker = 0;
  int dim_coker = 0;
  double sigma_ker = 0.0;    // smallest singular value on the kernel side
  double sigma_coker = 0.0;  // smallest singular value on the cokernel side
};

struct IndexReport {
  Complex lambda;
  std::optional<int> index;  // empty when unstable or excluded
  std::string label;         // "stable", "unstable", or "excluded"
  std::vector<Evidence> evidence;

  bool stable() const { return index.has_value(); }
  nlohmann::json to_json() const;
};

// Index from rectangular (N+B) x N sections of T - lambda and T* - conj(lambda),
// counting singular values below each tau. Reported only when every (N, tau) agrees.
IndexReport fredholm_index(const OperatorFamily& op, Complex lambda, const IndexSchedule& schedule);

struct RegionSpec {
  enum class Kind { Square, Disc, Rectangle };
  Kind kind = Kind::Square;
  // Region [x0, x1] x [y0, y1] for Square and Rectangle.
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  int grid = 9;
  double band = 0.1;
  // Grid box = region bounding box widened by this margin.
  double margin = 0.25;

  static RegionSpec square(int grid = 9, double band = 0.1);
  static RegionSpec disc(int grid = 9, double band = 0.1);
  static RegionSpec rectangle(double x0, double x1, double y0, double y1, int grid = 9,
                              double band = 0.1);

  void validate() const;
  bool inside(Complex z) const;
  double boundary_distance(Complex z) const;
  double area() const;
  std::vector<Complex> grid_points() const;
  std::string describe() const;
};

struct ProbePoint {
  Complex lambda;
  std::vector<int> N;
  std::vector<double> sigma_square;  // smallest singular value of the square exposed section
  std::vector<double> gap;           // smallest singular value not counted as kernel/cokernel
  double gap_limit = 0.0;            // fitted gap(N) = g_inf + c / sqrt(N)
  bool flagged = false;              // candidate essential spectrum
  bool in_band = false;
};

std::vector<ProbePoint> essential_spectrum_probe(const OperatorFamily& op, const RegionSpec& region,
                                                 const IndexSchedule& schedule);
ProbePoint essential_spectrum_point(const OperatorFamily& op, Complex lambda,
                                    const IndexSchedule& schedule);

struct ShiftReport {
  int level = 0;
  std::vector<double> weights;        // a_0..a_kmax
  std::vector<double> partial_trace;  // sum_{k<=m} diag [T*, T]
  bool increasing = true;
  bool hyponormal = true;
  double ratio_error = 0.0;      // max |a_{k+1}/a_k - (k+3/2)/sqrt((k+1)(k+2))|, level 0
  double telescope_error = 0.0;  // max |partial_trace_m - a_m^2|
  double limit_error = 0.0;      // |a_kmax - 1|
  // Largest k*|a_k - 1| over k >= 8; reported against the 1/4 envelope.
  double envelope_constant = 0.0;
  double oracle_error = 0.0;  // radial-quadrature cross-check of the first weights
  nlohmann::json to_json() const;
};

ShiftReport weighted_shift_analysis(int kmax, int level = 0);

struct PrincipalFunctionMap {
  RegionSpec region;
  std::vector<IndexReport> cells;
  int mismatches = 0;  // stable cells that disagree with -chi_region
  int unstable = 0;
  int excluded = 0;
  bool matches = false;
  // 2 pi * (-1/(2 pi i)) * integral of g, and 2 pi * trace, with their distance.
  Complex integral_side;
  Complex trace_side;
  double cross_check_gap = 0.0;
  bool cross_check_closed = false;
  trace::TraceEstimate trace;
  nlohmann::json to_json() const;
};

PrincipalFunctionMap principal_function_reconstruct(const trace::PairSpec& pair,
                                                    const RegionSpec& region,
                                                    const IndexSchedule& schedule,
                                                    const trace::Schedule& trace_schedule);

enum class WedgeRelation { A, B, C, D };
WedgeRelation parse_wedge_relation(const std::string& name);

struct DecayStep {
  int N;
  std::vector<double> trailing;  // sigma_{ceil(N/2)} .. sigma_{N-1}, descending
};
struct DecayReport {
  std::vector<DecayStep> steps;
  bool decaying = false;  // leading trailing value shrinks (or sits below 1e-12) at every refinement
};

// Sector of relation (A..D) at angle theta, as a wedge symbol.
symbols::Wedge relation_wedge(WedgeRelation which, double theta);
// The compact remainder of the chosen relation on level j, from buffered products.
DecayReport wedge_compactness_probe(int j, double theta, WedgeRelation which,
                                    const std::vector<int>& Ns, int B);
// max |T_{chi_A} + T_{chi_B} + T_{chi_C} + T_{chi_D} - I| on level j.
double wedge_partition_defect(int j, double theta, int K);

enum class TraceClassExpression {
  SwitchCommutator,   // [T_{f1}, T_{f2}], step switches at theta = pi/2
  PhaseCommutator,    // [T_{phi1}, T_{phi2}]
  CompressedProduct,  // P [M_{phi1}, P][M_{phi2}, P] P = T_{phi1} T_{phi2} - T_{phi1 phi2}
};
TraceClassExpression parse_trace_class_expression(const std::string& name);

struct TraceClassReport {
  std::string expression;
  std::string arena;
  std::vector<int> N;
  std::vector<double> nuclear;  // sum of singular values of the exposed block
  // Diagnostic only: no verdict is attached for open cases.
  nlohmann::json to_json() const;
};

TraceClassReport trace_class_probe(TraceClassExpression expr, const trace::Arena& arena,
                                   const std::vector<int>& Ns, double buffer_ratio = 1.0);

}  // namespace focklab::index
