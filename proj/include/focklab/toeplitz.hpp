#pragma once

#include <Eigen/Dense>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "focklab/fock_algebra.hpp"
#include "focklab/symbols.hpp"

namespace focklab::toeplitz {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

class CancellationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// N exposed indices per level, B buffer indices per level, and the level set.
struct TruncationSpec {
  int N = 128;
  int B = 128;
  std::vector<int> levels{0};

  static TruncationSpec level(int j, int N, int B);
  static TruncationSpec stacked(int ell, int N, int B);

  int block() const { return N + B; }
  int dim() const { return static_cast<int>(levels.size()) * block(); }
  void validate() const;
};

// Row (l on level i), column (k on level j) holds <f e_k^{(j)}, e_l^{(i)}>.
// Levels are stored level-major: all k of the first level, then the next.
struct OperatorMatrix {
  Matrix entries;
  int N = 0;
  int B = 0;
  std::vector<int> levels;
  std::string basis_tag;
  std::string provenance;

  int block() const { return N + B; }
  int num_levels() const { return static_cast<int>(levels.size()); }
  int dim() const { return num_levels() * block(); }
  int index(int level_pos, int k) const { return level_pos * block() + k; }

  // Level block (i_pos, j_pos) of size block() x block().
  Matrix level_block(int i_pos, int j_pos) const;
  // Rows: first `rows` indices of each level; columns: first `cols` of each level.
  Matrix section(int rows, int cols) const;
  // Exposed N x N per level.
  Matrix exposed() const { return section(N, N); }
  // Same operator with the leading N' + B' indices of every level.
  OperatorMatrix truncated(int N2, int B2) const;
};

enum class Route { Auto, Separable, Position };

OperatorMatrix toeplitz_lll(const symbols::SymbolSpec& sym, const TruncationSpec& trunc,
                            Route route = Route::Auto);
OperatorMatrix toeplitz_level(const symbols::SymbolSpec& sym, int j, const TruncationSpec& trunc,
                              Route route = Route::Auto);
OperatorMatrix toeplitz_stacked(const symbols::SymbolSpec& sym, int ell,
                                const TruncationSpec& trunc, Route route = Route::Auto);
// Uses trunc.levels as given.
OperatorMatrix assemble(const symbols::SymbolSpec& sym, const TruncationSpec& trunc,
                        Route route = Route::Auto);

// Matrix of f(e^{-i theta} .) from the matrix of f.
OperatorMatrix rotation_conjugate(const OperatorMatrix& mat, double theta);

// (1/pi) Integral of f z^a conj(z)^b exp(-|z|^2) for a switch along the real axis
// (axis 0) or the imaginary axis (axis 1), by binomial expansion in high precision.
// Throws CancellationError when sum|terms| / sqrt(a! b!) exceeds 1e12.
Complex separable_integral(const symbols::SwitchProfile& profile, int a, int b, int axis);

// Shift weight of the phase symbol on the lowest level.
double phase_weight(int k);

// p(x, y) as an element of the polynomial subspace, x = Re z, y = Im z.
fock::PolyState polynomial_state(const symbols::RealPolynomial& p, int budget);

// CSV of (row, col, re, im) with a commented header describing the basis.
void export_csv(const OperatorMatrix& mat, std::ostream& os);

}  // namespace focklab::toeplitz
