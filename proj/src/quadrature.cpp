#include "focklab/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace focklab::quad {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix, weights are
// mu0 times the squared first eigenvector components.
Rule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v * v;
  }
  return r;
}

}  // namespace

Rule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) b(i - 1) = std::sqrt(0.5 * i);
  return golub_welsch(b, std::sqrt(std::numbers::pi));
}

Rule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Eigen::VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) b(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  Rule r = golub_welsch(b, 2.0);
  // Symmetrize to remove eigen-solver asymmetry in the nodes.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
    const double w = 0.5 * (r.weights[n - 1 - i] + r.weights[i]);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule composite_legendre(double a, double b, const std::vector<double>& breaks, double width,
                        int order) {
  std::vector<double> edges{a};
  for (double x : breaks) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  const Rule g = gauss_legendre(order);
  Rule out;
  for (size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e], hi = edges[e + 1];
    if (hi <= lo) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double u = lo + p * h, mid = u + 0.5 * h;
      for (int i = 0; i < order; ++i) {
        out.nodes.push_back(mid + 0.5 * h * g.nodes[i]);
        out.weights.push_back(0.5 * h * g.weights[i]);
      }
    }
  }
  return out;
}

}  // namespace focklab::quad
