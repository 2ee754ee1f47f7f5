#pragma once

#include <vector>

namespace focklab::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for weight exp(-x^2), from the Jacobi matrix eigenproblem.
Rule gauss_hermite(int n);

// Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// Composite Gauss-Legendre on [a, b] split at `breaks`, panels no wider than `width`.
Rule composite_legendre(double a, double b, const std::vector<double>& breaks, double width,
                        int order);

}  // namespace focklab::quad
