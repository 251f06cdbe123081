#pragma once

#include <vector>

namespace tracelab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [lo, hi].
QuadratureRule gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

}  // namespace tracelab
