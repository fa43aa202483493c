#pragma once

#include <cstddef>
#include <vector>

namespace dmnls {

/// Gauss-Legendre rule on [0, 1]: exact for polynomials of degree 2m - 1.
struct QuadratureRule {
  std::vector<double> nodes;    // ascending, inside (0, 1)
  std::vector<double> weights;  // positive, summing to 1

  std::size_t size() const { return nodes.size(); }
};

QuadratureRule gauss_legendre(std::size_t m);

}  // namespace dmnls
