#include "dmnls/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <stdexcept>

namespace dmnls {

QuadratureRule gauss_legendre(std::size_t m) {
  if (m == 0) throw std::invalid_argument("quadrature needs at least one node");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(m);
  if (table == nullptr) throw std::runtime_error("quadrature table allocation failed");
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (std::size_t q = 0; q < m; ++q) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, q, &x, &w, table);
    rule.nodes[q] = x;
    rule.weights[q] = w;
  }
  gsl_integration_glfixed_table_free(table);
  return rule;
}

}  // namespace dmnls
