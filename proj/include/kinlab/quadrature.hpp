#pragma once

#include <vector>

namespace kinlab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` nodes mapped onto [a, b], nodes ascending.
QuadratureRule gauss_legendre(int order, double a, double b);

/// Composite Gauss-Legendre rule on [a, b] with panels no longer than `max_panel`.
QuadratureRule composite_gauss_legendre(int order, double a, double b, double max_panel);

}  // namespace kinlab
