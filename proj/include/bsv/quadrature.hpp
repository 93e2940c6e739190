#pragma once

#include <vector>

namespace bsv {

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on (a, b). Nodes are strictly increasing
/// and interior; the rule integrates polynomials up to degree 2n-1 exactly.
Quadrature gauss_legendre(int n, double a, double b);

} // namespace bsv
