#pragma once

#include <functional>
#include <vector>

namespace dd {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule (n >= 1), cached per order.
const GaussRule& gauss_legendre(int n);

/// Point of a tensor Gauss rule on the unit square split into ns x ns subcells.
struct CellPoint {
    double s;
    double t;
    double w;  ///< weight on the unit square (weights sum to 1)
};

/// order x order Gauss points per subcell, ns x ns subcells.
std::vector<CellPoint> cell_rule(int order, int ns);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels,
                           int order = 8);

}  // namespace dd
