#pragma once

#include <vector>

namespace spectrace {

/// Nodes and weights of a quadrature rule on the interval [a, b].
/// Invariants: all weights are positive, node count equals weight count, and
/// the weights sum to b - a (exactness for the constant function).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = -1.0;
    double b = 1.0;

    int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule on [a, b]: integrates polynomials of degree
/// <= 2n-1 exactly (to ~1e-14 relative). Nodes are the roots of P_n found by
/// Newton iteration on the three-term recurrence, then affinely mapped.
/// Throws InvalidArgumentError for n < 1 or a >= b.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// n-point uniform rule for 2pi-periodic integrands on [0, 2pi): nodes at
/// j*2pi/n, all weights 2pi/n. Spectrally accurate for smooth periodic
/// integrands; exact for trigonometric polynomials of degree < n.
QuadratureRule periodic_uniform(int n);

} // namespace spectrace
