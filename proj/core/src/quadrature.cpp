#include "spectrace/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spectrace/error.hpp"

namespace spectrace {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw InvalidArgumentError(fmt::format("gauss_legendre: n must be >= 1, got {}", n));
    if (!(a < b)) throw InvalidArgumentError(fmt::format("gauss_legendre: need a < b, got [{}, {}]", a, b));

    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    // Roots of P_n on (-1, 1), symmetric about 0; solve the upper half by
    // Newton iteration seeded with the Chebyshev-like asymptotic estimate.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // One clean-up evaluation for the weight at the converged node.
        double p0 = 1.0, p1 = x;
        for (int l = 2; l <= n; ++l) {
            const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);

        const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
        rule.nodes[i] = mid - rad * x;       // ascending order: most negative root first
        rule.nodes[n - 1 - i] = mid + rad * x;
        rule.weights[i] = rad * w;
        rule.weights[n - 1 - i] = rad * w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.5 * (a + b);
    return rule;
}

QuadratureRule periodic_uniform(int n) {
    if (n < 1) throw InvalidArgumentError(fmt::format("periodic_uniform: n must be >= 1, got {}", n));
    QuadratureRule rule;
    rule.a = 0.0;
    rule.b = 2.0 * std::numbers::pi;
    rule.nodes.resize(n);
    rule.weights.assign(n, 2.0 * std::numbers::pi / n);
    for (int j = 0; j < n; ++j) rule.nodes[j] = 2.0 * std::numbers::pi * j / n;
    return rule;
}

} // namespace spectrace
