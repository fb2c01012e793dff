#include "spectrace/surface_integral.hpp"

#include "spectrace/error.hpp"
#include "spectrace/parallel.hpp"
#include "spectrace/quadrature.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// One tensor-level evaluation at fixed orders. Parallel over x nodes with a
/// deterministic (index-ordered) final reduction.
double level_value(const MetricPatch& metric, const ScalarField& field, int n_x, int n_phi) {
    const QuadratureRule gl = gauss_legendre(n_x, -1.0, 1.0);
    const bool profile = metric.has_profile();
    const RevolutionProfile* pr = profile ? &metric.profile() : nullptr;
    std::vector<double> slot(static_cast<std::size_t>(n_x), 0.0);
    parallel_for(n_x, [&](std::size_t i) {
        const double x = gl.nodes[i];
        const double theta = std::acos(x);
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - x * x));
        double row = 0;
        if (n_phi == 1) {
            // zonal fast path: the phi factor is exactly 2 pi
            const double w = pr ? (1.0 + pr->p(x))
                                : std::sqrt(metric.jet(theta, 0.0).det()) / sin_theta;
            row = 2 * kPi * field.value(theta, 0.0) * w;
        } else {
            const double dphi = 2 * kPi / n_phi;
            for (int k = 0; k < n_phi; ++k) {
                const double phi = dphi * k;
                const double w = pr ? (1.0 + pr->p(x))
                                    : std::sqrt(metric.jet(theta, phi).det()) / sin_theta;
                row += field.value(theta, phi) * w;
            }
            row *= dphi;
        }
        slot[i] = gl.weights[i] * row;
    });
    double total = 0;
    for (double v : slot)
        total += v;
    return total;
}

} // namespace

SurfaceIntegralResult integrate_scalar_detailed(const MetricPatch& metric,
                                                const ScalarField& field, double tol) {
    if (!(tol > 0) || tol < 1e-14)
        throw InvalidArgumentError(
            fmt::format("integrate_scalar: tol = {:.3e} outside (1e-14, inf)", tol));
    const bool zonal_path = field.zonal() && metric.has_profile();
    int n_x = 32;
    // Band-limited fields need enough azimuthal nodes from the start for the
    // periodic trapezoid rule to be exact in phi.
    int n_phi = zonal_path ? 1 : std::max(24, 2 * std::max(0, field.band()) + 4);
    double prev = level_value(metric, field, n_x, n_phi);
    double last_delta = 0;
    constexpr int kMaxOrderX = 2048;
    while (n_x < kMaxOrderX) {
        const int next_x = 2 * n_x;
        const int next_phi = zonal_path ? 1 : 2 * n_phi;
        const double cur = level_value(metric, field, next_x, next_phi);
        last_delta = std::abs(cur - prev);
        if (last_delta <= tol * std::max(1.0, std::abs(cur)))
            return {cur, last_delta, next_x, next_phi};
        prev = cur;
        n_x = next_x;
        n_phi = next_phi;
    }
    throw QuadratureFailureError(
        fmt::format("integrate_scalar: no convergence to tol = {:.3e} at order {} in x "
                    "(field '{}'); last refinement delta {:.3e}",
                    tol, kMaxOrderX, field.description(), last_delta));
}

double integrate_scalar(const MetricPatch& metric, const ScalarField& field, double tol) {
    return integrate_scalar_detailed(metric, field, tol).value;
}

double surface_area(const MetricPatch& metric, double tol) {
    return integrate_scalar(metric, ScalarField::constant(1.0), tol);
}

} // namespace spectrace
