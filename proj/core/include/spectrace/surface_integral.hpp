#pragma once

#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"

namespace spectrace {

struct SurfaceIntegralResult {
    double value = 0;          ///< accepted integral
    double error_estimate = 0; ///< |last refinement delta|
    int order_x = 0;           ///< Gauss-Legendre order in x = cos theta at acceptance
    int order_phi = 0;         ///< uniform azimuthal points at acceptance (1 = zonal path)
};

/// Integral of a scalar field against the Riemannian area element,
///   integral f dS = int_{-1}^{1} int_0^{2pi} f(theta(x), phi)
///                   * sqrt(det g)/sin(theta) dphi dx,  x = cos theta.
/// Gauss-Legendre in x crossed with a uniform (periodic trapezoid) phi grid;
/// both orders double until successive values agree within tol relative to
/// max(1, |value|), else QuadratureFailureError. Zonal fields on revolution
/// metrics skip the phi grid entirely (the factor is exactly 2 pi).
SurfaceIntegralResult integrate_scalar_detailed(const MetricPatch& metric,
                                                const ScalarField& field, double tol = 1e-8);

/// Value-only convenience wrapper around integrate_scalar_detailed.
double integrate_scalar(const MetricPatch& metric, const ScalarField& field, double tol = 1e-8);

/// Total surface area (integral of 1 dS).
double surface_area(const MetricPatch& metric, double tol = 1e-8);

} // namespace spectrace
