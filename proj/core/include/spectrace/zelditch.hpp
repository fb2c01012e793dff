#pragma once

#include "spectrace/flow.hpp"
#include "spectrace/jacobi.hpp"
#include "spectrace/scalar_field.hpp"

#include <functional>

namespace spectrace {

/// The geodesic-invariant symbol
///   sigma(r) = 1/4 ( K(gamma(r)) - 1
///              + 1/3 (K)_v(r) u(r)^3 I1(r) - (K)_v(r) u(r)^2 J(r) I2(r) ),
///   I1(r) = integral_0^r (K)_v J^3 ds,  I2(r) = integral_0^r (K)_v u J^2 ds,
/// with (K)_v the unit-normal curvature derivative, (u, J) the Jacobi
/// solutions, and the nested integrals accumulated by cumulative trapezoid on
/// the path's native arc-length grid.
struct SigmaPath {
    GeodesicPath path;
    JacobiData jacobi;
    std::vector<double> kv;    ///< (K)_v at the samples
    std::vector<double> sigma; ///< sigma(r) at the samples
    double average = 0;        ///< periodic trapezoid mean over the closed turn
};

/// Directional derivative of the Gaussian curvature along the unit normal to
/// the geodesic at the phase point: N = (p2, -p1)/sqrt(det g) (unit and
/// g-orthogonal to the velocity), evaluated as the centered difference of
/// gauss_curvature at +-step along N in chart coordinates.
double normal_curvature_derivative(const GeodesicSystem& system, const PhasePoint& p,
                                   double step = 1e-5);

/// Same at arc length r of an existing path (phase point linearly
/// interpolated between the bracketing samples when they share a chart,
/// otherwise the nearer sample is used).
double normal_curvature_derivative(const MetricPatch& metric, const GeodesicPath& path, double r,
                                   double step = 1e-5);

/// Integrates the closed geodesic through `start` over one full turn and
/// assembles sigma. Refuses (ClosureError) unless the path closes within
/// 1e-6 in ambient phase space: the formula presumes the all-geodesics-closed
/// structure.
SigmaPath zelditch_sigma(const MetricPatch& metric, const PhasePoint& start,
                         const FlowOptions& opts = {});

/// Same against an existing GeodesicSystem (avoids rebuilding the rotated
/// chart when sigma is evaluated at many fiber points).
SigmaPath zelditch_sigma(const GeodesicSystem& system, const PhasePoint& start,
                         const FlowOptions& opts = {});

/// (1/2pi) integral_0^{2pi} f(flow_t(start)) dt by the periodic trapezoid
/// rule on the dense path; f is evaluated at the chart-0 coordinates of each
/// sample. Throws ClosureError when the orbit does not close within 1e-6.
double flow_average(const MetricPatch& metric, const ScalarField& f, const PhasePoint& start,
                    const FlowOptions& opts = {});

/// Same for a function given directly on phase points (fields on the
/// cosphere bundle).
double flow_average(const MetricPatch& metric,
                    const std::function<double(const GeodesicSystem&, const PhasePoint&)>& f,
                    const PhasePoint& start, const FlowOptions& opts = {});

} // namespace spectrace
