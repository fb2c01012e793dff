#pragma once

#include "spectrace/flow.hpp"

namespace spectrace {

/// Fundamental solutions of the scalar Jacobi equation y'' + K(gamma(r)) y = 0
/// along a geodesic, sampled on the path's arc-length grid. Initial data is
/// the identity matrix: (u, u')(0) = (1, 0), (v, v')(0) = (0, 1). The
/// geodesic-polar volume density is j(r) := v(r) (in two dimensions the
/// density dvol = J dr with J(0) = 0, J'(0) = 1 forces J = v).
struct JacobiData {
    std::vector<double> r;
    std::vector<double> u, du;
    std::vector<double> v, dv;
    std::vector<double> j;
    double wronskian_drift = 0; ///< max |u v' - u' v - 1| over the samples
};

/// A geodesic and its Jacobi data from one joint 8-dimensional integration
/// (the curvature is evaluated at the exact current geodesic point, never
/// interpolated between samples).
struct JacobiFlow {
    GeodesicPath path;
    JacobiData jacobi;
};

JacobiFlow jacobi_flow(const GeodesicSystem& system, const PhasePoint& start, double length,
                       const FlowOptions& opts = {});

/// Jacobi data along an existing path, re-integrated jointly from the path's
/// start over the same sample grid.
JacobiData jacobi_solve(const MetricPatch& metric, const GeodesicPath& path,
                        const FlowOptions& opts = {});

} // namespace spectrace
