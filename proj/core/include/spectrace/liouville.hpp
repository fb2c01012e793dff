#pragma once

#include "spectrace/flow.hpp"
#include "spectrace/scalar_field.hpp"

#include <vector>

namespace spectrace {

struct LiouvilleOptions {
    int fiber_count = 24;       ///< uniform direction angles per base point
    int order_x = 32;           ///< Gauss-Legendre order in x = cos theta
    int phi_count = 48;         ///< uniform azimuthal base points
    double flow_tol = 1e-11;    ///< per-step tolerance of the underlying flows
    int samples_per_turn = 2048;
    bool with_error_estimate = true; ///< recompute on the halved grid
    int threads = 0;                 ///< 0 = process default
};

struct LiouvilleResult {
    double v2 = 0;             ///< normalized Liouville mean of (f^av)^2
    double error_estimate = 0; ///< |full grid - half grid| (0 when disabled)
};

/// Normalized Liouville mean square of the flow average:
///   V2 = (1/vol S*M) integral_{S*M} (f^av)^2 dLiouville,
/// by tensor quadrature over base points x fiber angles with the geodesic
/// flow average at every node. The Liouville measure is area x fiber arc
/// length (the direction-angle lift is fiber unit-speed). On surfaces of
/// revolution the azimuthal factor collapses by the rotation isometry: paths
/// are integrated at phi = 0 only and rotated analytically, so the phi grid
/// costs field evaluations, not flows. The trace-formula term built from this
/// quantity is V2/2 throughout the library.
LiouvilleResult liouville_mean_square(const MetricPatch& metric, const ScalarField& f,
                                      const LiouvilleOptions& opts = {});

/// Batch variant sharing every geodesic across the fields (the flows
/// dominate the cost; amortize them).
std::vector<LiouvilleResult> liouville_mean_square_batch(const MetricPatch& metric,
                                                         const std::vector<ScalarField>& fields,
                                                         const LiouvilleOptions& opts = {});

/// V2 of the Zelditch symbol: the flow average comes from zelditch_sigma
/// (jacobi + normal curvature derivative along each node's geodesic) instead
/// of a pointwise field.
LiouvilleResult liouville_sigma_mean_square(const MetricPatch& metric,
                                            const LiouvilleOptions& opts = {});

} // namespace spectrace
