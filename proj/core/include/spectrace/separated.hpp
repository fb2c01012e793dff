#pragma once

/// Spectra of -Laplace + q on surfaces of revolution by separation of
/// variables. With x = cos(theta) and the metric profile h(x) (the round
/// sphere is h = 0), each azimuthal mode m solves the self-adjoint
/// Sturm-Liouville problem
///
///   -d/dx( (1-x^2)/(1+h) f' ) + (1+h) (m^2/(1-x^2) + q) f = lambda (1+h) f
///
/// on [-1, 1] with natural degenerate endpoints (the flux coefficient
/// vanishes there, so no boundary condition is imposed). Two independent
/// discretizations are provided:
///
///  - galerkin_legendre (production): expansion in normalized associated
///    Legendre functions, generalized symmetric eigenproblem; spectrally
///    accurate for analytic profiles.
///  - fd_divergence (reference): cell-centered finite differences in
///    divergence form, flux coefficient at half-points, symmetrized by the
///    diagonal weight; second-order in 1/n_grid (and exact at m = 0).

#include "spectrace/clusters.hpp"
#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"

#include <vector>

namespace spectrace {

enum class SeparatedBackend {
    galerkin_legendre,
    fd_divergence,
};

struct SeparatedOptions {
    SeparatedBackend backend = SeparatedBackend::galerkin_legendre;
    /// Galerkin basis functions per mode; 0 = requested count + 20 buffer.
    int n_basis = 0;
    /// Finite-difference cells (fd backend only); spec floor is 200.
    int n_grid = 800;
    /// Gauss-Legendre order for Galerkin assembly; 0 = automatic.
    int quad_order = 0;
    int threads = 0;
};

/// Lowest `count` eigenvalues of azimuthal mode m (m >= 0), ascending.
/// Requires a profile metric and a zonal (or zero) potential.
std::vector<double> separated_mode_eigenvalues(const MetricPatch& metric, const ScalarField& q,
                                               int m, int count,
                                               const SeparatedOptions& opts = {});

/// Full clustered spectrum up to cluster k_cap: modes m = 0..k_cap solved
/// independently (in parallel, merged deterministically in m order), each
/// m > 0 eigenvalue counted twice for the two azimuthal signs. Cluster sizes
/// 2k+1 are validated for every k <= k_cap.
ClusteredSpectrum separated_spectrum(const MetricPatch& metric, const ScalarField& q, int k_cap,
                                     const SeparatedOptions& opts = {});

} // namespace spectrace
