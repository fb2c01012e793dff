#pragma once

/// Galerkin spectra of -Laplace + q on the round sphere in the orthonormal
/// real spherical-harmonic basis. The operator matrix is D + Q with
/// D = diag(l(l+1)) and Q_{(lm),(l'm')} = integral of Y_lm * q * Y_l'm' over
/// the sphere, evaluated by product quadrature exact to the combined band
/// limit. For a zonal potential the matrix block-diagonalizes by azimuthal
/// order m and each block is banded with the potential's Legendre bandwidth
/// (tridiagonal for a degree-1 potential); the general path assembles one
/// dense symmetric matrix.

#include "spectrace/clusters.hpp"
#include "spectrace/scalar_field.hpp"

namespace spectrace {

/// Eigenvalues of the truncated operator, grouped into clusters. The top of
/// the computed spectrum is polluted by truncation over roughly the
/// potential's bandwidth; k_max_reliable = L_max - band - 4 marks the
/// trustworthy range. Zonal potentials solve per-m blocks in parallel and
/// merge deterministically; results are bit-identical for any thread count.
///
/// Throws InvalidArgumentError for L_max < 8 or a potential whose measured
/// bandwidth leaves no reliable clusters, and DiscretizationError if the
/// assembled matrix loses symmetry beyond 1e-10.
ClusteredSpectrum sphere_galerkin(const ScalarField& q, int L_max, int threads = 0);

/// Matrix element 2*pi * integral over [-1,1] of P~_lm(x) g(x) P~_l'm(x) dx
/// of a zonal potential between normalized associated Legendre functions,
/// by Gauss-Legendre quadrature of the given order. This is the quantity the
/// zonal Galerkin blocks are built from, exposed so independent oracles can
/// check single entries (e.g. the degree-1 element against its closed form).
double zonal_matrix_element(const ScalarField& q, int l, int lp, int m, int quad_order);

} // namespace spectrace
