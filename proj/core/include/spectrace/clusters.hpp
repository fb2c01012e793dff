#pragma once

/// Cluster bookkeeping for spectra of -Laplace + q on metrics all of whose
/// geodesics close at length 2*pi. Eigenvalues of such operators organize into
/// groups ("clusters") around the reference values k(k+1) with multiplicity
/// 2k+1; everything downstream (regularized sums, theta functions, cluster
/// moments) consumes the grouped form.

#include <map>
#include <string>
#include <vector>

namespace spectrace {

struct ClusteredSpectrum {
    /// k -> ascending eigenvalues of cluster k.
    std::map<int, std::vector<double>> clusters;
    /// Largest k whose cluster content is unaffected by truncation. Clusters
    /// above this index may be partially filled and must not be consumed.
    int k_max_reliable = -1;
    /// Human-readable solver id + truncation, e.g. "sphere-galerkin L=240 band=1".
    std::string provenance;

    /// All eigenvalues with k <= k_max_reliable, ascending.
    std::vector<double> reliable_flat() const;
    /// Largest k present in the map (complete or not).
    int k_top() const;
};

/// Group a sorted eigenvalue list into clusters by nearest k(k+1) and validate
/// that every cluster with k <= k_cap has exactly 2k+1 members. Assignment is
/// k = round((-1 + sqrt(1 + 4*(lambda - shift))) / 2), clamped at 0, which maps
/// lambda to the nearest reference value after removing the bulk displacement
/// `shift`. Pass the potential's metric mean as the shift: the clusters sit at
/// k(k+1) + mean(q) + O(1/k), so a potential with |mean| >= 3/4 pushes the low
/// clusters across the bare rounding boundaries. Clusters above k_cap are kept
/// but are not validated (they are normally truncation-polluted).
///
/// Throws ClusterIntegrityError naming the offending k if a validated cluster
/// has the wrong size, and InvalidArgumentError if the input is not sorted.
ClusteredSpectrum assemble_clusters(const std::vector<double>& eigenvalues, int k_cap,
                                    const std::string& provenance = "", double shift = 0.0);

struct ClusterMoments {
    int k = 0;
    double sum_shift = 0.0;    ///< sum_i (lambda_ki - reference_ki)
    double mean_shift = 0.0;   ///< sum_shift / (2k+1)
    double sum_sq_shift = 0.0; ///< sum_i (lambda_ki - reference_ki)^2
};

/// Per-cluster moments of the shifts against the exact reference k(k+1).
/// Only clusters with k <= k_max_reliable are reported; exact finite sums,
/// no asymptotics.
std::vector<ClusterMoments> cluster_statistics(const ClusteredSpectrum& spectrum);

/// Per-cluster moments of spectrum against a second spectrum, matched by
/// (k, sorted index within the cluster). Throws InvalidArgumentError if the
/// common reliable clusters have mismatched sizes.
std::vector<ClusterMoments> cluster_statistics(const ClusteredSpectrum& spectrum,
                                               const ClusteredSpectrum& reference);

} // namespace spectrace
