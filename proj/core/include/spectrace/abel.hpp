#pragma once

/// Regularized trace sums over clustered spectra: per-cluster deficits,
/// running partial sums with 1/K extrapolation, and Abel (exponentially
/// weighted) sums with quadratic-in-t extrapolation to t = 0.

#include "spectrace/clusters.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spectrace {

/// Per-cluster deficits d_k = (sum_i mu_ki) - k(k+1)(2k+1) - c0(2k+1) and the
/// running sums S_K = sum_{k <= K} d_k, both indexed by k starting at 0.
struct RegularizedSums {
    std::vector<double> deficits;
    std::vector<double> partial_sums;
    double c0 = 0.0;
};

/// Deficits and partial sums for all reliable clusters k <= K_max (K_max = -1
/// means the full reliable range). Requires complete clusters, which the
/// ClusteredSpectrum invariant guarantees below k_max_reliable.
RegularizedSums regularized_partial_sums(const ClusteredSpectrum& mu, double c0,
                                         int K_max = -1);

/// Extrapolated limit of a sampled series with its fit diagnostics. `ok` is
/// false when the fit residual exceeds the threshold; the limit is still
/// reported so callers can decide what to do with a poor fit.
struct SeriesLimit {
    double limit = 0.0;
    std::vector<double> coefficients;
    double residual = 0.0;
    double threshold = 0.0;
    bool ok = false;
    std::string model_id;
};

/// Fit S + gamma/K to the partial-sum tail K = k_lo..end (k_lo = -1 selects
/// max(4, half the range)); threshold 1e-4 * max(1, max |S_K|).
SeriesLimit extrapolate_partial_sums(const RegularizedSums& sums, int k_lo = -1);

/// Abel sum G(t) = sum_k d_k exp(-k(k+1) t) over an explicit deficit list
/// (index = k). No truncation certification: the caller owns the list.
double abel_sum(std::span<const double> deficits, double t);

/// Abel sum over the reliable clusters of a spectrum, with the truncated
/// tail certified against the integral bound; throws TailBoundError (with
/// the smallest usable t) when the spectrum is too shallow for the given t.
double abel_sum(const ClusteredSpectrum& mu, double c0, double t);

/// Fit S + alpha*t + beta*t^2 to (t, G(t)) samples and report the t -> 0
/// limit; threshold 1e-5 * max(1, max |G|).
SeriesLimit abel_extrapolate(std::span<const std::pair<double, double>> samples);

/// Geometric 12-point grid on [t_min, 8 t_min] with t_min = 33 / (K(K+1)),
/// the smallest t the integral tail bound certifies at spectrum depth K.
std::vector<double> abel_default_grid(int k_max);

} // namespace spectrace
