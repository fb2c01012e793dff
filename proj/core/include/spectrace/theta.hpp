#pragma once

/// Heat-trace sums theta(t) = sum over the spectrum of exp(-lambda * t) with
/// certified truncation control, and least-squares extraction of the small-t
/// coefficients h0/t + h1 + h2*t.

#include "spectrace/clusters.hpp"
#include "spectrace/zeta.hpp"

#include <vector>

namespace spectrace {

/// Sum of exp(-lambda t) over all reliable clusters (k <= k_max_reliable),
/// accumulated in ascending (k, i) order for bit-stable results. The
/// truncated tail is bounded by exp(Bt) * exp(-K(K+1)t) / t with
/// K = k_max_reliable and B the largest observed |lambda - k(k+1)|; the
/// bound must stay below 1e-14 * max(1, theta), else TailBoundError is
/// thrown carrying the smallest usable t for this spectrum depth.
double theta_eval(const ClusteredSpectrum& spectrum, double t);

/// The smallest t that theta_eval can certify for this spectrum's depth
/// (smaller t would leave a truncation tail above the 1e-14 relative bound).
double theta_min_usable_t(const ClusteredSpectrum& spectrum);

/// Exact closed-spectrum reference {k(k+1) with multiplicity 2k+1}, k <= k_max.
ClusteredSpectrum round_exact_spectrum(int k_max);

/// Geometric grid of n points from t_lo to t_hi inclusive (n >= 2).
std::vector<double> geometric_grid(double t_lo, double t_hi, int n);

struct HeatFit {
    HeatCoefficients coefficients;
    /// RMS residual of the fit in the transformed (t * theta) space.
    double residual = 0.0;
    /// Residual threshold that was applied: 1e-4 * max(1, max |t * theta|).
    double threshold = 0.0;
    /// True when the residual exceeds the threshold: the sampled curve is not
    /// well described by h0/t + h1 + h2*t on this grid, so h2 in particular
    /// should not be trusted.
    bool asymptote_warning = false;
};

/// Fit h0/t + h1 + h2*t to theta samples on the given grid (which must span
/// a factor >= 8). Theta evaluations parallelize over grid points; the fit
/// itself is deterministic.
HeatFit fit_heat_coefficients(const ClusteredSpectrum& spectrum,
                              const std::vector<double>& t_grid,
                              HeatKind which = HeatKind::L, int threads = 0);

} // namespace spectrace
