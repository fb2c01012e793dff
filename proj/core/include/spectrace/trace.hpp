#pragma once

/// Assembly and verification of the regularized trace identity: the
/// eigenvalue side (partial sums and Abel extrapolation of the per-cluster
/// deficits) against the geometric side (Liouville mean squares, the
/// universal 1/15, and the two zeta(1) surface integrals).

#include "spectrace/abel.hpp"
#include "spectrace/clusters.hpp"
#include "spectrace/liouville.hpp"
#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"
#include "spectrace/separated.hpp"
#include "spectrace/theta.hpp"
#include "spectrace/zeta.hpp"

#include <string>
#include <utility>
#include <vector>

namespace spectrace {

/// The spectral subtraction constants, from the zeta pipeline:
///   a0 = (f1 - l1) / f0  (zero for every metric of total curvature 4pi)
///   b0 = (l1 - m1) / l0  (the mean of q)
///   c0 = a0 + b0         (subtracted per eigenvalue in the regularized sums)
struct SubtractionConstants {
    double a0 = 0.0, b0 = 0.0, c0 = 0.0;
    HeatCoefficients f, l, m;
};

SubtractionConstants
subtraction_constants(const MetricPatch& metric, const ScalarField& q,
                      GammaConvention gamma = GammaConvention::curvature_minus_one);

/// Potential-independent geometric quantities, precomputable once per metric
/// and shared across theorem evaluations (the flow-average mean square of
/// the symbol is by far the most expensive RHS ingredient).
struct TraceGeometry {
    double v2_sigma = 0.0;
    double v2_sigma_error = 0.0;
    double curvature_integral = 0.0; ///< integral (Delta K + K^2) dS
    double area = 0.0;
    double l1 = 0.0; ///< zeta(0) of the bare Laplacian = (1/12pi) integral K dS
};

TraceGeometry make_trace_geometry(const MetricPatch& metric,
                                  const LiouvilleOptions& liouville = {});

/// The geometric side, itemized. total = v2_q_half + v2_sigma_half + f2_term
/// + curvature_term + potential_term, exactly (the items are the addends).
/// alt_total additionally subtracts b0 * l1 -- a diagnostic variant of the
/// identity that is reported alongside but is NOT the verification target
/// (the constant-potential consistency check singles out `total`).
struct TheoremRhs {
    double v2_q_half = 0.0;
    double v2_sigma_half = 0.0;
    double f2_term = 1.0 / 15.0;
    double curvature_term = 0.0; ///< -(1/60pi) integral (Delta K + K^2) dS
    double potential_term = 0.0; ///< -(1/24pi) integral (-Delta q + 3q^2 - 2q gamma) dS
    double total = 0.0;
    double alt_total = 0.0;
    double v2_q_error = 0.0;
    double v2_sigma_error = 0.0;
};

/// Assemble the geometric side. On the round sphere the symbol term is
/// exactly zero (constant curvature) and is not recomputed. Pass a
/// TraceGeometry to reuse flow results across potentials on one metric.
TheoremRhs theorem_rhs(const MetricPatch& metric, const ScalarField& q,
                       const TraceGeometry* shared = nullptr,
                       const LiouvilleOptions& liouville = {},
                       GammaConvention gamma = GammaConvention::curvature_minus_one);

struct TraceOptions {
    /// Round-sphere Galerkin truncation degree.
    int l_max = 240;
    /// Cluster cap for the separated solver on non-round profiles.
    int k_cap = 72;
    SeparatedOptions separated;
    LiouvilleOptions liouville;
    GammaConvention gamma = GammaConvention::curvature_minus_one;
    /// Abel sampling grid; empty selects the certified default for the
    /// computed spectrum depth.
    std::vector<double> abel_grid;
    /// Heat-fit grid; empty selects [1e-3, 8e-3] on the round sphere and
    /// [7.5e-3, 6e-2] otherwise (12 points, geometric).
    std::vector<double> heat_grid;
    int threads = 0;
};

struct TraceReport {
    std::string metric_id;
    std::string potential_id;
    std::string solver_provenance;
    int k_max_reliable = 0;

    SubtractionConstants constants;
    /// Heat coefficients of the computed spectrum by least squares, next to
    /// the zeta-pipeline values in `constants` (fit vs. quadrature pipelines).
    HeatFit heat_fit;

    RegularizedSums sums;
    SeriesLimit partial_limit;
    std::vector<std::pair<double, double>> abel_samples;
    SeriesLimit abel_limit;
    /// Primary eigenvalue-side value: the Abel-extrapolated limit.
    double lhs = 0.0;

    TheoremRhs rhs;
    double discrepancy = 0.0;      ///< |lhs - rhs.total|
    double discrepancy_alt = 0.0;  ///< |lhs - rhs.alt_total|
    double method_agreement = 0.0; ///< |Abel limit - partial-sum limit|
};

/// Full pipeline: spectrum -> deficits -> both extrapolations -> geometric
/// side -> discrepancies. The metric must close its geodesics (profile
/// metrics with the closure certificate); non-zonal potentials are supported
/// on the round sphere only.
TraceReport verify_trace(const MetricPatch& metric, const ScalarField& q,
                         const TraceOptions& opts = {});

/// The default heat-fit grid: [1e-3, 8e-3] on the round sphere (exact
/// spectra tolerate small t), [7.5e-3, 6e-2] otherwise (certified for
/// cluster caps near 72). 12 points, geometric.
std::vector<double> default_heat_grid(bool round_metric);

/// The family default lifted, if necessary, so every point is certified for
/// this spectrum's depth (shallow spectra push the grid to larger t, which
/// costs fit accuracy honestly rather than failing).
std::vector<double> certified_heat_grid(const ClusteredSpectrum& spectrum,
                                        bool round_metric);

} // namespace spectrace
