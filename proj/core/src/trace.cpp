#include "spectrace/trace.hpp"

#include "spectrace/error.hpp"
#include "spectrace/curvature.hpp"
#include "spectrace/galerkin.hpp"
#include "spectrace/surface_integral.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_round(const MetricPatch& metric) {
    return metric.has_profile() && metric.profile().family == "round";
}

std::string metric_label(const MetricPatch& metric) {
    if (!metric.has_profile())
        return metric.chart_id();
    const RevolutionProfile& prof = metric.profile();
    if (prof.family == "round")
        return "round";
    return fmt::format("{}:eps={:.6g}", prof.family, prof.eps);
}

} // namespace

SubtractionConstants subtraction_constants(const MetricPatch& metric, const ScalarField& q,
                                           GammaConvention gamma) {
    SubtractionConstants out;
    out.f = heat_coefficients_from_zeta(metric, q, HeatKind::F, gamma);
    out.l = heat_coefficients_from_zeta(metric, q, HeatKind::L, gamma);
    out.m = heat_coefficients_from_zeta(metric, q, HeatKind::M, gamma);
    out.a0 = (out.f.h1 - out.l.h1) / out.f.h0;
    out.b0 = (out.l.h1 - out.m.h1) / out.l.h0;
    out.c0 = out.a0 + out.b0;
    return out;
}

TraceGeometry make_trace_geometry(const MetricPatch& metric, const LiouvilleOptions& liouville) {
    TraceGeometry geom;
    geom.area = surface_area(metric);
    geom.curvature_integral = curvature_zeta_integral(metric);
    geom.l1 = integrate_scalar(metric, curvature_field(metric)) / (12.0 * kPi);
    if (!is_round(metric)) {
        const LiouvilleResult sigma = liouville_sigma_mean_square(metric, liouville);
        geom.v2_sigma = sigma.v2;
        geom.v2_sigma_error = sigma.error_estimate;
    }
    // On the round sphere the curvature is the constant 1, the symbol
    // vanishes identically, and its mean square is exactly zero.
    return geom;
}

TheoremRhs theorem_rhs(const MetricPatch& metric, const ScalarField& q,
                       const TraceGeometry* shared, const LiouvilleOptions& liouville,
                       GammaConvention gamma) {
    TraceGeometry local;
    if (shared == nullptr) {
        local = make_trace_geometry(metric, liouville);
        shared = &local;
    }

    TheoremRhs out;
    if (!q.is_zero()) {
        const LiouvilleResult v2q = liouville_mean_square(metric, q, liouville);
        out.v2_q_half = v2q.v2 / 2.0;
        out.v2_q_error = v2q.error_estimate / 2.0;
    }
    out.v2_sigma_half = shared->v2_sigma / 2.0;
    out.v2_sigma_error = shared->v2_sigma_error / 2.0;
    out.f2_term = 1.0 / 15.0;
    out.curvature_term = -shared->curvature_integral / (60.0 * kPi);
    out.potential_term = -potential_zeta_integral(metric, q, gamma) / (24.0 * kPi);
    out.total = out.v2_q_half + out.v2_sigma_half + out.f2_term + out.curvature_term +
                out.potential_term;

    // Diagnostic variant with the extra -b0 * l1 subtraction; b0 reduces to
    // mean(q) because the heat coefficients are linear in the potential.
    const double b0 = q.is_zero() ? 0.0 : integrate_scalar(metric, q) / shared->area;
    out.alt_total = out.total - b0 * shared->l1;
    return out;
}

TraceReport verify_trace(const MetricPatch& metric, const ScalarField& q,
                         const TraceOptions& opts) {
    if (!metric.has_profile() || !metric.profile().closes_geodesics)
        throw InvalidArgumentError(
            "verify_trace: the trace identity is defined on metrics certified to close all "
            "geodesics at length 2*pi (round or the closing profile families)");

    TraceReport report;
    report.metric_id = metric_label(metric);
    report.potential_id = q.description();

    ClusteredSpectrum spectrum;
    if (is_round(metric)) {
        spectrum = sphere_galerkin(q, opts.l_max, opts.threads);
    } else {
        SeparatedOptions sep = opts.separated;
        if (sep.threads == 0)
            sep.threads = opts.threads;
        spectrum = separated_spectrum(metric, q, opts.k_cap, sep);
    }
    report.solver_provenance = spectrum.provenance;
    report.k_max_reliable = spectrum.k_max_reliable;

    report.constants = subtraction_constants(metric, q, opts.gamma);

    report.sums = regularized_partial_sums(spectrum, report.constants.c0);
    report.partial_limit = extrapolate_partial_sums(report.sums);

    const std::vector<double> abel_grid = opts.abel_grid.empty()
                                              ? abel_default_grid(spectrum.k_max_reliable)
                                              : opts.abel_grid;
    // One spectrum-level evaluation at the smallest t certifies the depth for
    // the whole grid; the remaining points reuse the deficit list.
    (void)abel_sum(spectrum, report.constants.c0, abel_grid.front());
    report.abel_samples.reserve(abel_grid.size());
    for (double t : abel_grid)
        report.abel_samples.emplace_back(t, abel_sum(report.sums.deficits, t));
    report.abel_limit = abel_extrapolate(report.abel_samples);
    report.lhs = report.abel_limit.limit;

    const std::vector<double> heat_grid =
        !opts.heat_grid.empty() ? opts.heat_grid
                                : certified_heat_grid(spectrum, is_round(metric));
    report.heat_fit = fit_heat_coefficients(spectrum, heat_grid, HeatKind::M, opts.threads);

    LiouvilleOptions liouville = opts.liouville;
    if (liouville.threads == 0)
        liouville.threads = opts.threads;
    const TraceGeometry geom = make_trace_geometry(metric, liouville);
    report.rhs = theorem_rhs(metric, q, &geom, liouville, opts.gamma);

    report.discrepancy = std::abs(report.lhs - report.rhs.total);
    report.discrepancy_alt = std::abs(report.lhs - report.rhs.alt_total);
    report.method_agreement = std::abs(report.abel_limit.limit - report.partial_limit.limit);
    return report;
}

std::vector<double> default_heat_grid(bool round_metric) {
    return round_metric ? geometric_grid(1e-3, 8e-3, 12) : geometric_grid(7.5e-3, 6e-2, 12);
}

std::vector<double> certified_heat_grid(const ClusteredSpectrum& spectrum,
                                        bool round_metric) {
    double lo = round_metric ? 1e-3 : 7.5e-3;
    double hi = round_metric ? 8e-3 : 6e-2;
    const double floor = 1.02 * theta_min_usable_t(spectrum);
    if (floor > lo) {
        lo = floor;
        hi = std::max(hi, 8.0 * lo);
    }
    return geometric_grid(lo, hi, 12);
}

} // namespace spectrace
