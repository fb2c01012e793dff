#include "spectrace/liouville.hpp"

#include "spectrace/error.hpp"
#include "spectrace/parallel.hpp"
#include "spectrace/quadrature.hpp"
#include "spectrace/zelditch.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_closed(const GeodesicPath& path, double theta, double alpha) {
    if (!(path.closure_residual < 1e-6))
        throw ClosureError(fmt::format(
            "liouville_mean_square: geodesic through (theta = {:.6g}, alpha = {:.6g}) does "
            "not close within 1e-6 (residual = {:.3e}); the normalized mean square is defined "
            "on all-geodesics-closed metrics only",
            theta, alpha, path.closure_residual));
}

/// Periodic trapezoid mean of f over the closed path, at a sample stride that
/// keeps the rule exact: on the round sphere a band-limited field restricted
/// to a great circle is a trigonometric polynomial of its band degree, so a
/// coarse power-of-two subgrid loses nothing. Elsewhere the full grid is used.
int field_stride(bool round_metric, const ScalarField& f, int count) {
    if (!round_metric || f.band() < 0)
        return 1;
    const int target = std::max(64, 4 * f.band() + 16);
    int stride = 1;
    while (count % (2 * stride) == 0 && count / (2 * stride) >= target)
        stride *= 2;
    return stride;
}

double path_mean(const std::vector<double>& theta_s, const std::vector<double>& phi_s,
                 const ScalarField& f, double dphi, int stride) {
    const int count = static_cast<int>(theta_s.size()) - 1;
    double sum = 0.5 * (f.value(theta_s[0], phi_s[0] + dphi) +
                        f.value(theta_s[count], phi_s[count] + dphi));
    for (int s = stride; s < count; s += stride)
        sum += f.value(theta_s[s], phi_s[s] + dphi);
    return sum / (count / stride);
}

struct GridSpec {
    QuadratureRule gl;
    int fiber = 0, nphi = 0;
};

GridSpec make_grid(const LiouvilleOptions& o) {
    if (o.fiber_count < 2 || o.order_x < 2 || o.phi_count < 1)
        throw InvalidArgumentError(
            fmt::format("liouville_mean_square: grid ({} fiber, {} x, {} phi) too small",
                        o.fiber_count, o.order_x, o.phi_count));
    return {gauss_legendre(o.order_x, -1.0, 1.0), o.fiber_count, o.phi_count};
}

/// One full-grid pass for a batch of fields (no error estimate).
std::vector<double> v2_fields_once(const MetricPatch& metric,
                                   const std::vector<ScalarField>& fields,
                                   const LiouvilleOptions& o) {
    const GridSpec grid = make_grid(o);
    const GeodesicSystem system(metric);
    const FlowOptions fo{o.flow_tol, o.samples_per_turn};
    const int nf = static_cast<int>(fields.size());
    const bool revolution = metric.has_profile();
    const bool round_metric = revolution && metric.profile().family == "round";

    // On a surface of revolution the phi direction is an isometry: integrate
    // each (x, alpha) node's geodesic once at phi = 0 and rotate the samples.
    const int n_nodes = revolution ? grid.gl.size() * grid.fiber
                                   : grid.gl.size() * grid.nphi * grid.fiber;
    std::vector<double> slot(static_cast<std::size_t>(n_nodes) * nf, 0.0);
    std::vector<double> wslot(n_nodes, 0.0);

    parallel_for(
        n_nodes,
        [&](int node) {
            int i, k, j;
            if (revolution) {
                i = node / grid.fiber;
                k = 0;
                j = node % grid.fiber;
            } else {
                i = node / (grid.nphi * grid.fiber);
                k = (node / grid.fiber) % grid.nphi;
                j = node % grid.fiber;
            }
            const double x = grid.gl.nodes[i];
            const double theta = std::acos(x);
            const double phi0 = 2 * kPi * k / grid.nphi;
            const double alpha = 2 * kPi * j / grid.fiber;

            const GeodesicPath path = system.flow(system.lift(theta, phi0, alpha), 2 * kPi, fo);
            require_closed(path, theta, alpha);

            const std::size_t n = path.samples.size();
            std::vector<double> theta_s(n), phi_s(n);
            for (std::size_t s = 0; s < n; ++s) {
                const auto tp = system.chart0_coordinates(path.samples[s]);
                theta_s[s] = tp[0];
                phi_s[s] = tp[1];
            }

            double w;
            if (revolution) {
                w = grid.gl.weights[i] * (1.0 + metric.profile().p(x));
            } else {
                const double sin_theta = std::sqrt(std::max(0.0, 1.0 - x * x));
                w = grid.gl.weights[i] *
                    std::sqrt(system.chart(0).jet(theta, phi0).det()) / sin_theta;
            }
            wslot[node] = w;

            for (int q = 0; q < nf; ++q) {
                const ScalarField& f = fields[q];
                const int stride = field_stride(round_metric, f, static_cast<int>(n) - 1);
                double mean_sq;
                if (f.zonal()) {
                    const double avg = path_mean(theta_s, phi_s, f, 0.0, stride);
                    mean_sq = avg * avg;
                } else if (revolution) {
                    double acc = 0;
                    for (int kk = 0; kk < grid.nphi; ++kk) {
                        const double avg =
                            path_mean(theta_s, phi_s, f, 2 * kPi * kk / grid.nphi, stride);
                        acc += avg * avg;
                    }
                    mean_sq = acc / grid.nphi;
                } else {
                    const double avg = path_mean(theta_s, phi_s, f, 0.0, stride);
                    mean_sq = avg * avg;
                }
                slot[static_cast<std::size_t>(node) * nf + q] = w * mean_sq;
            }
        },
        o.threads);

    double den = 0;
    for (double w : wslot)
        den += w;
    std::vector<double> v2(nf, 0.0);
    for (int node = 0; node < n_nodes; ++node)
        for (int q = 0; q < nf; ++q)
            v2[q] += slot[static_cast<std::size_t>(node) * nf + q];
    for (double& v : v2)
        v /= den;
    return v2;
}

/// One full-grid pass for the Zelditch symbol.
double v2_sigma_once(const MetricPatch& metric, const LiouvilleOptions& o) {
    const GridSpec grid = make_grid(o);
    const GeodesicSystem system(metric);
    const FlowOptions fo{o.flow_tol, o.samples_per_turn};
    const bool revolution = metric.has_profile();

    const int n_nodes = revolution ? grid.gl.size() * grid.fiber
                                   : grid.gl.size() * grid.nphi * grid.fiber;
    std::vector<double> slot(n_nodes, 0.0);
    std::vector<double> wslot(n_nodes, 0.0);

    parallel_for(
        n_nodes,
        [&](int node) {
            int i, k, j;
            if (revolution) {
                i = node / grid.fiber;
                k = 0;
                j = node % grid.fiber;
            } else {
                i = node / (grid.nphi * grid.fiber);
                k = (node / grid.fiber) % grid.nphi;
                j = node % grid.fiber;
            }
            const double x = grid.gl.nodes[i];
            const double theta = std::acos(x);
            const double phi0 = 2 * kPi * k / grid.nphi;
            const double alpha = 2 * kPi * j / grid.fiber;

            const SigmaPath sp = zelditch_sigma(system, system.lift(theta, phi0, alpha), fo);

            double w;
            if (revolution) {
                w = grid.gl.weights[i] * (1.0 + metric.profile().p(x));
            } else {
                const double sin_theta = std::sqrt(std::max(0.0, 1.0 - x * x));
                w = grid.gl.weights[i] *
                    std::sqrt(system.chart(0).jet(theta, phi0).det()) / sin_theta;
            }
            wslot[node] = w;
            slot[node] = w * sp.average * sp.average;
        },
        o.threads);

    double den = 0, num = 0;
    for (int node = 0; node < n_nodes; ++node) {
        den += wslot[node];
        num += slot[node];
    }
    return num / den;
}

LiouvilleOptions halved(const LiouvilleOptions& o) {
    LiouvilleOptions h = o;
    h.fiber_count = std::max(4, o.fiber_count / 2);
    h.order_x = std::max(4, o.order_x / 2);
    h.phi_count = std::max(4, o.phi_count / 2);
    h.with_error_estimate = false;
    return h;
}

} // namespace

std::vector<LiouvilleResult> liouville_mean_square_batch(const MetricPatch& metric,
                                                         const std::vector<ScalarField>& fields,
                                                         const LiouvilleOptions& opts) {
    if (fields.empty())
        return {};
    const std::vector<double> full = v2_fields_once(metric, fields, opts);
    std::vector<LiouvilleResult> out(fields.size());
    for (std::size_t q = 0; q < fields.size(); ++q)
        out[q].v2 = full[q];
    if (opts.with_error_estimate) {
        const std::vector<double> half = v2_fields_once(metric, fields, halved(opts));
        for (std::size_t q = 0; q < fields.size(); ++q)
            out[q].error_estimate = std::abs(full[q] - half[q]);
    }
    return out;
}

LiouvilleResult liouville_mean_square(const MetricPatch& metric, const ScalarField& f,
                                      const LiouvilleOptions& opts) {
    return liouville_mean_square_batch(metric, {f}, opts).front();
}

LiouvilleResult liouville_sigma_mean_square(const MetricPatch& metric,
                                            const LiouvilleOptions& opts) {
    LiouvilleResult out;
    out.v2 = v2_sigma_once(metric, opts);
    if (opts.with_error_estimate)
        out.error_estimate = std::abs(out.v2 - v2_sigma_once(metric, halved(opts)));
    return out;
}

} // namespace spectrace
