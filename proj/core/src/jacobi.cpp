#include "spectrace/jacobi.hpp"

#include "spectrace/curvature.hpp"
#include "spectrace/error.hpp"
#include "spectrace/ode.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSwitchBand = 0.3;
constexpr double kHardLimit = 0.05;

} // namespace

JacobiFlow jacobi_flow(const GeodesicSystem& system, const PhasePoint& start, double length,
                       const FlowOptions& opts) {
    if (!(length > 0))
        throw InvalidArgumentError(fmt::format("jacobi_flow: length must be positive, got {}", length));
    const double h0 = system.hamiltonian(start);
    if (std::abs(h0 - 0.5) > 1e-8)
        throw InvalidArgumentError(fmt::format(
            "jacobi_flow: start not on the unit cosphere (H = {:.12g}, expected 0.5)", h0));

    const int count = std::max<int>(2, std::lround(opts.samples_per_turn * length / (2 * kPi)));
    const double ds = length / count;

    JacobiFlow out;
    GeodesicPath& path = out.path;
    JacobiData& jac = out.jacobi;
    path.total_length = length;
    path.r.resize(count + 1);
    for (int jj = 0; jj <= count; ++jj)
        path.r[jj] = jj * ds;
    path.samples.resize(count + 1);
    jac.r = path.r;
    jac.u.resize(count + 1);
    jac.du.resize(count + 1);
    jac.v.resize(count + 1);
    jac.dv.resize(count + 1);

    path.samples[0] = start;
    jac.u[0] = 1;
    jac.du[0] = 0;
    jac.v[0] = 0;
    jac.dv[0] = 1;

    int chart_cur = start.chart;
    int next_sample = 1;
    int switches = 0;

    // Joint state (u1, u2, p1, p2, u, u', v, v'): geodesic flow driving the
    // scalar Jacobi equation y'' + K y = 0 at the current geodesic point.
    VectorField field = [&system, &chart_cur](const double* y, double* dy) {
        const MetricPatch& patch = system.chart(chart_cur);
        hamiltonian_field(patch, y, dy);
        const double k = gauss_curvature(patch, y[0], y[1]);
        dy[4] = y[5];
        dy[5] = -k * y[4];
        dy[6] = y[7];
        dy[7] = -k * y[6];
    };

    auto on_step = [&](double s, double* y) {
        if (next_sample <= count && std::abs(s - next_sample * ds) < 1e-12 * length) {
            path.samples[next_sample] = {y[0], y[1], y[2], y[3], chart_cur};
            jac.u[next_sample] = y[4];
            jac.du[next_sample] = y[5];
            jac.v[next_sample] = y[6];
            jac.dv[next_sample] = y[7];
            ++next_sample;
        }
        if (y[0] < kSwitchBand || y[0] > kPi - kSwitchBand) {
            if (system.has_rotated_chart()) {
                const PhasePoint moved =
                    system.to_chart({y[0], y[1], y[2], y[3], chart_cur}, 1 - chart_cur);
                y[0] = moved.u1;
                y[1] = moved.u2;
                y[2] = moved.p1;
                y[3] = moved.p2;
                chart_cur = moved.chart;
                ++switches;
            } else if (y[0] < kHardLimit || y[0] > kPi - kHardLimit) {
                throw PoleProximityError(fmt::format(
                    "jacobi_flow: colatitude {:.6g} within {:.2g} of a pole and the metric "
                    "has no revolution profile to build the rotated chart from",
                    y[0], kHardLimit));
            }
        }
    };

    const double y0[8] = {start.u1, start.u2, start.p1, start.p2, 1, 0, 0, 1};
    OdeOptions ode_opts;
    ode_opts.tol = opts.tol;
    ode_integrate(8, field, std::span<const double>(y0, 8), length, ode_opts, nullptr, count,
                  on_step);

    if (next_sample <= count)
        throw DiscretizationError(fmt::format(
            "jacobi_flow: only {} of {} samples landed on the arc-length grid", next_sample - 1,
            count));

    path.chart_switches = switches;
    for (const PhasePoint& p : path.samples)
        path.h_drift = std::max(path.h_drift, std::abs(system.hamiltonian(p) - 0.5));

    for (int jj = 0; jj <= count; ++jj) {
        if (std::abs(path.r[jj] - 2 * kPi) < 1e-9) {
            std::array<double, 3> x0, v0, x1, v1;
            system.ambient_phase(path.samples[0], x0, v0);
            system.ambient_phase(path.samples[jj], x1, v1);
            double sq = 0;
            for (int i = 0; i < 3; ++i) {
                sq += (x1[i] - x0[i]) * (x1[i] - x0[i]);
                sq += (v1[i] - v0[i]) * (v1[i] - v0[i]);
            }
            path.closure_residual = std::sqrt(sq);
            break;
        }
    }

    jac.j = jac.v;
    for (std::size_t i = 0; i < jac.u.size(); ++i)
        jac.wronskian_drift = std::max(
            jac.wronskian_drift, std::abs(jac.u[i] * jac.dv[i] - jac.du[i] * jac.v[i] - 1.0));
    return out;
}

JacobiData jacobi_solve(const MetricPatch& metric, const GeodesicPath& path,
                        const FlowOptions& opts) {
    if (path.samples.empty() || path.r.size() != path.samples.size())
        throw InvalidArgumentError("jacobi_solve: path has no consistent sample grid");
    const GeodesicSystem system(metric);
    FlowOptions o = opts;
    const int count = static_cast<int>(path.r.size()) - 1;
    o.samples_per_turn =
        std::max(2, static_cast<int>(std::lround(count * 2 * kPi / path.total_length)));
    return jacobi_flow(system, path.samples[0], path.total_length, o).jacobi;
}

} // namespace spectrace
