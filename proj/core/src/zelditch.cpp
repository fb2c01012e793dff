#include "spectrace/zelditch.hpp"

#include "spectrace/curvature.hpp"
#include "spectrace/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kClosureTol = 1e-6;

/// Periodic trapezoid mean over samples covering exactly one closed turn
/// (first and last sample represent the same point up to closure error).
double periodic_mean(const std::vector<double>& values) {
    const std::size_t n = values.size() - 1;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i < n; ++i)
        sum += values[i];
    return sum / static_cast<double>(n);
}

void require_closed(const GeodesicPath& path, const char* who) {
    if (!(path.closure_residual < kClosureTol))
        throw ClosureError(fmt::format(
            "{}: geodesic does not close within {:.1e} over length 2 pi "
            "(residual = {:.3e}); the closed-geodesic structure is a precondition",
            who, kClosureTol, path.closure_residual));
}

} // namespace

double normal_curvature_derivative(const GeodesicSystem& system, const PhasePoint& p,
                                   double step) {
    const MetricPatch& patch = system.chart(p.chart);
    const MetricJet j = patch.jet(p.u1, p.u2);
    const double root = std::sqrt(j.det());
    // Unit normal (g(N, N) = 2H = 1, g(N, gamma') = 0).
    const double n1 = p.p2 / root;
    const double n2 = -p.p1 / root;
    const double kp = gauss_curvature(patch, p.u1 + step * n1, p.u2 + step * n2);
    const double km = gauss_curvature(patch, p.u1 - step * n1, p.u2 - step * n2);
    return (kp - km) / (2 * step);
}

double normal_curvature_derivative(const MetricPatch& metric, const GeodesicPath& path, double r,
                                   double step) {
    if (path.samples.size() < 2)
        throw InvalidArgumentError("normal_curvature_derivative: path has no samples");
    if (r < path.r.front() - 1e-12 || r > path.r.back() + 1e-12)
        throw InvalidArgumentError(
            fmt::format("normal_curvature_derivative: r = {:.6g} outside the path range "
                        "[{:.6g}, {:.6g}]",
                        r, path.r.front(), path.r.back()));
    const GeodesicSystem system(metric);
    const double ds = path.r[1] - path.r[0];
    const auto hi_idx = static_cast<std::size_t>(
        std::clamp<long>(std::lround(std::ceil(r / ds)), 1, static_cast<long>(path.r.size()) - 1));
    const std::size_t lo_idx = hi_idx - 1;
    const PhasePoint& a = path.samples[lo_idx];
    const PhasePoint& b = path.samples[hi_idx];
    PhasePoint at;
    if (a.chart == b.chart) {
        const double w = std::clamp((r - path.r[lo_idx]) / ds, 0.0, 1.0);
        at = {a.u1 + w * (b.u1 - a.u1), a.u2 + w * (b.u2 - a.u2), a.p1 + w * (b.p1 - a.p1),
              a.p2 + w * (b.p2 - a.p2), a.chart};
    } else {
        at = (r - path.r[lo_idx] < path.r[hi_idx] - r) ? a : b;
    }
    return normal_curvature_derivative(system, at, step);
}

SigmaPath zelditch_sigma(const MetricPatch& metric, const PhasePoint& start,
                         const FlowOptions& opts) {
    return zelditch_sigma(GeodesicSystem(metric), start, opts);
}

SigmaPath zelditch_sigma(const GeodesicSystem& system, const PhasePoint& start,
                         const FlowOptions& opts) {
    SigmaPath out;
    {
        JacobiFlow jf = jacobi_flow(system, start, 2 * kPi, opts);
        out.path = std::move(jf.path);
        out.jacobi = std::move(jf.jacobi);
    }
    require_closed(out.path, "zelditch_sigma");

    const std::size_t n = out.path.samples.size();
    out.kv.resize(n);
    std::vector<double> curv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PhasePoint& p = out.path.samples[i];
        out.kv[i] = normal_curvature_derivative(system, p);
        curv[i] = gauss_curvature(system.chart(p.chart), p.u1, p.u2);
    }

    // Cumulative trapezoid of the two nested integrands on the native grid.
    const double ds = out.path.r[1] - out.path.r[0];
    const std::vector<double>& u = out.jacobi.u;
    const std::vector<double>& jj = out.jacobi.j;
    std::vector<double> g1(n), g2(n);
    for (std::size_t i = 0; i < n; ++i) {
        g1[i] = out.kv[i] * jj[i] * jj[i] * jj[i];
        g2[i] = out.kv[i] * u[i] * jj[i] * jj[i];
    }
    std::vector<double> i1(n, 0.0), i2(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        i1[i] = i1[i - 1] + 0.5 * ds * (g1[i - 1] + g1[i]);
        i2[i] = i2[i - 1] + 0.5 * ds * (g2[i - 1] + g2[i]);
    }

    out.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double bracket =
            out.kv[i] * u[i] * u[i] * (u[i] * i1[i] / 3.0 - jj[i] * i2[i]);
        out.sigma[i] = 0.25 * (curv[i] - 1.0 + bracket);
    }
    out.average = periodic_mean(out.sigma);
    return out;
}

double flow_average(const MetricPatch& metric, const ScalarField& f, const PhasePoint& start,
                    const FlowOptions& opts) {
    const GeodesicSystem system(metric);
    const GeodesicPath path = system.flow(start, 2 * kPi, opts);
    require_closed(path, "flow_average");
    std::vector<double> values(path.samples.size());
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        const auto tp = system.chart0_coordinates(path.samples[i]);
        values[i] = f.value(tp[0], tp[1]);
    }
    return periodic_mean(values);
}

double flow_average(const MetricPatch& metric,
                    const std::function<double(const GeodesicSystem&, const PhasePoint&)>& f,
                    const PhasePoint& start, const FlowOptions& opts) {
    const GeodesicSystem system(metric);
    const GeodesicPath path = system.flow(start, 2 * kPi, opts);
    require_closed(path, "flow_average");
    std::vector<double> values(path.samples.size());
    for (std::size_t i = 0; i < path.samples.size(); ++i)
        values[i] = f(system, path.samples[i]);
    return periodic_mean(values);
}

} // namespace spectrace
