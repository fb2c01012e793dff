#include "spectrace/curvature.hpp"

#include "spectrace/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spectrace {

double gauss_curvature(const MetricPatch& metric, double u1, double u2) {
    if (metric.has_poles()) {
        const double excl = metric.pole_exclusion();
        const double pi = 3.14159265358979323846;
        if (u1 < excl || u1 > pi - excl)
            throw PoleProximityError(fmt::format(
                "gauss_curvature: theta = {:.6g} within {:.1e} of a pole; evaluate away "
                "from the poles or use the profile curvature field",
                u1, excl));
    }
    const MetricJet j = metric.jet(u1, u2);
    const double disc = j.B * j.B - j.A * j.C;
    if (std::abs(disc) < 1e-12)
        throw DegenerateMetricError(
            fmt::format("gauss_curvature: |AC - B^2| = {:.3e} < 1e-12 at ({:.6g}, {:.6g})",
                        std::abs(disc), u1, u2));
    const double num = j.C * j.A2 * j.A2 - 2 * j.B * j.A2 * j.B2 + j.A * j.A2 * j.C2 +
                       2 * j.B * j.B * j.A22 - 2 * j.A * j.C * j.A22 - 2 * j.C * j.B2 * j.A1 +
                       j.B * j.C2 * j.A1 + 4 * j.B * j.B2 * j.B1 - 2 * j.A * j.C2 * j.B1 -
                       j.B * j.A2 * j.C1 + j.C * j.A1 * j.C1 - 2 * j.B * j.B1 * j.C1 +
                       j.A * j.C1 * j.C1 - 4 * j.B * j.B * j.B12 + 4 * j.A * j.C * j.B12 +
                       2 * j.B * j.B * j.C11 - 2 * j.A * j.C * j.C11;
    return num / (4 * disc * disc);
}

double laplace_beltrami(const MetricPatch& metric, const ScalarField& field, double u1,
                        double u2) {
    if (metric.has_poles()) {
        const double excl = metric.pole_exclusion();
        const double pi = 3.14159265358979323846;
        if (u1 < excl || u1 > pi - excl)
            throw PoleProximityError(fmt::format(
                "laplace_beltrami: theta = {:.6g} within {:.1e} of a pole; evaluate away "
                "from the poles or integrate in x = cos theta",
                u1, excl));
    }
    const MetricJet j = metric.jet(u1, u2);
    const double g = j.det();
    const auto df = field.gradient(u1, u2);
    const auto d2f = field.hessian(u1, u2);
    const double g1 = j.A1 * j.C + j.A * j.C1 - 2 * j.B * j.B1;
    const double g2 = j.A2 * j.C + j.A * j.C2 - 2 * j.B * j.B2;
    const double second = (j.C * d2f[0] - 2 * j.B * d2f[1] + j.A * d2f[2]) / g;
    const double coef1 = (j.C1 - j.B2 - (j.C * g1 - j.B * g2) / (2 * g)) / g;
    const double coef2 = (j.A2 - j.B1 - (j.A * g2 - j.B * g1) / (2 * g)) / g;
    return second + coef1 * df[0] + coef2 * df[1];
}

ScalarField curvature_field(const MetricPatch& metric) {
    if (metric.has_profile()) {
        const RevolutionProfile pr = metric.profile();
        auto kval = [pr](double x) {
            const double w = 1 + pr.p(x);
            return (w - x * pr.dp(x)) / (w * w * w);
        };
        auto kprime = [pr](double x) {
            const double p1 = pr.dp(x), p2 = pr.d2p(x);
            const double w = 1 + pr.p(x);
            const double n = w - x * p1;
            return (-x * p2 * w - 3 * n * p1) / (w * w * w * w);
        };
        auto ksecond = [pr](double x) {
            const double p1 = pr.dp(x), p2 = pr.d2p(x), p3 = pr.d3p(x);
            const double w = 1 + pr.p(x);
            const double n = w - x * p1;
            const double u = -x * p2 * w - 3 * n * p1;
            const double up = -w * (p2 + x * p3) + 2 * x * p1 * p2 - 3 * n * p2;
            return (up * w - 4 * u * p1) / (w * w * w * w * w);
        };
        ScalarField f = ScalarField::zonal_x(kval, kprime, ksecond);
        f.set_description(fmt::format("curvature:{}:{:.17g}", pr.family, pr.eps));
        return f;
    }
    ScalarField f(
        [metric](double u1, double u2) { return gauss_curvature(metric, u1, u2); });
    f.set_description(fmt::format("curvature:{}", metric.chart_id()));
    return f;
}

} // namespace spectrace
