#include "spectrace/zeta.hpp"

#include "spectrace/curvature.hpp"
#include "spectrace/surface_integral.hpp"

#include <cmath>
#include <memory>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Wraps an integrand lambda so zonal inputs keep the zonal fast path.
ScalarField wrap_integrand(std::function<double(double, double)> f, bool zonal,
                           std::string description) {
    ScalarField out = zonal ? ScalarField::zonal_x(
                                  [f](double x) { return f(std::acos(x), 0.0); })
                            : ScalarField(std::move(f));
    out.set_description(std::move(description));
    return out;
}

} // namespace

double curvature_zeta_integral(const MetricPatch& metric) {
    const auto k_field = std::make_shared<ScalarField>(curvature_field(metric));
    ScalarField curv_integrand = wrap_integrand(
        [&metric, k_field](double theta, double phi) {
            const double k = k_field->value(theta, phi);
            return laplace_beltrami(metric, *k_field, theta, phi) + k * k;
        },
        k_field->zonal(), "zeta1-curvature-integrand");
    return integrate_scalar(metric, curv_integrand);
}

double potential_zeta_integral(const MetricPatch& metric, const ScalarField& q,
                               GammaConvention gamma) {
    if (q.is_zero())
        return 0.0;
    const auto k_field = std::make_shared<ScalarField>(curvature_field(metric));
    const auto q_field = std::make_shared<ScalarField>(q);
    const bool pot_zonal = q.zonal() && k_field->zonal();
    const bool gamma_minus_one = (gamma == GammaConvention::curvature_minus_one);
    ScalarField pot_integrand = wrap_integrand(
        [&metric, k_field, q_field, gamma_minus_one](double theta, double phi) {
            const double qs = q_field->value(theta, phi);
            const double g = k_field->value(theta, phi) - (gamma_minus_one ? 1.0 : 0.0);
            return -laplace_beltrami(metric, *q_field, theta, phi) + 3 * qs * qs - 2 * qs * g;
        },
        pot_zonal, "zeta1-potential-integrand");
    return integrate_scalar(metric, pot_integrand);
}

ZetaValues zeta_values(const MetricPatch& metric, const ScalarField& q, GammaConvention gamma) {
    ZetaValues out;

    // zeta0: linear in the integrand, so the two pieces integrate separately
    // (each keeps its own zonality fast path).
    const ScalarField k_field = curvature_field(metric);
    const double int_k = integrate_scalar(metric, k_field);
    const double int_q = q.is_zero() ? 0.0 : integrate_scalar(metric, q);
    out.zeta0 = (int_k / 3.0 - int_q) / (4 * kPi);

    out.zeta1 = -curvature_zeta_integral(metric) / (60 * kPi) -
                potential_zeta_integral(metric, q, gamma) / (24 * kPi);
    return out;
}

HeatCoefficients heat_coefficients_from_zeta(const MetricPatch& metric, const ScalarField& q,
                                             HeatKind which, GammaConvention gamma) {
    HeatCoefficients out;
    out.which = which;
    if (which == HeatKind::F) {
        out.h0 = 1.0;
        out.h1 = 1.0 / 3.0;
        out.h2 = 1.0 / 15.0;
        return out;
    }
    const ScalarField potential = (which == HeatKind::M) ? q : ScalarField::constant(0.0);
    const ZetaValues z = zeta_values(metric, potential, gamma);
    out.h0 = surface_area(metric) / (4 * kPi);
    out.h1 = z.zeta0;
    out.h2 = -z.zeta1;
    return out;
}

} // namespace spectrace
