#include "spectrace/metric.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spectrace/error.hpp"

namespace spectrace {

MetricPatch::MetricPatch(std::string chart_id, JetFn jets)
    : chart_id_(std::move(chart_id)), mode_(DerivativeMode::analytic), jets_(std::move(jets)) {}

MetricPatch::MetricPatch(std::string chart_id, ValueFn values)
    : chart_id_(std::move(chart_id)), mode_(DerivativeMode::finite_difference),
      values_(std::move(values)) {}

const RevolutionProfile& MetricPatch::profile() const {
    if (!profile_) throw InvalidArgumentError("MetricPatch: no revolution profile attached");
    return *profile_;
}

MetricJet MetricPatch::jet(double u1, double u2) const {
    MetricJet j;
    if (mode_ == DerivativeMode::analytic) {
        j = jets_(u1, u2);
    } else {
        // Centered finite differences with relative step 1e-5. Second-partial
        // noise ~1e-6 is inherent to this mode.
        const double h1 = 1e-5 * std::max(1.0, std::abs(u1));
        const double h2 = 1e-5 * std::max(1.0, std::abs(u2));
        double c[3], pp[3], pm[3], mp[3], mm[3], p0[3], m0[3], zp[3], zm[3];
        values_(u1, u2, c);
        values_(u1 + h1, u2, p0);
        values_(u1 - h1, u2, m0);
        values_(u1, u2 + h2, zp);
        values_(u1, u2 - h2, zm);
        values_(u1 + h1, u2 + h2, pp);
        values_(u1 + h1, u2 - h2, pm);
        values_(u1 - h1, u2 + h2, mp);
        values_(u1 - h1, u2 - h2, mm);
        auto fill = [&](int idx, double& v, double& d1, double& d2, double& d11, double& d12,
                        double& d22) {
            v = c[idx];
            d1 = (p0[idx] - m0[idx]) / (2 * h1);
            d2 = (zp[idx] - zm[idx]) / (2 * h2);
            d11 = (p0[idx] - 2 * c[idx] + m0[idx]) / (h1 * h1);
            d22 = (zp[idx] - 2 * c[idx] + zm[idx]) / (h2 * h2);
            d12 = (pp[idx] - pm[idx] - mp[idx] + mm[idx]) / (4 * h1 * h2);
        };
        fill(0, j.A, j.A1, j.A2, j.A11, j.A12, j.A22);
        fill(1, j.B, j.B1, j.B2, j.B11, j.B12, j.B22);
        fill(2, j.C, j.C1, j.C2, j.C11, j.C12, j.C22);
    }
    if (!(j.A > 0.0) || !(j.det() > 0.0))
        throw DegenerateMetricError(fmt::format(
            "metric not Riemannian at ({}, {}): A = {}, det = {}", u1, u2, j.A, j.det()));
    return j;
}

namespace {

/// Analytic jet of a surface-of-revolution metric in the polar chart:
/// A(theta) = (1 + p(cos theta))^2, B = 0, C = sin^2 theta.
MetricJet revolution_jet(const RevolutionProfile& prof, double theta) {
    const double x = std::cos(theta), s = std::sin(theta);
    const double p = prof.p(x), dp = prof.dp(x), d2p = prof.d2p(x);
    MetricJet j;
    j.A = (1 + p) * (1 + p);
    j.A1 = -2 * (1 + p) * dp * s;
    // d2A/dtheta2 = 2 s^2 (dp^2 + (1+p) d2p) - 2 (1+p) dp cos(theta)
    j.A11 = 2 * s * s * (dp * dp + (1 + p) * d2p) - 2 * (1 + p) * dp * x;
    j.B = j.B1 = j.B2 = j.B11 = j.B12 = j.B22 = 0;
    j.C = s * s;
    j.C1 = 2 * s * x;           // sin(2 theta)
    j.C11 = 2 * (x * x - s * s); // 2 cos(2 theta)
    j.A2 = j.A12 = j.A22 = j.C2 = j.C12 = j.C22 = 0;
    return j;
}

void validate_profile(const RevolutionProfile& prof) {
    // Grid sampling, per the construction contract: reject sup|p| >= 1
    // (degenerate A) and p(+-1) != 0 (broken pole smoothness).
    for (int i = 0; i <= 512; ++i) {
        const double x = -1.0 + 2.0 * i / 512;
        if (std::abs(prof.p(x)) >= 1.0)
            throw DegenerateMetricError(fmt::format(
                "revolution profile degenerate: |p({:.4f})| = {:.4f} >= 1", x, std::abs(prof.p(x))));
    }
    if (std::abs(prof.p(1.0)) > 1e-14 || std::abs(prof.p(-1.0)) > 1e-14)
        throw DegenerateMetricError("revolution profile must vanish at x = +-1");
}

} // namespace

MetricPatch builtin_metric(const std::string& family, double eps) {
    RevolutionProfile prof;
    prof.family = family;
    prof.eps = eps;
    if (family == "round") {
        prof.p = prof.dp = prof.d2p = prof.d3p = [](double) { return 0.0; };
        prof.eta = prof.deta = prof.d2eta = [](double) { return 0.0; };
        prof.closes_geodesics = true;
    } else if (family == "zoll") {
        if (std::abs(eps) > 0.3)
            throw InvalidArgumentError(fmt::format("builtin_metric: zoll profile needs |eps| <= 0.3, got {}", eps));
        // h(x) = eps x (1 - x^2);  eta = h/(1-x^2) = eps x
        prof.p = [eps](double x) { return eps * x * (1 - x * x); };
        prof.dp = [eps](double x) { return eps * (1 - 3 * x * x); };
        prof.d2p = [eps](double x) { return -6 * eps * x; };
        prof.d3p = [eps](double) { return -6 * eps; };
        prof.eta = [eps](double x) { return eps * x; };
        prof.deta = [eps](double) { return eps; };
        prof.d2eta = [](double) { return 0.0; };
        prof.closes_geodesics = true;
    } else if (family == "control") {
        // Even profile 0.1 (1 - x^2): a revolution metric that is NOT of the
        // all-geodesics-closed type; used as the negative control.
        prof.p = [](double x) { return 0.1 * (1 - x * x); };
        prof.dp = [](double x) { return -0.2 * x; };
        prof.d2p = [](double) { return -0.2; };
        prof.d3p = [](double) { return 0.0; };
        prof.eta = [](double) { return 0.1; };
        prof.deta = [](double) { return 0.0; };
        prof.d2eta = [](double) { return 0.0; };
        prof.closes_geodesics = false;
    } else {
        throw InvalidArgumentError(fmt::format(
            "builtin_metric: unknown family '{}' (expected round | zoll | control)", family));
    }
    validate_profile(prof);

    MetricPatch patch(fmt::format("polar:{}", family),
                      MetricPatch::JetFn{[prof](double u1, double /*u2*/) { return revolution_jet(prof, u1); }});
    patch.profile_ = std::move(prof);
    return patch;
}

} // namespace spectrace
