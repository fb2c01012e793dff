#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace spectrace {

/// Metric coefficients A, B, C of ds^2 = A du1^2 + 2B du1 du2 + C du2^2 at a
/// point, together with their first and second partial derivatives
/// (subscript 1 = d/du1, 2 = d/du2).
struct MetricJet {
    double A = 1, B = 0, C = 1;
    double A1 = 0, A2 = 0, B1 = 0, B2 = 0, C1 = 0, C2 = 0;
    double A11 = 0, A12 = 0, A22 = 0, B11 = 0, B12 = 0, B22 = 0, C11 = 0, C12 = 0, C22 = 0;

    double det() const { return A * C - B * B; }
};

/// Smooth profile of a surface of revolution ds^2 = (1 + p(cos theta))^2
/// dtheta^2 + sin^2 theta dphi^2 with p(+-1) = 0. Carries p through third
/// derivatives (zeta integrands need second derivatives of the curvature) and
/// the smooth quotient eta(x) = p(x)/(1 - x^2) through second derivatives
/// (the rotated polar chart is built from the ambient tensor form
/// g = g_round + D(X3) dX3 (x) dX3 with D = eta * (2 + p), which is smooth
/// across the poles precisely because p vanishes at x = +-1).
struct RevolutionProfile {
    std::function<double(double)> p, dp, d2p, d3p;
    std::function<double(double)> eta, deta, d2eta;
    std::string family;            ///< "round" | "zoll" | "control"
    double eps = 0.0;
    bool closes_geodesics = false; ///< round/zoll families (certified by tests, not assumed)
};

/// A coordinate chart carrying the metric. Builtin metrics live in the polar
/// chart (u1, u2) = (theta, phi) with poles at theta in {0, pi}; custom
/// patches may use any chart and either analytic jets or values differentiated
/// by centered finite differences (relative step 1e-5; second-derivative noise
/// ~1e-6 is the documented accuracy limit of that mode).
class MetricPatch {
public:
    enum class DerivativeMode { analytic, finite_difference };

    using JetFn = std::function<MetricJet(double u1, double u2)>;
    using ValueFn = std::function<void(double u1, double u2, double abc[3])>;

    /// Analytic-mode patch.
    MetricPatch(std::string chart_id, JetFn jets);
    /// Finite-difference-mode patch (values only).
    MetricPatch(std::string chart_id, ValueFn values);

    /// Metric jet at an interior point. Throws DegenerateMetricError if the
    /// Riemannian condition A > 0, AC - B^2 > 0 fails there.
    MetricJet jet(double u1, double u2) const;

    const std::string& chart_id() const { return chart_id_; }
    DerivativeMode derivative_mode() const { return mode_; }

    /// True when the patch is a polar chart with coordinate singularities at
    /// theta in {0, pi} (all builtin metrics).
    bool has_poles() const { return polar_; }
    /// Exclusion radius around the poles for pointwise differential
    /// operators; quadratures substitute x = cos theta and never get closer.
    double pole_exclusion() const { return 1e-4; }

    bool has_profile() const { return profile_.has_value(); }
    const RevolutionProfile& profile() const;

private:
    friend MetricPatch builtin_metric(const std::string&, double);
    std::string chart_id_;
    DerivativeMode mode_;
    JetFn jets_;
    ValueFn values_;
    bool polar_ = true;
    std::optional<RevolutionProfile> profile_;
};

/// Builtin metric families on the two-sphere, all in the polar chart:
///   "round"    ds^2 = dtheta^2 + sin^2 theta dphi^2  (eps ignored)
///   "zoll"     ds^2 = (1 + h(cos theta))^2 dtheta^2 + sin^2 theta dphi^2
///              with the odd profile h(x) = eps x (1 - x^2), |eps| <= 0.3
///   "control"  ds^2 = (1 + 0.1(1 - cos^2 theta))^2 dtheta^2 + sin^2 theta dphi^2
///              — a deliberately non-closing negative control (eps ignored)
/// All partials analytic. Degeneracy (sup|h| >= 1) is rejected at
/// construction by sampling the profile on a grid, not symbolically.
MetricPatch builtin_metric(const std::string& family, double eps = 0.0);

} // namespace spectrace
