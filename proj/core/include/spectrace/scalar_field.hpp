#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace spectrace {

/// One real-harmonic component c * Y_{lm} (real convention: m > 0 cosine,
/// m < 0 sine, orthonormal on the unit sphere).
struct HarmonicCoeff {
    int l = 0;
    int m = 0;
    double c = 0.0;
};

/// A smooth real scalar field on the chart domain (the potential q, curvature
/// fields, and test integrands). Evaluators receive the owning chart's
/// coordinates; for all builtin metrics that is the polar chart (theta, phi).
/// Gradient and Hessian evaluators are optional: pointwise differential
/// operators fall back to centered finite differences when absent
/// (step 1e-5 for first, 1e-4 for second derivatives).
class ScalarField {
public:
    using ValueFn = std::function<double(double u1, double u2)>;
    using GradFn = std::function<std::array<double, 2>(double u1, double u2)>; // (f1, f2)
    using HessFn = std::function<std::array<double, 3>(double u1, double u2)>; // (f11, f12, f22)

    ScalarField() = default;
    explicit ScalarField(ValueFn value, GradFn grad = nullptr, HessFn hess = nullptr);

    /// q == c everywhere (analytic jets, zonal, band 0).
    static ScalarField constant(double c);

    /// Zonal field q(theta, phi) = g(cos theta) given with up to two
    /// x-derivatives (analytic chain rule to theta when supplied).
    static ScalarField zonal_x(std::function<double(double)> g,
                               std::function<double(double)> dg = nullptr,
                               std::function<double(double)> d2g = nullptr);

    /// Band-limited combination sum c_i Y_{l_i m_i} with fully analytic
    /// gradient and Hessian (associated-Legendre recurrences + the ODE
    /// identity for the second theta-derivative). The list is canonicalized:
    /// repeated (l, m) entries are summed into one and exact zeros dropped, so
    /// harmonic_coeffs() always returns an orthogonal expansion.
    static ScalarField harmonic(std::vector<HarmonicCoeff> coeffs);

    double value(double u1, double u2) const { return value_(u1, u2); }
    std::array<double, 2> gradient(double u1, double u2) const;
    std::array<double, 3> hessian(double u1, double u2) const;

    bool has_gradient() const { return static_cast<bool>(grad_); }
    bool has_hessian() const { return static_cast<bool>(hess_); }

    /// True when the field depends on u1 (theta) only.
    bool zonal() const { return zonal_; }
    /// Maximal spherical-harmonic degree, or -1 when unknown/not band-limited.
    int band() const { return band_; }
    /// Harmonic coefficients when constructed via harmonic(), else empty.
    const std::vector<HarmonicCoeff>& harmonic_coeffs() const { return coeffs_; }

    bool is_zero() const { return zero_; }
    /// A short canonical description used in cache keys and reports.
    const std::string& description() const { return description_; }
    void set_description(std::string d) { description_ = std::move(d); }

private:
    ValueFn value_;
    GradFn grad_;
    HessFn hess_;
    bool zonal_ = false;
    bool zero_ = false;
    int band_ = -1;
    std::vector<HarmonicCoeff> coeffs_;
    std::string description_ = "custom";
};

} // namespace spectrace
