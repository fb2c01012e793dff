#include "spectrace/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spectrace/error.hpp"
#include "spectrace/legendre.hpp"

namespace spectrace {

ScalarField::ScalarField(ValueFn value, GradFn grad, HessFn hess)
    : value_(std::move(value)), grad_(std::move(grad)), hess_(std::move(hess)) {}

std::array<double, 2> ScalarField::gradient(double u1, double u2) const {
    if (grad_) return grad_(u1, u2);
    const double h = 1e-5;
    return {(value_(u1 + h, u2) - value_(u1 - h, u2)) / (2 * h),
            (value_(u1, u2 + h) - value_(u1, u2 - h)) / (2 * h)};
}

std::array<double, 3> ScalarField::hessian(double u1, double u2) const {
    if (hess_) return hess_(u1, u2);
    const double h = 1e-4;
    const double c = value_(u1, u2);
    const double f11 = (value_(u1 + h, u2) - 2 * c + value_(u1 - h, u2)) / (h * h);
    const double f22 = (value_(u1, u2 + h) - 2 * c + value_(u1, u2 - h)) / (h * h);
    const double f12 = (value_(u1 + h, u2 + h) - value_(u1 + h, u2 - h) -
                        value_(u1 - h, u2 + h) + value_(u1 - h, u2 - h)) /
                       (4 * h * h);
    return {f11, f12, f22};
}

ScalarField ScalarField::constant(double c) {
    ScalarField f([c](double, double) { return c; },
                  [](double, double) { return std::array<double, 2>{0, 0}; },
                  [](double, double) { return std::array<double, 3>{0, 0, 0}; });
    f.zonal_ = true;
    f.band_ = 0;
    f.zero_ = (c == 0.0);
    f.description_ = fmt::format("constant:{:.17g}", c);
    return f;
}

ScalarField ScalarField::zonal_x(std::function<double(double)> g,
                                 std::function<double(double)> dg,
                                 std::function<double(double)> d2g) {
    ScalarField f;
    f.value_ = [g](double th, double) { return g(std::cos(th)); };
    if (dg) {
        f.grad_ = [dg](double th, double) {
            return std::array<double, 2>{-std::sin(th) * dg(std::cos(th)), 0.0};
        };
        if (d2g) {
            f.hess_ = [dg, d2g](double th, double) {
                const double x = std::cos(th), s = std::sin(th);
                return std::array<double, 3>{s * s * d2g(x) - x * dg(x), 0.0, 0.0};
            };
        }
    }
    f.zonal_ = true;
    f.description_ = "zonal:custom";
    return f;
}

namespace {

/// Evaluates a real-harmonic combination with optional first/second
/// derivatives, sharing the associated-Legendre rows across components.
struct HarmonicEval {
    std::vector<HarmonicCoeff> coeffs;
    int L = 0;

    // out[0] = value; out[1..2] = (f_theta, f_phi); out[3..5] = (f_tt, f_tp, f_pp)
    void eval(double theta, double phi, int order, double out[6]) const {
        for (int i = 0; i < 6; ++i) out[i] = 0;
        const double x = std::cos(theta), s = std::sin(theta);
        const double sqrt2 = std::numbers::sqrt2;
        std::vector<double> row(static_cast<size_t>(L + 1));
        int cur_m = -1;
        // Components are stored sorted by |m| so each row is built once.
        for (size_t ci = 0; ci < coeffs.size(); ++ci) {
            const auto& hc = coeffs[ci];
            const int ma = std::abs(hc.m);
            if (ma != cur_m) {
                cur_m = ma;
                normalized_plm_row(ma, L, x, std::span<double>(row.data(), static_cast<size_t>(L - ma + 1)));
            }
            const double plm = row[static_cast<size_t>(hc.l - ma)];
            const double azim = (hc.m == 0) ? 1.0
                                : (hc.m > 0) ? sqrt2 * std::cos(ma * phi)
                                             : sqrt2 * std::sin(ma * phi);
            out[0] += hc.c * plm * azim;
            if (order < 1) continue;

            // d/dtheta of the normalized theta part:
            // dP/dtheta = l cot(theta) P_{lm} - (c_l / sin theta) P_{l-1,m}
            double dpl;
            if (std::abs(s) < 1e-12) {
                dpl = 0.0; // only reached for zonal evaluation at poles; gradient unused there
            } else {
                dpl = hc.l * (x / s) * plm;
                if (hc.l > ma) {
                    const double cl = std::sqrt(
                        (static_cast<double>(hc.l) * hc.l - static_cast<double>(ma) * ma) *
                        (2.0 * hc.l + 1.0) / (2.0 * hc.l - 1.0));
                    dpl -= cl / s * row[static_cast<size_t>(hc.l - 1 - ma)];
                }
            }
            const double dazim = (hc.m == 0) ? 0.0
                                 : (hc.m > 0) ? -sqrt2 * ma * std::sin(ma * phi)
                                              : sqrt2 * ma * std::cos(ma * phi);
            out[1] += hc.c * dpl * azim;
            out[2] += hc.c * plm * dazim;
            if (order < 2) continue;

            // Second theta-derivative from the associated-Legendre ODE:
            // P'' = -cot(theta) P' - (l(l+1) - m^2/sin^2) P
            const double d2pl = (std::abs(s) < 1e-12)
                                    ? 0.0
                                    : -(x / s) * dpl -
                                          (hc.l * (hc.l + 1.0) - static_cast<double>(ma) * ma / (s * s)) * plm;
            out[3] += hc.c * d2pl * azim;
            out[4] += hc.c * dpl * dazim;
            out[5] += hc.c * plm * (-static_cast<double>(ma) * ma) * azim;
        }
    }
};

} // namespace

ScalarField ScalarField::harmonic(std::vector<HarmonicCoeff> coeffs) {
    for (const auto& hc : coeffs)
        if (hc.l < 0 || std::abs(hc.m) > hc.l)
            throw InvalidArgumentError(
                fmt::format("ScalarField::harmonic: invalid (l, m) = ({}, {})", hc.l, hc.m));
    std::sort(coeffs.begin(), coeffs.end(), [](const HarmonicCoeff& a, const HarmonicCoeff& b) {
        if (std::abs(a.m) != std::abs(b.m)) return std::abs(a.m) < std::abs(b.m);
        if (a.m != b.m) return a.m < b.m;
        return a.l < b.l;
    });
    // Canonicalize: merge repeated (l, m) entries and drop exact zeros, so the
    // stored list is a genuine orthogonal expansion. Consumers rely on that
    // (e.g. Parseval-type sums of c^2 are wrong if one basis function appears
    // twice), and the canonical form also keys caches order-independently.
    std::vector<HarmonicCoeff> merged;
    for (const auto& hc : coeffs) {
        if (!merged.empty() && merged.back().l == hc.l && merged.back().m == hc.m)
            merged.back().c += hc.c;
        else
            merged.push_back(hc);
    }
    std::erase_if(merged, [](const HarmonicCoeff& hc) { return hc.c == 0.0; });
    coeffs = std::move(merged);

    int band = 0;
    bool zonal = true;
    const bool zero = coeffs.empty();
    for (const auto& hc : coeffs) {
        band = std::max(band, hc.l);
        if (hc.m != 0) zonal = false;
    }

    auto ev = std::make_shared<HarmonicEval>();
    ev->coeffs = coeffs;
    ev->L = band;

    ScalarField f;
    f.value_ = [ev](double th, double ph) {
        double out[6];
        ev->eval(th, ph, 0, out);
        return out[0];
    };
    f.grad_ = [ev](double th, double ph) {
        double out[6];
        ev->eval(th, ph, 1, out);
        return std::array<double, 2>{out[1], out[2]};
    };
    f.hess_ = [ev](double th, double ph) {
        double out[6];
        ev->eval(th, ph, 2, out);
        return std::array<double, 3>{out[3], out[4], out[5]};
    };
    f.zonal_ = zonal;
    f.band_ = band;
    f.zero_ = zero;
    f.coeffs_ = std::move(coeffs);
    std::string desc = "harmonic:";
    for (const auto& hc : f.coeffs_)
        desc += fmt::format("({},{},{:.17g})", hc.l, hc.m, hc.c);
    f.description_ = std::move(desc);
    return f;
}

} // namespace spectrace
