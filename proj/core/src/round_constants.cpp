#include "spectrace/round_constants.hpp"

#include "spectrace/error.hpp"
#include "spectrace/legendre.hpp"
#include "spectrace/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<double, 3> unit(const std::array<double, 3>& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

double eval_cartesian(const ScalarField& q, double x, double y, double z) {
    const double theta = std::acos(std::clamp(z, -1.0, 1.0));
    return q.value(theta, std::atan2(y, x));
}

/// Direct evaluation of DD: for each outer node w, the inner integral of
/// q / |sin d| over the sphere reduces in geodesic polar coordinates (d, psi)
/// around w to a plain double sum, because the area factor sin d cancels the
/// kernel exactly. The d-integrand extends evenly through both endpoints, so
/// the closed trapezoid rule is spectrally accurate; all grids are sized to
/// the band limit.
double direct_double_integral(const ScalarField& q, int band) {
    const int n_d = band + 6;        // trapezoid panels on [0, pi]
    const int n_psi = 2 * band + 8;  // uniform on [0, 2pi)
    const int n_x = band + 6;        // outer Gauss-Legendre in cos(theta)
    const int n_phi = 2 * band + 8;  // outer uniform azimuth

    const QuadratureRule glx = gauss_legendre(n_x, -1.0, 1.0);
    double outer_acc = 0.0;
    for (int i = 0; i < n_x; ++i) {
        const double ct = glx.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * kPi * j / n_phi;
            const std::array<double, 3> w = {st * std::cos(phi), st * std::sin(phi), ct};
            // Orthonormal tangent frame at w, branch chosen away from
            // degeneracy of the cross product.
            std::array<double, 3> e1 =
                std::abs(w[2]) < 0.8
                    ? unit({-w[1], w[0], 0.0})          // z-hat x w
                    : unit({0.0, -w[2], w[1]});          // x-hat x w
            const std::array<double, 3> e2 = {w[1] * e1[2] - w[2] * e1[1],
                                              w[2] * e1[0] - w[0] * e1[2],
                                              w[0] * e1[1] - w[1] * e1[0]};
            double inner = 0.0;
            for (int a = 0; a <= n_d; ++a) {
                const double d = kPi * a / n_d;
                const double wd = (a == 0 || a == n_d ? 0.5 : 1.0) * kPi / n_d;
                const double cd = std::cos(d), sd = std::sin(d);
                double psi_acc = 0.0;
                for (int b = 0; b < n_psi; ++b) {
                    const double psi = 2.0 * kPi * b / n_psi;
                    const double cp = std::cos(psi), sp = std::sin(psi);
                    psi_acc += eval_cartesian(q,
                                              cd * w[0] + sd * (cp * e1[0] + sp * e2[0]),
                                              cd * w[1] + sd * (cp * e1[1] + sp * e2[1]),
                                              cd * w[2] + sd * (cp * e1[2] + sp * e2[2]));
                }
                inner += wd * psi_acc * (2.0 * kPi / n_psi);
            }
            outer_acc += glx.weights[i] * (2.0 * kPi / n_phi) *
                         eval_cartesian(q, w[0], w[1], w[2]) * inner;
        }
    }
    return outer_acc;
}

} // namespace

std::vector<HarmonicCoeff> project_round_harmonics(const ScalarField& q, int L) {
    if (L < 0)
        throw InvalidArgumentError("project_round_harmonics: L must be >= 0");
    const QuadratureRule gl = gauss_legendre(2 * L + 2, -1.0, 1.0);
    const int n_phi = 2 * L + 4;

    // coef[l][m + l]: m < 0 holds the sin branch, m > 0 the cos branch.
    std::vector<std::vector<double>> coef(L + 1);
    for (int l = 0; l <= L; ++l)
        coef[l].assign(2 * l + 1, 0.0);

    std::vector<std::vector<double>> plm(L + 1);
    for (int i = 0; i < gl.size(); ++i) {
        const double x = gl.nodes[i];
        const double theta = std::acos(x);
        for (int m = 0; m <= L; ++m) {
            plm[m].assign(L - m + 1, 0.0);
            normalized_plm_row(m, L, x, plm[m]);
        }
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * kPi * j / n_phi;
            const double wq = gl.weights[i] * (2.0 * kPi / n_phi) * q.value(theta, phi);
            for (int l = 0; l <= L; ++l) {
                coef[l][l] += wq * plm[0][l];
                for (int m = 1; m <= l; ++m) {
                    const double p = std::sqrt(2.0) * plm[m][l - m];
                    coef[l][l + m] += wq * p * std::cos(m * phi);
                    coef[l][l - m] += wq * p * std::sin(m * phi);
                }
            }
        }
    }
    std::vector<HarmonicCoeff> out;
    for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m)
            out.push_back({l, m, coef[l][l + m]});
    return out;
}

RoundTraceConstants round_trace_constants(const ScalarField& q, int band_hint) {
    RoundTraceConstants out;
    if (q.is_zero())
        return out;

    std::vector<HarmonicCoeff> coeffs;
    int band;
    if (!q.harmonic_coeffs().empty()) {
        coeffs = q.harmonic_coeffs();
        band = q.band();
    } else {
        band = band_hint > 0 ? band_hint : 24;
        coeffs = project_round_harmonics(q, band);
    }

    double c00 = 0.0;
    for (const HarmonicCoeff& c : coeffs) {
        const double pl0 = legendre_P(c.l, 0.0);
        out.double_integral_spectral += 2.0 * kPi * kPi * pl0 * pl0 * c.c * c.c;
        out.q_sq_integral += c.c * c.c;
        if (c.l == 0 && c.m == 0)
            c00 = c.c;
    }
    out.c0 = c00 / std::sqrt(4.0 * kPi);
    out.double_integral_direct = direct_double_integral(q, band);

    const double scale = std::max({std::abs(out.double_integral_spectral),
                                   std::abs(out.double_integral_direct), out.q_sq_integral,
                                   1e-300});
    out.agreement = std::abs(out.double_integral_spectral - out.double_integral_direct) / scale;
    if (out.agreement > 1e-6)
        throw KernelEvaluationError(
            fmt::format("round_trace_constants: kernel double integral disagrees between the "
                        "spectral ({:.12e}) and direct ({:.12e}) evaluations by {:.3e} relative",
                        out.double_integral_spectral, out.double_integral_direct,
                        out.agreement));

    out.c1 = out.double_integral_spectral / (32.0 * kPi * kPi * kPi) -
             out.q_sq_integral / (16.0 * kPi);
    return out;
}

} // namespace spectrace
