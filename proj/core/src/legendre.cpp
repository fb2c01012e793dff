#include "spectrace/legendre.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "spectrace/error.hpp"

namespace spectrace {

double legendre_P(int l, double x) {
    if (l < 0) throw InvalidArgumentError(fmt::format("legendre_P: l = {} < 0", l));
    if (std::abs(x) > 1.0 + 1e-14)
        throw InvalidArgumentError(fmt::format("legendre_P: |x| = {} > 1", std::abs(x)));
    if (l == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= l; ++n) {
        const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

void normalized_plm_row(int m, int L, double x, std::span<double> out) {
    if (m < 0 || L < m)
        throw InvalidArgumentError(fmt::format("normalized_plm_row: need 0 <= m <= L, got m={}, L={}", m, L));
    if (std::abs(x) > 1.0 + 1e-14)
        throw InvalidArgumentError("normalized_plm_row: |x| > 1");
    if (static_cast<int>(out.size()) != L - m + 1)
        throw InvalidArgumentError("normalized_plm_row: output span has wrong size");

    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
    // Seed Ptilde_{mm}: sqrt(1/4pi) * prod_{i=1..m} sqrt((2i+1)/(2i)) * (1-x^2)^{m/2}.
    double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
    for (int i = 1; i <= m; ++i) pmm *= std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * sx;
    out[0] = pmm;
    if (L == m) return;
    out[1] = x * std::sqrt(2.0 * m + 3.0) * pmm;
    for (int l = m + 2; l <= L; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                   (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        out[l - m] = a * (x * out[l - m - 1] - b * out[l - m - 2]);
    }
}

void normalized_plm_row_with_deriv(int m, int L, double x, std::span<double> p_out,
                                   std::span<double> q_out) {
    normalized_plm_row(m, L, x, p_out);
    if (static_cast<int>(q_out.size()) != L - m + 1)
        throw InvalidArgumentError("normalized_plm_row_with_deriv: output span has wrong size");
    for (int l = m; l <= L; ++l) {
        double q = -static_cast<double>(l) * x * p_out[l - m];
        if (l > m) {
            const double cl = std::sqrt((static_cast<double>(l) * l - static_cast<double>(m) * m) *
                                        (2.0 * l + 1.0) / (2.0 * l - 1.0));
            q += cl * p_out[l - m - 1];
        }
        q_out[l - m] = q;
    }
}

double spherical_harmonic(int l, int m, double theta, double phi) {
    if (l < 0 || std::abs(m) > l)
        throw InvalidArgumentError(fmt::format("spherical_harmonic: need |m| <= l, got l={}, m={}", l, m));
    if (theta < -1e-12 || theta > std::numbers::pi + 1e-12)
        throw InvalidArgumentError(fmt::format("spherical_harmonic: theta = {} outside [0, pi]", theta));
    const int ma = std::abs(m);
    const double x = std::cos(theta);
    std::vector<double> row(static_cast<size_t>(l - ma + 1));
    normalized_plm_row(ma, l, x, row);
    const double plm = row.back();
    if (m == 0) return plm;
    const double sqrt2 = std::numbers::sqrt2;
    return (m > 0) ? sqrt2 * plm * std::cos(ma * phi) : sqrt2 * plm * std::sin(ma * phi);
}

double normalized_plm_dtheta(int l, int m, double theta) {
    if (l < 0 || m < 0 || m > l)
        throw InvalidArgumentError("normalized_plm_dtheta: need 0 <= m <= l");
    const double st = std::sin(theta);
    if (std::abs(st) < 1e-12)
        throw PoleProximityError(fmt::format("normalized_plm_dtheta: theta = {} too close to a pole", theta));
    const double x = std::cos(theta);
    std::vector<double> row(static_cast<size_t>(l - m + 1));
    normalized_plm_row(m, l, x, row);
    double d = l * (x / st) * row[l - m];
    if (l > m) {
        const double cl = std::sqrt((static_cast<double>(l) * l - static_cast<double>(m) * m) *
                                    (2.0 * l + 1.0) / (2.0 * l - 1.0));
        d -= cl / st * row[l - m - 1];
    }
    return d;
}

} // namespace spectrace
