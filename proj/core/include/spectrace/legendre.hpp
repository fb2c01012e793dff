#pragma once

#include <span>

namespace spectrace {

/// Legendre polynomial P_l(x) by the stable three-term recurrence.
/// Throws InvalidArgumentError for l < 0 or |x| > 1.
double legendre_P(int l, double x);

/// Normalized associated Legendre functions Ptilde_{lm}(x) for fixed m >= 0
/// and l = m..L, written to out[l - m] (size L - m + 1). Normalization:
///     integral_{-1}^{1} Ptilde_{lm}^2 dx = 1 / (2 pi),
/// chosen so the real spherical harmonics built from them are orthonormal on
/// the unit sphere. No Condon-Shortley phase.
void normalized_plm_row(int m, int L, double x, std::span<double> out);

/// Same row plus the scaled derivative Q_{lm}(x) = (1 - x^2) dPtilde_{lm}/dx,
/// computed by the stable downward coupling
///     (1 - x^2) P'_l = -l x P_l + c_l P_{l-1},
///     c_l = sqrt((l^2 - m^2)(2l + 1)/(2l - 1)),
/// which stays finite at the interval ends for every m.
void normalized_plm_row_with_deriv(int m, int L, double x, std::span<double> p_out,
                                   std::span<double> q_out);

/// Real orthonormal spherical harmonic:
///   m = 0:  Y_l0(theta)            = Ptilde_{l0}(cos theta)
///   m > 0:  Y_lm(theta, phi)       = sqrt(2) Ptilde_{lm}(cos theta) cos(m phi)
///   m < 0:  Y_l,-|m|(theta, phi)   = sqrt(2) Ptilde_{l|m|}(cos theta) sin(|m| phi)
/// Orthonormal: integral over S^2 of Y_{lm} Y_{l'm'} dS = delta delta.
/// Throws InvalidArgumentError for |m| > l or theta outside [0, pi].
double spherical_harmonic(int l, int m, double theta, double phi);

/// d/dtheta of the theta-part Ptilde_{lm}(cos theta), evaluated away from the
/// poles via dP/dtheta = l cot(theta) P_{lm} - c_l / sin(theta) * P_{l-1,m}.
/// Used to supply analytic gradients for harmonic potentials.
double normalized_plm_dtheta(int l, int m, double theta);

} // namespace spectrace
