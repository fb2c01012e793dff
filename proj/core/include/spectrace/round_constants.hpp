#pragma once

/// The two constants governing the regularized trace on the round sphere:
///   c0 = (1/4pi) integral q dS
///   c1 = (1/32pi^3) * DD - (1/16pi) * integral q^2 dS
/// where DD is the double integral of q(w) q(w0) / |sin d(w, w0)| over the
/// product of two spheres (d = geodesic distance). DD is evaluated two
/// independent ways and cross-checked:
///   spectral: Funk-Hecke reduction  DD = sum_lm 2 pi^2 P_l(0)^2 |q_lm|^2
///   direct:   iterated quadrature in geodesic polar coordinates around each
///             outer point, where the area factor sin d cancels the kernel
///             singularity exactly.

#include "spectrace/scalar_field.hpp"

#include <vector>

namespace spectrace {

struct RoundTraceConstants {
    double c0 = 0.0;
    double c1 = 0.0; ///< from the spectral evaluation of DD (the primary route)
    double double_integral_spectral = 0.0;
    double double_integral_direct = 0.0;
    double q_sq_integral = 0.0; ///< integral q^2 dS
    double agreement = 0.0;     ///< |spectral - direct| / max(|..|, q_sq_integral)
};

/// Orthonormal real-harmonic coefficients of a field on the round sphere up
/// to degree L, by product quadrature exact at that band limit.
std::vector<HarmonicCoeff> project_round_harmonics(const ScalarField& q, int L);

/// Both evaluations of the kernel double integral plus the assembled
/// constants. Harmonic fields use their own coefficients; other fields are
/// projected up to band_hint (default 24). Throws KernelEvaluationError when
/// the two DD evaluations disagree beyond 1e-6 relative.
RoundTraceConstants round_trace_constants(const ScalarField& q, int band_hint = -1);

} // namespace spectrace
