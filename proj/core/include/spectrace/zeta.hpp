#pragma once

#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"

namespace spectrace {

/// Values of the analytic continuation of the spectral zeta function of
/// -Laplacian + q at the two points entering the trace identities.
struct ZetaValues {
    double zeta0 = 0; ///< zeta(0) = (1/4pi) integral (K/3 - q) dS
    double zeta1 = 0; ///< zeta(1), see zeta_values() for the closed form
};

/// Convention for the curvature weight gamma multiplying -2q inside the
/// zeta(1) integrand. The default (curvature - 1) is the one under which the
/// constant-potential consistency checks close; the bare-curvature variant is
/// kept behind this switch for comparison studies.
enum class GammaConvention {
    curvature_minus_one, ///< gamma = K - 1 (default)
    curvature,           ///< gamma = K
};

/// Which operator's small-time heat coefficients to produce:
///   F - the fixed round-sphere reference values (1, 1/3, 1/15),
///   L - the metric Laplacian alone (q ignored),
///   M - the metric Laplacian plus the potential q.
enum class HeatKind { F, L, M };

struct HeatCoefficients {
    double h0 = 0; ///< coefficient of 1/t  (area / 4pi)
    double h1 = 0; ///< constant term       (zeta(0))
    double h2 = 0; ///< coefficient of t    (-zeta(1))
    HeatKind which = HeatKind::L;
};

/// Zeta values by surface quadrature:
///   zeta0 = (1/4pi) integral (K/3 - q) dS
///   zeta1 = -(1/60pi) integral (Delta K + K^2) dS
///           -(1/24pi) integral (-Delta q + 3q^2 - 2q*gamma) dS
/// with gamma per the convention switch. The Delta K term is integrated
/// literally (not dropped via the divergence theorem; that identity is a
/// property test, not an assumption).
ZetaValues zeta_values(const MetricPatch& metric, const ScalarField& q,
                       GammaConvention gamma = GammaConvention::curvature_minus_one);

/// integral (Delta K + K^2) dS -- the curvature piece of zeta(1).
double curvature_zeta_integral(const MetricPatch& metric);

/// integral (-Delta q + 3q^2 - 2q*gamma) dS -- the potential piece of zeta(1).
double potential_zeta_integral(const MetricPatch& metric, const ScalarField& q,
                               GammaConvention gamma = GammaConvention::curvature_minus_one);

/// (h0, h1, h2) = (area/4pi, zeta0, -zeta1) of the requested operator;
/// HeatKind::F returns the exact reference constants (1, 1/3, 1/15).
HeatCoefficients heat_coefficients_from_zeta(
    const MetricPatch& metric, const ScalarField& q, HeatKind which,
    GammaConvention gamma = GammaConvention::curvature_minus_one);

} // namespace spectrace
