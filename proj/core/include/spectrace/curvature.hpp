#pragma once

#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"

namespace spectrace {

/// Gaussian curvature from the metric coefficients and their partials, by the
/// explicit closed form
///
///   K = [ C A2^2 - 2B A2 B2 + A A2 C2 + 2B^2 A22 - 2AC A22 - 2C B2 A1
///         + B C2 A1 + 4B B2 B1 - 2A C2 B1 - B A2 C1 + C A1 C1 - 2B B1 C1
///         + A C1^2 - 4B^2 B12 + 4AC B12 + 2B^2 C11 - 2AC C11 ]
///       / (4 (B^2 - AC)^2)
///
/// (an expansion of the Brioschi determinant; the determinant form is kept in
/// the test-suite as an independent oracle). Throws PoleProximityError inside
/// the pole exclusion radius of a polar chart and DegenerateMetricError when
/// |AC - B^2| < 1e-12 at an interior point.
double gauss_curvature(const MetricPatch& metric, double u1, double u2);

/// Laplace-Beltrami operator applied to a scalar field at a point:
///   (1/sqrt(det g)) d_i( sqrt(det g) g^{ij} d_j f ).
/// Uses the field's analytic gradient/Hessian when supplied, centered finite
/// differences otherwise. Throws PoleProximityError within the patch's pole
/// exclusion radius.
double laplace_beltrami(const MetricPatch& metric, const ScalarField& field, double u1, double u2);

/// The curvature as a ScalarField. For builtin revolution metrics the value,
/// gradient and Hessian all come from the smooth profile chain
///   K(x) = (1 + p - x p') / (1 + p)^3,  x = cos theta,
/// which is well-conditioned at the poles and whose pointwise equality with
/// the closed form above is property-tested; this keeps integrands like
/// Delta K free of finite-difference noise. Other patches get values from
/// gauss_curvature with finite-difference derivative fallbacks.
ScalarField curvature_field(const MetricPatch& metric);

} // namespace spectrace
