#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spectrace {

/// Autonomous vector field f: R^d -> R^d written into dydt.
using VectorField = std::function<void(const double* y, double* dydt)>;

struct OdeOptions {
    double tol = 1e-10;        ///< per-step error tolerance (both abs and rel), in [1e-14, 1e-4]
    long max_steps = 100'000'000;
};

struct OdeResult {
    std::vector<double> y_final;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

/// Integrates y' = f(y) from y0 over `length` (signed: negative integrates the
/// reversed field) with an adaptive Dormand-Prince 5(4) embedded pair.
///
/// Dense output: when `dense` is non-null and `sample_count` > 0, the state is
/// recorded at the uniformly spaced parameter values s_j = j*length/sample_count,
/// j = 0..sample_count (inclusive of both ends), laid out row-major as
/// dense[(sample_count+1) * d]. Samples are genuine integration points (adaptive
/// steps are clipped to the sample boundaries), so every sample carries the full
/// 5th-order step accuracy; no interpolant is involved.
///
/// An optional per-accepted-step callback receives (s, y) after each accepted
/// step and may mutate y in place (used for chart transitions; the mutation
/// must preserve the represented state).
///
/// Throws InvalidArgumentError for tol outside [1e-14, 1e-4]; StiffnessError
/// when the step size underflows below 1e-12 * |length| (message names the
/// parameter value and state reached).
OdeResult ode_integrate(int dim, const VectorField& f, std::span<const double> y0,
                        double length, const OdeOptions& opts = {},
                        std::vector<double>* dense = nullptr, int sample_count = 0,
                        const std::function<void(double s, double* y)>& on_step = nullptr);

} // namespace spectrace
