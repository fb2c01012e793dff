#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spectrace {

/// Result of an asymptotic-model least-squares fit.
struct FitResult {
    std::vector<double> coefficients;
    double residual_norm = 0.0; ///< RMS residual in the fitting space
    std::string model_id;
};

/// Least-squares fit of small-t asymptotic models to samples (t_i, v_i).
///
/// Supported model_id values:
///   "theta-laurent"   v ~ h0/t + h1 + h2*t. Fitted on the transformed series
///                     t*v with design [1, t, t^2] to tame the 1/t pole;
///                     residual_norm is reported in the transformed space.
///   "abel-quadratic"  v ~ S + alpha*t + beta*t^2 (plain LS).
///
/// Preconditions: at least arity+2 samples, every t > 0, and max(t)/min(t) >= 8.
/// Throws InvalidArgumentError on precondition violations and
/// FitDegenerateError when the design matrix is numerically rank deficient.
FitResult fit_asymptotic(std::span<const std::pair<double, double>> samples,
                         const std::string& model_id);

/// Least-squares fit of the partial-sum extrapolation model S + gamma/K to
/// samples (K_i, S_{K_i}); returns coefficients {S, gamma}.
FitResult fit_partial_sum_limit(std::span<const std::pair<double, double>> samples);

} // namespace spectrace
