#include "spectrace/fitting.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "spectrace/error.hpp"

namespace spectrace {

namespace {

/// Shared LS core: solve min ||X c - y|| with a rank check scaled to the
/// column norms, returning coefficients and the RMS residual.
FitResult solve_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::string model_id) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-12);
    if (qr.rank() < X.cols())
        throw FitDegenerateError(fmt::format(
            "fit '{}': design matrix rank {} < {} (degenerate sample placement)",
            model_id, static_cast<int>(qr.rank()), static_cast<int>(X.cols())));
    const Eigen::VectorXd c = qr.solve(y);
    const double rms = std::sqrt((X * c - y).squaredNorm() / static_cast<double>(X.rows()));
    FitResult res;
    res.coefficients.assign(c.data(), c.data() + c.size());
    res.residual_norm = rms;
    res.model_id = std::move(model_id);
    return res;
}

void check_t_samples(std::span<const std::pair<double, double>> samples, int arity,
                     const std::string& model_id) {
    if (static_cast<int>(samples.size()) < arity + 2)
        throw InvalidArgumentError(fmt::format("fit '{}': need at least {} samples, got {}",
                                               model_id, arity + 2, samples.size()));
    double tmin = samples[0].first, tmax = samples[0].first;
    for (const auto& [t, v] : samples) {
        (void)v;
        if (!(t > 0.0))
            throw InvalidArgumentError(fmt::format("fit '{}': all t must be positive, got {}", model_id, t));
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    if (tmax / tmin < 8.0 * (1.0 - 1e-12))
        throw InvalidArgumentError(fmt::format(
            "fit '{}': t range must span a factor >= 8, got {:.3g}", model_id, tmax / tmin));
}

} // namespace

FitResult fit_asymptotic(std::span<const std::pair<double, double>> samples,
                         const std::string& model_id) {
    const int n = static_cast<int>(samples.size());
    if (model_id == "theta-laurent") {
        check_t_samples(samples, 3, model_id);
        Eigen::MatrixXd X(n, 3);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            const auto [t, v] = samples[i];
            X(i, 0) = 1.0;
            X(i, 1) = t;
            X(i, 2) = t * t;
            y(i) = t * v; // fit on t*v: h0 + h1 t + h2 t^2
        }
        return solve_ls(X, y, model_id);
    }
    if (model_id == "abel-quadratic") {
        check_t_samples(samples, 3, model_id);
        Eigen::MatrixXd X(n, 3);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            const auto [t, v] = samples[i];
            X(i, 0) = 1.0;
            X(i, 1) = t;
            X(i, 2) = t * t;
            y(i) = v;
        }
        return solve_ls(X, y, model_id);
    }
    throw InvalidArgumentError(fmt::format("fit_asymptotic: unknown model_id '{}'", model_id));
}

FitResult fit_partial_sum_limit(std::span<const std::pair<double, double>> samples) {
    const int n = static_cast<int>(samples.size());
    if (n < 4) throw InvalidArgumentError("fit_partial_sum_limit: need at least 4 samples");
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const auto [K, S] = samples[i];
        if (!(K > 0.0)) throw InvalidArgumentError("fit_partial_sum_limit: K must be positive");
        X(i, 0) = 1.0;
        X(i, 1) = 1.0 / K;
        y(i) = S;
    }
    return solve_ls(X, y, "partial-sum-k1");
}

} // namespace spectrace
