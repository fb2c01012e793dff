#include "spectrace/theta.hpp"

#include "spectrace/error.hpp"
#include "spectrace/fitting.hpp"
#include "spectrace/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace spectrace {

namespace {

double tail_min_usable_t(int K, double band) {
    // Solve exp(band*t) * exp(-K(K+1)t) / t = 1e-14 for t by fixed point.
    const double rate = static_cast<double>(K) * (K + 1) - band;
    double t = 33.0 / std::max(rate, 1.0);
    for (int it = 0; it < 4; ++it)
        t = (std::log(1e14) + std::log(1.0 / t)) / std::max(rate, 1.0);
    return t;
}

} // namespace

double theta_min_usable_t(const ClusteredSpectrum& spectrum) {
    const int K = spectrum.k_max_reliable;
    if (K < 1)
        throw InvalidArgumentError("theta_min_usable_t: spectrum has no reliable clusters");
    double band = 0.0;
    for (const auto& [k, vals] : spectrum.clusters) {
        if (k > K)
            break;
        const double ref = static_cast<double>(k) * (k + 1);
        for (double lambda : vals)
            band = std::max(band, std::abs(lambda - ref));
    }
    return tail_min_usable_t(K, band);
}

double theta_eval(const ClusteredSpectrum& spectrum, double t) {
    if (!(t > 0))
        throw InvalidArgumentError("theta_eval: t must be positive");
    const int K = spectrum.k_max_reliable;
    if (K < 0)
        throw InvalidArgumentError("theta_eval: spectrum has no reliable clusters");

    double value = 0.0, band = 0.0;
    for (const auto& [k, vals] : spectrum.clusters) {
        if (k > K)
            break;
        const double ref = static_cast<double>(k) * (k + 1);
        for (double lambda : vals) {
            value += std::exp(-lambda * t);
            band = std::max(band, std::abs(lambda - ref));
        }
    }

    // Integral tail bound, valid once (2K+1)^2 t > 2 makes the summand
    // decreasing beyond the truncation.
    const double decrease = (2.0 * K + 1) * (2.0 * K + 1) * t;
    const double bound =
        std::exp(band * t) * std::exp(-static_cast<double>(K) * (K + 1) * t) / t;
    if (decrease <= 2.0 || bound > 1e-14 * std::max(1.0, value)) {
        const double t_min = tail_min_usable_t(K, band);
        throw TailBoundError(
            fmt::format("theta_eval: spectrum depth k <= {} cannot certify t = {:.3e} "
                        "(tail bound {:.3e}); smallest usable t is {:.3e}",
                        K, t, bound, t_min),
            t_min);
    }
    return value;
}

ClusteredSpectrum round_exact_spectrum(int k_max) {
    if (k_max < 0)
        throw InvalidArgumentError("round_exact_spectrum: k_max must be >= 0");
    ClusteredSpectrum out;
    out.k_max_reliable = k_max;
    out.provenance = fmt::format("round-exact k_max={}", k_max);
    for (int k = 0; k <= k_max; ++k)
        out.clusters[k].assign(2 * k + 1, static_cast<double>(k) * (k + 1));
    return out;
}

std::vector<double> geometric_grid(double t_lo, double t_hi, int n) {
    if (!(t_lo > 0) || !(t_hi > t_lo) || n < 2)
        throw InvalidArgumentError("geometric_grid: need 0 < t_lo < t_hi and n >= 2");
    std::vector<double> grid(n);
    const double ratio = std::log(t_hi / t_lo);
    for (int i = 0; i < n; ++i)
        grid[i] = t_lo * std::exp(ratio * i / (n - 1));
    return grid;
}

HeatFit fit_heat_coefficients(const ClusteredSpectrum& spectrum,
                              const std::vector<double>& t_grid, HeatKind which,
                              int threads) {
    std::vector<std::pair<double, double>> samples(t_grid.size());
    parallel_for(
        static_cast<int>(t_grid.size()),
        [&](int i) { samples[i] = {t_grid[i], theta_eval(spectrum, t_grid[i])}; }, threads);

    const FitResult fit = fit_asymptotic(samples, "theta-laurent");
    HeatFit out;
    out.coefficients.h0 = fit.coefficients[0];
    out.coefficients.h1 = fit.coefficients[1];
    out.coefficients.h2 = fit.coefficients[2];
    out.coefficients.which = which;
    out.residual = fit.residual_norm;
    double scale = 1.0;
    for (const auto& [t, v] : samples)
        scale = std::max(scale, std::abs(t * v));
    out.threshold = 1e-4 * scale;
    out.asymptote_warning = out.residual > out.threshold;
    return out;
}

} // namespace spectrace
