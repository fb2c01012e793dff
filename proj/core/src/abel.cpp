#include "spectrace/abel.hpp"

#include "spectrace/error.hpp"
#include "spectrace/fitting.hpp"
#include "spectrace/theta.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace spectrace {

RegularizedSums regularized_partial_sums(const ClusteredSpectrum& mu, double c0, int K_max) {
    const int K = K_max < 0 ? mu.k_max_reliable : K_max;
    if (K < 0 || K > mu.k_max_reliable)
        throw InvalidArgumentError(
            fmt::format("regularized_partial_sums: K_max = {} outside the reliable range "
                        "(k_max_reliable = {})",
                        K, mu.k_max_reliable));
    RegularizedSums out;
    out.c0 = c0;
    out.deficits.resize(K + 1);
    out.partial_sums.resize(K + 1);
    double running = 0.0;
    for (int k = 0; k <= K; ++k) {
        const auto it = mu.clusters.find(k);
        if (it == mu.clusters.end())
            throw InvalidArgumentError(
                fmt::format("regularized_partial_sums: cluster k = {} missing", k));
        // Subtract per eigenvalue before summing: the differences are O(1)
        // while the eigenvalues are O(k^2), so this keeps the accumulated
        // roundoff at the scale of the deficit itself.
        const double ref = static_cast<double>(k) * (k + 1);
        double acc = 0.0;
        for (double lambda : it->second)
            acc += (lambda - ref) - c0;
        out.deficits[k] = acc;
        running += out.deficits[k];
        out.partial_sums[k] = running;
    }
    return out;
}

SeriesLimit extrapolate_partial_sums(const RegularizedSums& sums, int k_lo) {
    const int k_top = static_cast<int>(sums.partial_sums.size()) - 1;
    if (k_lo < 0)
        k_lo = std::max(4, k_top / 2);
    if (k_top - k_lo < 3)
        throw InvalidArgumentError(
            fmt::format("extrapolate_partial_sums: window [{}, {}] too short", k_lo, k_top));
    std::vector<std::pair<double, double>> samples;
    samples.reserve(k_top - k_lo + 1);
    double scale = 1.0;
    for (int k = k_lo; k <= k_top; ++k) {
        samples.emplace_back(static_cast<double>(k), sums.partial_sums[k]);
        scale = std::max(scale, std::abs(sums.partial_sums[k]));
    }
    const FitResult fit = fit_partial_sum_limit(samples);
    SeriesLimit out;
    out.limit = fit.coefficients[0];
    out.coefficients = fit.coefficients;
    out.residual = fit.residual_norm;
    out.threshold = 1e-4 * scale;
    out.ok = out.residual <= out.threshold;
    out.model_id = fit.model_id;
    return out;
}

double abel_sum(std::span<const double> deficits, double t) {
    if (!(t > 0))
        throw InvalidArgumentError("abel_sum: t must be positive");
    double acc = 0.0;
    for (std::size_t k = 0; k < deficits.size(); ++k)
        acc += deficits[k] * std::exp(-static_cast<double>(k) * (k + 1) * t);
    return acc;
}

double abel_sum(const ClusteredSpectrum& mu, double c0, double t) {
    const RegularizedSums sums = regularized_partial_sums(mu, c0);
    const double value = abel_sum(sums.deficits, t);

    // Tail certification: beyond depth K the deficits are modeled by their
    // observed magnitude over the top quarter of the range, and the k-sum of
    // exp(-k(k+1)t) is bounded by its integral.
    const int K = static_cast<int>(sums.deficits.size()) - 1;
    double d_top = 0.0;
    for (int k = std::max(0, 3 * K / 4); k <= K; ++k)
        d_top = std::max(d_top, std::abs(sums.deficits[k]));
    const double bound = d_top *
                         std::exp(-static_cast<double>(K) * (K + 1) * t) /
                         ((2.0 * K + 1) * t);
    const double threshold = 1e-12 * std::max({std::abs(value), d_top, 1e-9});
    if (bound > threshold) {
        const double rate = static_cast<double>(K) * (K + 1);
        double t_min = 33.0 / rate;
        for (int it = 0; it < 4; ++it)
            t_min = std::log(std::max(d_top, 1e-300) / (threshold * (2.0 * K + 1) * t_min)) /
                    rate;
        throw TailBoundError(
            fmt::format("abel_sum: spectrum depth k <= {} cannot certify t = {:.3e} "
                        "(tail bound {:.3e} > {:.3e}); smallest usable t is {:.3e}",
                        K, t, bound, threshold, t_min),
            t_min);
    }
    return value;
}

SeriesLimit abel_extrapolate(std::span<const std::pair<double, double>> samples) {
    const FitResult fit = fit_asymptotic(samples, "abel-quadratic");
    double scale = 1.0;
    for (const auto& [t, g] : samples)
        scale = std::max(scale, std::abs(g));
    SeriesLimit out;
    out.limit = fit.coefficients[0];
    out.coefficients = fit.coefficients;
    out.residual = fit.residual_norm;
    out.threshold = 1e-5 * scale;
    out.ok = out.residual <= out.threshold;
    out.model_id = fit.model_id;
    return out;
}

std::vector<double> abel_default_grid(int k_max) {
    if (k_max < 6)
        throw InvalidArgumentError("abel_default_grid: k_max too small");
    const double t_min = 33.0 / (static_cast<double>(k_max) * (k_max + 1));
    return geometric_grid(t_min, 8.0 * t_min, 12);
}

} // namespace spectrace
