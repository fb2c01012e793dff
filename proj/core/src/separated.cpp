#include "spectrace/separated.hpp"

#include "spectrace/error.hpp"
#include "spectrace/legendre.hpp"
#include "spectrace/parallel.hpp"
#include "spectrace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace spectrace {

namespace {

void validate_inputs(const MetricPatch& metric, const ScalarField& q) {
    if (!metric.has_profile())
        throw InvalidArgumentError(
            "separated solver: metric must be a surface of revolution with a profile");
    if (!q.is_zero() && !q.zonal())
        throw InvalidArgumentError(
            "separated solver: potential must be zonal (no separation otherwise)");
}

std::vector<double> galerkin_mode(const MetricPatch& metric, const ScalarField& q, int m,
                                  int count, const SeparatedOptions& opts) {
    const RevolutionProfile& prof = metric.profile();
    const int n = opts.n_basis > 0 ? opts.n_basis : count + 20;
    if (n < count)
        throw InvalidArgumentError(
            fmt::format("separated solver: n_basis = {} below requested count {}", n, count));
    const int quad = opts.quad_order > 0 ? opts.quad_order : std::max(260, 2 * (m + n) + 40);
    const QuadratureRule gl = gauss_legendre(quad, -1.0, 1.0);
    const int L = m + n - 1;

    // Tables P(i, j) = P~_{m+j, m}(x_i) and Q(i, j) = (1-x^2) dP~/dx at x_i.
    Eigen::MatrixXd P(gl.size(), n), Q(gl.size(), n);
    Eigen::VectorXd w_flux(gl.size()), w_mass(gl.size()), w_pot(gl.size());
    std::vector<double> prow(n), qrow(n);
    for (int i = 0; i < gl.size(); ++i) {
        const double x = gl.nodes[i];
        normalized_plm_row_with_deriv(m, L, x, prow, qrow);
        for (int j = 0; j < n; ++j) {
            P(i, j) = prow[j];
            Q(i, j) = qrow[j];
        }
        const double one_plus_h = 1.0 + prof.p(x);
        const double s2 = 1.0 - x * x;
        const double qval = q.is_zero() ? 0.0 : q.value(std::acos(x), 0.0);
        w_flux(i) = gl.weights[i] / (s2 * one_plus_h);
        w_mass(i) = gl.weights[i] * one_plus_h;
        w_pot(i) = w_mass(i) * (static_cast<double>(m) * m / s2 + qval);
    }

    Eigen::MatrixXd A = Q.transpose() * w_flux.asDiagonal() * Q +
                        P.transpose() * w_pot.asDiagonal() * P;
    Eigen::MatrixXd B = P.transpose() * w_mass.asDiagonal() * P;

    const double scale = std::max({A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff(), 1.0});
    const double asym = std::max((A - A.transpose()).cwiseAbs().maxCoeff(),
                                 (B - B.transpose()).cwiseAbs().maxCoeff());
    if (asym > 1e-10 * scale)
        throw DiscretizationError(
            fmt::format("separated solver: mode {} matrices asymmetric by {:.3e}", m, asym));
    A = ((A + A.transpose()) / 2.0).eval();
    B = ((B + B.transpose()) / 2.0).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, B,
                                                                     Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw DiscretizationError(
            fmt::format("separated solver: generalized eigensolve failed for mode {}", m));
    return {solver.eigenvalues().data(), solver.eigenvalues().data() + count};
}

std::vector<double> fd_mode(const MetricPatch& metric, const ScalarField& q, int m, int count,
                            const SeparatedOptions& opts) {
    const RevolutionProfile& prof = metric.profile();
    const int n = opts.n_grid;
    if (n < 200)
        throw InvalidArgumentError(
            fmt::format("separated solver: n_grid = {} below the floor of 200", n));
    if (count > n)
        throw InvalidArgumentError(
            fmt::format("separated solver: requested {} eigenvalues from {} cells", count, n));
    const double dx = 2.0 / n;

    // Flux coefficient p = (1-x^2)/(1+h) at half-points; it vanishes exactly
    // at both endpoints, which encodes the natural degenerate boundary
    // condition with no extra rows.
    std::vector<double> flux(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double xh = -1.0 + i * dx;
        flux[i] = (1.0 - xh * xh) / (1.0 + prof.p(xh));
    }
    Eigen::VectorXd diag(n), sub(n - 1), weight(n);
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + (i + 0.5) * dx;
        const double w = 1.0 + prof.p(x);
        const double qval = q.is_zero() ? 0.0 : q.value(std::acos(x), 0.0);
        weight(i) = w;
        diag(i) = (flux[i] + flux[i + 1]) / (dx * dx) +
                  w * (static_cast<double>(m) * m / (1.0 - x * x) + qval);
        if (i + 1 < n)
            sub(i) = -flux[i + 1] / (dx * dx);
    }
    // Symmetrize the generalized problem by the diagonal weight.
    for (int i = 0; i < n; ++i)
        diag(i) /= weight(i);
    for (int i = 0; i + 1 < n; ++i)
        sub(i) /= std::sqrt(weight(i) * weight(i + 1));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw DiscretizationError(
            fmt::format("separated solver: tridiagonal eigensolve failed for mode {}", m));
    return {solver.eigenvalues().data(), solver.eigenvalues().data() + count};
}

} // namespace

std::vector<double> separated_mode_eigenvalues(const MetricPatch& metric, const ScalarField& q,
                                               int m, int count, const SeparatedOptions& opts) {
    validate_inputs(metric, q);
    if (m < 0 || count < 1)
        throw InvalidArgumentError("separated solver: need m >= 0 and count >= 1");
    return opts.backend == SeparatedBackend::galerkin_legendre
               ? galerkin_mode(metric, q, m, count, opts)
               : fd_mode(metric, q, m, count, opts);
}

ClusteredSpectrum separated_spectrum(const MetricPatch& metric, const ScalarField& q, int k_cap,
                                     const SeparatedOptions& opts) {
    validate_inputs(metric, q);
    if (k_cap < 1)
        throw InvalidArgumentError("separated solver: k_cap must be >= 1");

    std::vector<std::vector<double>> slots(k_cap + 1);
    parallel_for(
        k_cap + 1,
        [&](int m) {
            // Mode m contributes eigenvalue #j to cluster k = m + j.
            slots[m] = separated_mode_eigenvalues(metric, q, m, k_cap - m + 1, opts);
        },
        opts.threads);

    std::vector<double> flat;
    flat.reserve((k_cap + 1) * (k_cap + 1));
    for (int m = 0; m <= k_cap; ++m)
        for (double lambda : slots[m]) {
            flat.push_back(lambda);
            if (m > 0)
                flat.push_back(lambda);
        }
    std::sort(flat.begin(), flat.end());
    // Cluster binning is relative to the potential's metric mean so that a
    // large constant component does not push the low clusters across the
    // rounding boundaries.
    double mean = 0.0;
    if (!q.is_zero()) {
        const QuadratureRule gl = gauss_legendre(160, -1.0, 1.0);
        double q_int = 0.0, area = 0.0;
        for (int i = 0; i < gl.size(); ++i) {
            const double x = gl.nodes[i];
            const double w = gl.weights[i] * (1.0 + metric.profile().p(x));
            q_int += w * q.value(std::acos(x), 0.0);
            area += w;
        }
        mean = q_int / area;
    }
    std::string detail;
    if (opts.backend == SeparatedBackend::galerkin_legendre)
        detail = fmt::format("galerkin-legendre basis={}",
                             opts.n_basis > 0 ? fmt::format("{}", opts.n_basis)
                                              : std::string("auto+20"));
    else
        detail = fmt::format("fd-divergence grid={}", opts.n_grid);
    return assemble_clusters(flat, k_cap,
                             fmt::format("separated-{} k_cap={} profile={}", detail, k_cap,
                                         metric.profile().family),
                             mean);
}

} // namespace spectrace
