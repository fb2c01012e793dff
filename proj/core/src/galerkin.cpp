#include "spectrace/galerkin.hpp"

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

constexpr double kPi = 3.14159265358979323846;

/// Legendre bandwidth of a zonal field, measured by projecting onto the
/// normalized P~_l0 up to l_probe and locating the last coefficient above
/// 1e-11 of the largest.
int measured_zonal_band(const ScalarField& q, int l_probe) {
    const QuadratureRule gl = gauss_legendre(2 * l_probe + 2, -1.0, 1.0);
    std::vector<double> gv(gl.size());
    for (int i = 0; i < gl.size(); ++i)
        gv[i] = q.value(std::acos(gl.nodes[i]), 0.0);
    std::vector<double> coef(l_probe + 1, 0.0), row(l_probe + 1);
    for (int i = 0; i < gl.size(); ++i) {
        normalized_plm_row(0, l_probe, gl.nodes[i], row);
        const double wq = gl.weights[i] * gv[i];
        for (int l = 0; l <= l_probe; ++l)
            coef[l] += wq * row[l];
    }
    double cmax = 0.0;
    for (double c : coef)
        cmax = std::max(cmax, std::abs(c));
    int band = 0;
    for (int l = 0; l <= l_probe; ++l)
        if (std::abs(coef[l]) > 1e-11 * std::max(cmax, 1e-300))
            band = l;
    return band;
}

ClusteredSpectrum exact_round_spectrum(int L_max, const std::string& provenance) {
    std::vector<double> flat;
    flat.reserve((L_max + 1) * (L_max + 1));
    for (int l = 0; l <= L_max; ++l)
        flat.insert(flat.end(), 2 * l + 1, static_cast<double>(l) * (l + 1));
    return assemble_clusters(flat, L_max, provenance);
}

ClusteredSpectrum zonal_galerkin(const ScalarField& q, int L_max, int band, int threads) {
    const int k_max_reliable = L_max - band - 4;
    if (k_max_reliable < 0)
        throw InvalidArgumentError(
            fmt::format("sphere_galerkin: potential bandwidth {} leaves no reliable "
                        "clusters at L_max = {}",
                        band, L_max));

    const QuadratureRule gl = gauss_legendre(L_max + band + 2, -1.0, 1.0);
    std::vector<double> gv(gl.size());
    double mean = 0.0;
    for (int i = 0; i < gl.size(); ++i) {
        gv[i] = q.value(std::acos(gl.nodes[i]), 0.0);
        mean += 0.5 * gl.weights[i] * gv[i];
    }

    // Independent m-blocks; slot per m, merged in m order afterwards.
    std::vector<std::vector<double>> slots(L_max + 1);
    parallel_for(
        L_max + 1,
        [&](int m) {
            const int n = L_max - m + 1; // basis l = m .. L_max
            // Basis table P(i, j) = P~_{m+j, m}(x_i), premultiplied by the
            // quadrature weight and potential sample so that the element is
            // a plain dot product against the unscaled rows.
            Eigen::MatrixXd raw(gl.size(), n), scaled(gl.size(), n);
            std::vector<double> row(n);
            for (int i = 0; i < gl.size(); ++i) {
                normalized_plm_row(m, L_max, gl.nodes[i], row);
                const double wq = 2.0 * kPi * gl.weights[i] * gv[i];
                for (int j = 0; j < n; ++j) {
                    raw(i, j) = row[j];
                    scaled(i, j) = wq * row[j];
                }
            }
            Eigen::VectorXd eigenvalues;
            if (band <= 1) {
                Eigen::VectorXd diag(n), sub(std::max(0, n - 1));
                for (int j = 0; j < n; ++j) {
                    const double l = m + j;
                    diag(j) = l * (l + 1) + raw.col(j).dot(scaled.col(j));
                    if (j + 1 < n)
                        sub(j) = band < 1 ? 0.0 : raw.col(j).dot(scaled.col(j + 1));
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
                solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
                eigenvalues = solver.eigenvalues();
            } else {
                Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
                for (int j = 0; j < n; ++j) {
                    const double l = m + j;
                    block(j, j) = l * (l + 1) + raw.col(j).dot(scaled.col(j));
                    for (int jp = j + 1; jp <= std::min(n - 1, j + band); ++jp) {
                        const double e = raw.col(j).dot(scaled.col(jp));
                        block(j, jp) = e;
                        block(jp, j) = e;
                    }
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block,
                                                                      Eigen::EigenvaluesOnly);
                eigenvalues = solver.eigenvalues();
            }
            slots[m].assign(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
        },
        threads);

    std::vector<double> flat;
    flat.reserve((L_max + 1) * (L_max + 1));
    for (int m = 0; m <= L_max; ++m)
        for (double lambda : slots[m]) {
            flat.push_back(lambda);
            if (m > 0) // the sin(m phi) block is identical for zonal q
                flat.push_back(lambda);
        }
    std::sort(flat.begin(), flat.end());
    return assemble_clusters(
        flat, k_max_reliable,
        fmt::format("sphere-galerkin-zonal L_max={} band={}", L_max, band), mean);
}

ClusteredSpectrum dense_galerkin(const ScalarField& q, int L_max, int band_hint,
                                 int /*threads*/) {
    const int N = (L_max + 1) * (L_max + 1);
    const QuadratureRule glx = gauss_legendre(L_max + band_hint + 2, -1.0, 1.0);
    const int n_phi = 2 * L_max + 2 * band_hint + 4;

    // Basis matrix Y(node, basis) over the product grid and the diagonal of
    // quadrature weight times potential sample; Q = Y^T diag(w q) Y.
    const int n_nodes = glx.size() * n_phi;
    Eigen::MatrixXd Y(n_nodes, N);
    Eigen::VectorXd wq(n_nodes);
    std::vector<std::vector<double>> plm(L_max + 1); // per x-node reuse buffer
    std::vector<double> row(L_max + 1);
    for (int i = 0; i < glx.size(); ++i) {
        const double x = glx.nodes[i];
        const double theta = std::acos(x);
        for (int m = 0; m <= L_max; ++m) {
            plm[m].assign(L_max - m + 1, 0.0);
            normalized_plm_row(m, L_max, x, plm[m]);
        }
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * kPi * j / n_phi;
            const int node = i * n_phi + j;
            wq(node) = glx.weights[i] * (2.0 * kPi / n_phi) * q.value(theta, phi);
            for (int l = 0; l <= L_max; ++l) {
                const int base = l * l + l; // index of (l, m=0)
                Y(node, base) = plm[0][l];
                for (int m = 1; m <= l; ++m) {
                    const double p = std::sqrt(2.0) * plm[m][l - m];
                    Y(node, base + m) = p * std::cos(m * phi);
                    Y(node, base - m) = p * std::sin(m * phi);
                }
            }
        }
    }
    Eigen::MatrixXd Q = Y.transpose() * wq.asDiagonal() * Y;

    const double scale = std::max(Q.cwiseAbs().maxCoeff(), 1e-300);
    const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(1.0, scale))
        throw DiscretizationError(
            fmt::format("sphere_galerkin: assembled matrix asymmetric by {:.3e} "
                        "(quadrature inconsistency)",
                        asym));
    Q = ((Q + Q.transpose()) / 2.0).eval();

    // Effective bandwidth in l, measured from the assembled matrix itself.
    int band = 0;
    for (int l = 0; l <= L_max; ++l)
        for (int lp = l; lp <= L_max; ++lp) {
            if (lp - l <= band)
                continue;
            bool coupled = false;
            for (int m = -l; m <= l && !coupled; ++m)
                for (int mp = -lp; mp <= lp && !coupled; ++mp)
                    coupled = std::abs(Q(l * l + l + m, lp * lp + lp + mp)) > 1e-10 * scale;
            if (coupled)
                band = lp - l;
        }
    const int k_max_reliable = L_max - band - 4;
    if (k_max_reliable < 0)
        throw InvalidArgumentError(
            fmt::format("sphere_galerkin: measured potential bandwidth {} leaves no "
                        "reliable clusters at L_max = {}",
                        band, L_max));

    for (int l = 0; l <= L_max; ++l)
        for (int m = -l; m <= l; ++m)
            Q(l * l + l + m, l * l + l + m) += static_cast<double>(l) * (l + 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Q, Eigen::EigenvaluesOnly);
    std::vector<double> flat(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
    std::sort(flat.begin(), flat.end());
    return assemble_clusters(
        flat, k_max_reliable,
        fmt::format("sphere-galerkin-dense L_max={} band={}", L_max, band),
        wq.sum() / (4.0 * kPi));
}

} // namespace

double zonal_matrix_element(const ScalarField& q, int l, int lp, int m, int quad_order) {
    if (m < 0 || l < m || lp < m)
        throw InvalidArgumentError("zonal_matrix_element: need 0 <= m <= l, lp");
    const int L = std::max(l, lp);
    const QuadratureRule gl = gauss_legendre(quad_order, -1.0, 1.0);
    std::vector<double> row(L - m + 1);
    double acc = 0.0;
    for (int i = 0; i < gl.size(); ++i) {
        normalized_plm_row(m, L, gl.nodes[i], row);
        acc += gl.weights[i] * q.value(std::acos(gl.nodes[i]), 0.0) * row[l - m] * row[lp - m];
    }
    return 2.0 * kPi * acc;
}

ClusteredSpectrum sphere_galerkin(const ScalarField& q, int L_max, int threads) {
    if (L_max < 8)
        throw InvalidArgumentError(
            fmt::format("sphere_galerkin: L_max = {} below the minimum of 8", L_max));
    if (q.is_zero())
        return exact_round_spectrum(L_max,
                                    fmt::format("sphere-galerkin-free L_max={}", L_max));
    if (q.zonal()) {
        const int band = q.band() >= 0 ? q.band() : measured_zonal_band(q, L_max);
        return zonal_galerkin(q, L_max, band, threads);
    }
    const int band_hint = q.band() >= 0 ? q.band() : std::min(L_max, 32);
    return dense_galerkin(q, L_max, band_hint, threads);
}

} // namespace spectrace
