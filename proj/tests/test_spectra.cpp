// Spectra layer: round-sphere Galerkin solver, separated surface-of-
// revolution solvers (spectral and finite-difference backends), and cluster
// bookkeeping. Independent oracles: exact round eigenvalues k(k+1), exact
// constant-potential shifts, the closed-form degree-1 Legendre coupling
// element, variational eigenvalue bounds, and cross-validation between the
// two unrelated discretizations.

#include <doctest.h>

#include "spectrace/clusters.hpp"
#include "spectrace/error.hpp"
#include "spectrace/galerkin.hpp"
#include "spectrace/legendre.hpp"
#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"
#include "spectrace/separated.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

using namespace spectrace;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> flat_through(const ClusteredSpectrum& s, int k_hi) {
    std::vector<double> out;
    for (int k = 0; k <= k_hi; ++k) {
        const auto& c = s.clusters.at(k);
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

/// Synthetic exact round spectrum: k(k+1) with multiplicity 2k+1, k <= k_hi.
std::vector<double> exact_round_list(int k_hi) {
    std::vector<double> v;
    for (int k = 0; k <= k_hi; ++k)
        for (int i = 0; i < 2 * k + 1; ++i) v.push_back(double(k) * (k + 1));
    return v;
}
} // namespace

TEST_CASE("free galerkin spectrum is exactly k(k+1) with multiplicity 2k+1") {
    const ClusteredSpectrum s = sphere_galerkin(ScalarField::constant(0.0), 30);
    // A zero potential couples nothing, so every cluster up to L_max is exact:
    // no bandwidth deflation applies.
    CHECK(s.k_max_reliable == 30);
    for (int k = 0; k <= s.k_max_reliable; ++k) {
        const auto& c = s.clusters.at(k);
        REQUIRE(int(c.size()) == 2 * k + 1);
        for (double lam : c) CHECK(std::abs(lam - double(k) * (k + 1)) < 1e-10);
    }
    CHECK(!s.provenance.empty());
}

TEST_CASE("constant potential shifts every eigenvalue by exactly c") {
    const double c = 0.3;
    const ClusteredSpectrum s = sphere_galerkin(ScalarField::constant(c), 24);
    for (int k = 0; k <= s.k_max_reliable; ++k)
        for (double lam : s.clusters.at(k))
            CHECK(std::abs(lam - (double(k) * (k + 1) + c)) < 1e-12);
}

TEST_CASE("degree-1 zonal coupling element matches its closed form") {
    // <Y_{l+1,m} | cos(theta) | Y_{l,m}> = sqrt(((l+1)^2 - m^2) /
    // ((2l+1)(2l+3))), the three-term Legendre recurrence in normalized form.
    const ScalarField q = ScalarField::zonal_x(
        [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; });
    for (int l = 0; l <= 10; ++l) {
        for (int m = 0; m <= l; ++m) {
            const double elem = zonal_matrix_element(q, l + 1, l, m, 64);
            const double exact = std::sqrt((double(l + 1) * (l + 1) - double(m) * m) /
                                           (double(2 * l + 1) * (2 * l + 3)));
            CHECK(std::abs(elem - exact) < 1e-12);
            // Diagonal element vanishes by parity.
            CHECK(std::abs(zonal_matrix_element(q, l, l, m, 64)) < 1e-13);
        }
    }
    // Orthonormality through the same quadrature path: q == 1.
    const ScalarField one = ScalarField::zonal_x([](double) { return 1.0; });
    CHECK(std::abs(zonal_matrix_element(one, 6, 6, 3, 64) - 1.0) < 1e-13);
    CHECK(std::abs(zonal_matrix_element(one, 6, 4, 3, 64)) < 1e-13);
    CHECK_THROWS_AS(zonal_matrix_element(q, 2, 1, 2, 64), InvalidArgumentError);
}

TEST_CASE("odd zonal potential: bounded shifts, vanishing first-order means") {
    // q = 0.3 Y_10 is odd, so every first-order shift vanishes by parity and
    // the second-order cluster means decay like 1/k^2. All shifts obey the
    // variational envelope |shift| <= max|q| = 0.3 sqrt(3/4pi).
    const ScalarField q = ScalarField::harmonic({{1, 0, 0.3}});
    const ClusteredSpectrum s = sphere_galerkin(q, 60);
    CHECK(s.k_max_reliable == 60 - 1 - 4);
    const double envelope = 0.3 * std::sqrt(3.0 / (4 * kPi)) + 1e-12;
    const std::vector<ClusterMoments> stats = cluster_statistics(s);
    for (const ClusterMoments& cm : stats) {
        for (double lam : s.clusters.at(cm.k))
            CHECK(std::abs(lam - double(cm.k) * (cm.k + 1)) <= envelope);
        if (cm.k >= 5) CHECK(std::abs(cm.mean_shift) < 1e-2);
        if (cm.k >= 25) CHECK(std::abs(cm.mean_shift) < 1e-3);
    }
}

TEST_CASE("galerkin truncation: reliable clusters are stable under L growth") {
    const ScalarField q = ScalarField::harmonic({{1, 0, 0.3}});
    const ClusteredSpectrum a = sphere_galerkin(q, 60);
    const ClusteredSpectrum b = sphere_galerkin(q, 75);
    for (int k = 0; k <= 40; ++k) {
        const auto& ca = a.clusters.at(k);
        const auto& cb = b.clusters.at(k);
        REQUIRE(ca.size() == cb.size());
        for (size_t i = 0; i < ca.size(); ++i) CHECK(std::abs(ca[i] - cb[i]) < 1e-8);
    }
}

TEST_CASE("variational bounds: 0 <= q <= 1 shifts each eigenvalue into [0, 1]") {
    // q = (1 + cos theta)/2 in harmonic form; by the min-max principle the
    // i-th eigenvalue moves by an amount between min q = 0 and max q = 1.
    const ScalarField q = ScalarField::harmonic(
        {{0, 0, 0.5 * std::sqrt(4 * kPi)}, {1, 0, 0.5 * std::sqrt(4 * kPi / 3)}});
    const ClusteredSpectrum sq = sphere_galerkin(q, 30);
    const ClusteredSpectrum s0 = sphere_galerkin(ScalarField::constant(0.0), 30);
    const std::vector<double> fq = flat_through(sq, 20);
    const std::vector<double> f0 = flat_through(s0, 20);
    REQUIRE(fq.size() == f0.size());
    for (size_t i = 0; i < fq.size(); ++i) {
        const double shift = fq[i] - f0[i];
        CHECK(shift > -1e-9);
        CHECK(shift < 1.0 + 1e-9);
    }
}

TEST_CASE("dense non-zonal assembly: cluster integrity and truncation stability") {
    const ScalarField q = ScalarField::harmonic({{2, 2, 0.2}, {1, 0, 0.2}});
    const ClusteredSpectrum a = sphere_galerkin(q, 40);
    const ClusteredSpectrum b = sphere_galerkin(q, 48);
    CHECK(a.k_max_reliable == 40 - 2 - 4);
    for (int k = 0; k <= 30; ++k) {
        const auto& ca = a.clusters.at(k);
        const auto& cb = b.clusters.at(k);
        REQUIRE(int(ca.size()) == 2 * k + 1);
        REQUIRE(ca.size() == cb.size());
        for (size_t i = 0; i < ca.size(); ++i) CHECK(std::abs(ca[i] - cb[i]) < 1e-8);
    }
}

TEST_CASE("separated spectral solver reproduces the galerkin spectrum") {
    // Two unrelated discretizations of the same operator (full-sphere
    // harmonic Galerkin vs per-mode Sturm-Liouville) must agree on the round
    // sphere with a zonal potential.
    const ScalarField q = ScalarField::harmonic({{1, 0, 0.3}});
    const MetricPatch round = builtin_metric("round");
    const ClusteredSpectrum direct = sphere_galerkin(q, 30);
    const ClusteredSpectrum sep = separated_spectrum(round, q, 20);
    for (int k = 0; k <= 20; ++k) {
        const auto& cd = direct.clusters.at(k);
        const auto& cs = sep.clusters.at(k);
        REQUIRE(cd.size() == cs.size());
        for (size_t i = 0; i < cd.size(); ++i) CHECK(std::abs(cd[i] - cs[i]) < 1e-6);
    }
}

TEST_CASE("finite-difference backend: m = 0 exactness and second-order m > 0") {
    const MetricPatch round = builtin_metric("round");
    const ScalarField zero = ScalarField::constant(0.0);
    SeparatedOptions fd;
    fd.backend = SeparatedBackend::fd_divergence;

    fd.n_grid = 800;
    const std::vector<double> m0 = separated_mode_eigenvalues(round, zero, 0, 15, fd);
    for (int j = 0; j < 15; ++j) CHECK(std::abs(m0[j] - double(j) * (j + 1)) < 1e-6);

    // m = 2: divergence-form flux stencil converges at second order in the
    // cell width, so halving the width cuts the error by about 4.
    auto worst = [&](int n) {
        fd.n_grid = n;
        const std::vector<double> v = separated_mode_eigenvalues(round, zero, 2, 8, fd);
        double w = 0;
        for (int j = 0; j < 8; ++j) {
            const int l = 2 + j;
            w = std::max(w, std::abs(v[j] - double(l) * (l + 1)));
        }
        return w;
    };
    const double e400 = worst(400);
    const double e800 = worst(800);
    CHECK(e800 < e400);
    CHECK(e400 / e800 > 3.4);
}

TEST_CASE("finite differences cross-validate the spectral backend off the round metric") {
    const MetricPatch zoll = builtin_metric("zoll", 0.1);
    const ScalarField zero = ScalarField::constant(0.0);
    const std::vector<double> spectral =
        separated_mode_eigenvalues(zoll, zero, 0, 6, SeparatedOptions{});
    SeparatedOptions fd;
    fd.backend = SeparatedBackend::fd_divergence;
    fd.n_grid = 1600;
    const std::vector<double> reference = separated_mode_eigenvalues(zoll, zero, 0, 6, fd);
    for (int j = 0; j < 6; ++j) CHECK(std::abs(spectral[j] - reference[j]) < 1e-3);
}

TEST_CASE("zoll spectrum stays clustered within an O(1) envelope") {
    const MetricPatch zoll = builtin_metric("zoll", 0.1);
    const ClusteredSpectrum s = separated_spectrum(zoll, ScalarField::constant(0.0), 20);
    CHECK(s.k_max_reliable >= 20);
    for (int k = 0; k <= 20; ++k) {
        const auto& c = s.clusters.at(k);
        REQUIRE(int(c.size()) == 2 * k + 1);
        for (double lam : c) CHECK(std::abs(lam - double(k) * (k + 1)) < 1.0);
    }
}

TEST_CASE("cluster assembly validates sizes and ordering") {
    const std::vector<double> good = exact_round_list(8);
    const ClusteredSpectrum s = assemble_clusters(good, 8, "synthetic");
    CHECK(s.k_max_reliable == 8);
    CHECK(s.provenance == "synthetic");
    CHECK(int(s.reliable_flat().size()) == 9 * 9); // sum of 2k+1 = (k_hi+1)^2
    CHECK(s.k_top() == 8);

    // Remove one eigenvalue from cluster 5: integrity error naming k = 5.
    std::vector<double> broken = good;
    broken.erase(std::find(broken.begin(), broken.end(), 30.0));
    try {
        assemble_clusters(broken, 8, "synthetic");
        FAIL("expected ClusterIntegrityError");
    } catch (const ClusterIntegrityError& e) {
        CHECK(e.k() == 5);
        CHECK(e.stage() == std::string("clusters"));
    }

    std::vector<double> unsorted = good;
    std::swap(unsorted[3], unsorted[10]);
    CHECK_THROWS_AS(assemble_clusters(unsorted, 8, "synthetic"), InvalidArgumentError);
}

TEST_CASE("cluster moments against a reference spectrum") {
    std::vector<double> base = exact_round_list(6);
    std::vector<double> shifted = base;
    for (double& lam : shifted) lam += 0.25;
    const ClusteredSpectrum sb = assemble_clusters(base, 6);
    const ClusteredSpectrum ss = assemble_clusters(shifted, 6);

    const std::vector<ClusterMoments> rel = cluster_statistics(ss, sb);
    REQUIRE(int(rel.size()) == 7);
    for (const ClusterMoments& cm : rel) {
        CHECK(std::abs(cm.mean_shift - 0.25) < 1e-14);
        CHECK(std::abs(cm.sum_shift - 0.25 * (2 * cm.k + 1)) < 1e-13);
        CHECK(std::abs(cm.sum_sq_shift - 0.0625 * (2 * cm.k + 1)) < 1e-13);
    }

    // Absolute moments against k(k+1) see the same constant shift.
    const std::vector<ClusterMoments> abs = cluster_statistics(ss);
    CHECK(std::abs(abs[3].mean_shift - 0.25) < 1e-14);

    // Mismatched cluster sizes are rejected.
    ClusteredSpectrum truncated = sb;
    truncated.clusters.at(4).pop_back();
    CHECK_THROWS_AS(cluster_statistics(ss, truncated), InvalidArgumentError);
}

TEST_CASE("solver argument validation") {
    CHECK_THROWS_AS(sphere_galerkin(ScalarField::constant(0.0), 7), InvalidArgumentError);
    const MetricPatch round = builtin_metric("round");
    CHECK_THROWS_AS(
        separated_mode_eigenvalues(round, ScalarField::constant(0.0), -1, 5, SeparatedOptions{}),
        InvalidArgumentError);
    CHECK_THROWS_AS(separated_spectrum(round, ScalarField::constant(0.0), 0, SeparatedOptions{}),
                    InvalidArgumentError);
    // Separated solvers require a zonal potential.
    const ScalarField sectoral = ScalarField::harmonic({{2, 2, 0.1}});
    CHECK_THROWS_AS(separated_spectrum(round, sectoral, 10, SeparatedOptions{}),
                    InvalidArgumentError);
}

TEST_CASE("zonal galerkin eigenvalues are bit-identical across thread counts") {
    const ScalarField q = ScalarField::harmonic({{2, 0, 0.2}, {1, 0, 0.1}});
    const ClusteredSpectrum a = sphere_galerkin(q, 60, 1);
    const ClusteredSpectrum b = sphere_galerkin(q, 60, 8);
    const std::vector<double> fa = a.reliable_flat();
    const std::vector<double> fb = b.reliable_flat();
    REQUIRE(fa.size() == fb.size());
    CHECK(std::memcmp(fa.data(), fb.data(), fa.size() * sizeof(double)) == 0);
}
