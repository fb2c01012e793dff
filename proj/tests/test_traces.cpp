// Trace layer: heat-trace sums and their small-t fits, regularized partial
// sums, Abel extrapolation, the kernel double integral, the subtraction
// constants, and the assembled identity. Independent oracles: the exact
// shift law theta(q + c) = exp(-ct) theta(q), the round-sphere asymptote,
// Basel-type synthetic series with known limits, Funk-Hecke closed forms of
// the double integral, and exact cancellations for constant potentials.

#include <doctest.h>

#include "spectrace/abel.hpp"
#include "spectrace/clusters.hpp"
#include "spectrace/error.hpp"
#include "spectrace/galerkin.hpp"
#include "spectrace/metric.hpp"
#include "spectrace/round_constants.hpp"
#include "spectrace/scalar_field.hpp"
#include "spectrace/theta.hpp"
#include "spectrace/trace.hpp"
#include "spectrace/zeta.hpp"

#include <cmath>
#include <utility>
#include <vector>

using namespace spectrace;

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

TEST_CASE("theta obeys the exact shift law theta(q + c) = exp(-ct) theta(q)") {
    const ClusteredSpectrum base = round_exact_spectrum(40);
    ClusteredSpectrum shifted = base;
    const double c = 0.3;
    for (auto& [k, lams] : shifted.clusters)
        for (double& lam : lams) lam += c;
    for (double t : {0.05, 0.1, 0.3}) {
        const double lhs = theta_eval(shifted, t);
        const double rhs = std::exp(-c * t) * theta_eval(base, t);
        CHECK(std::abs(lhs - rhs) < 1e-12 * rhs);
    }
}

TEST_CASE("round theta matches 1/t + 1/3 + t/15 up to the t^2 layer") {
    // The next coefficient of the round heat trace is 4/315, so the residual
    // against the three-term asymptote is about 0.0127 t^2.
    const ClusteredSpectrum s = round_exact_spectrum(200);
    for (double t : {0.02, 0.05, 0.1}) {
        const double theta = theta_eval(s, t);
        const double asym = 1.0 / t + 1.0 / 3.0 + t / 15.0;
        CHECK(std::abs(theta - asym) < 0.02 * t * t);
        CHECK(std::abs(theta - asym) > 0.005 * t * t); // the layer is real
    }
}

TEST_CASE("theta refuses t below the certified depth and names the floor") {
    const ClusteredSpectrum s = round_exact_spectrum(20);
    const double floor = theta_min_usable_t(s);
    CHECK(floor > 0);
    CHECK(std::isfinite(theta_eval(s, 1.001 * floor)));
    try {
        theta_eval(s, 1e-4);
        FAIL("expected TailBoundError");
    } catch (const TailBoundError& e) {
        CHECK(e.min_usable_t() > 1e-4);
        CHECK(std::abs(e.min_usable_t() - floor) < 1e-12 * floor);
        CHECK(e.stage() == std::string("theta"));
    }
}

TEST_CASE("exact round reference spectrum has (K+1)^2 eigenvalues") {
    const ClusteredSpectrum s = round_exact_spectrum(25);
    CHECK(s.k_max_reliable == 25);
    CHECK(int(s.reliable_flat().size()) == 26 * 26);
    CHECK(s.clusters.at(7).size() == 15);
    CHECK(s.clusters.at(7).front() == 56.0);
}

TEST_CASE("geometric grids: endpoints, constant ratio, validation") {
    const std::vector<double> g = geometric_grid(1e-3, 8e-3, 12);
    REQUIRE(int(g.size()) == 12);
    CHECK(std::abs(g.front() - 1e-3) < 1e-17);
    CHECK(std::abs(g.back() - 8e-3) < 1e-17);
    const double ratio = g[1] / g[0];
    for (size_t i = 1; i < g.size(); ++i)
        CHECK(std::abs(g[i] / g[i - 1] - ratio) < 1e-12);
    CHECK_THROWS_AS(geometric_grid(1e-3, 8e-3, 1), InvalidArgumentError);
    CHECK_THROWS_AS(geometric_grid(8e-3, 1e-3, 12), InvalidArgumentError);
}

TEST_CASE("heat-coefficient fit recovers (1, 1/3, 1/15) from a deep spectrum") {
    const ClusteredSpectrum s = round_exact_spectrum(600);
    const HeatFit fit = fit_heat_coefficients(s, geometric_grid(1.2e-4, 9.6e-4, 12));
    CHECK(std::abs(fit.coefficients.h0 - 1.0) < 1e-10);
    CHECK(std::abs(fit.coefficients.h1 - 1.0 / 3.0) < 1e-7);
    CHECK(std::abs(fit.coefficients.h2 - 1.0 / 15.0) < 5e-5);
    CHECK(!fit.asymptote_warning);
    CHECK(fit.residual <= fit.threshold);
}

TEST_CASE("certified heat grid lifts its floor for shallow spectra") {
    const ClusteredSpectrum deep = round_exact_spectrum(300);
    const std::vector<double> family = certified_heat_grid(deep, true);
    CHECK(std::abs(family.front() - 1e-3) < 1e-15); // deep: family default kept
    const ClusteredSpectrum shallow = round_exact_spectrum(30);
    const std::vector<double> lifted = certified_heat_grid(shallow, true);
    CHECK(lifted.front() > theta_min_usable_t(shallow));
    CHECK(lifted.back() >= 8 * lifted.front() - 1e-15);
    for (double t : lifted) CHECK(std::isfinite(theta_eval(shallow, t)));
}

TEST_CASE("abel extrapolation recovers the limit of a geometric deficit series") {
    // d_k = 2^-k dies fast enough that the damped sum is smooth in t near 0
    // (a slowly decaying series like 1/k^2 would inject a sqrt(t) singularity
    // the quadratic model cannot represent), so the fit must recover the
    // undamped total sum(2^-k, k = 1..59) = 1 - 2^-59.
    const int n = 60;
    std::vector<double> d(n, 0.0);
    for (int k = 1; k < n; ++k) d[k] = std::pow(2.0, -k);
    std::vector<std::pair<double, double>> samples;
    for (double t : geometric_grid(5e-5, 4e-4, 12)) samples.emplace_back(t, abel_sum(d, t));
    const SeriesLimit lim = abel_extrapolate(samples);
    CHECK(lim.ok);
    CHECK(std::abs(lim.limit - (1.0 - std::pow(2.0, -59))) < 1e-6);
}

TEST_CASE("partial-sum extrapolation nails the Basel series") {
    // S_K = sum(1/k^2, k <= K) = pi^2/6 - 1/K + O(1/K^2): exactly the
    // S + gamma/K model, with gamma = -1.
    RegularizedSums sums;
    sums.c0 = 0.0;
    const int K_top = 4000;
    sums.deficits.assign(K_top + 1, 0.0);
    sums.partial_sums.assign(K_top + 1, 0.0);
    double running = 0.0;
    for (int k = 1; k <= K_top; ++k) {
        sums.deficits[k] = 1.0 / (double(k) * k);
        running += sums.deficits[k];
        sums.partial_sums[k] = running;
    }
    const SeriesLimit lim = extrapolate_partial_sums(sums);
    CHECK(lim.ok);
    CHECK(std::abs(lim.limit - kPi * kPi / 6.0) < 1e-6);
    CHECK(std::abs(lim.coefficients[1] - (-1.0)) < 1e-2);
}

TEST_CASE("certified abel sum: zero deficits on the exact round spectrum") {
    const ClusteredSpectrum s = round_exact_spectrum(60);
    const std::vector<double> grid = abel_default_grid(s.k_max_reliable);
    REQUIRE(int(grid.size()) == 12);
    CHECK(std::abs(grid.front() - 33.0 / (60.0 * 61.0)) < 1e-12);
    for (double t : grid) CHECK(std::abs(abel_sum(s, 0.0, t)) < 1e-12);

    const ClusteredSpectrum shallow = round_exact_spectrum(12);
    // An identically-zero deficit list certifies at any t: the tail model
    // scales with the observed deficit magnitude.
    CHECK(abel_sum(shallow, 0.0, 1e-6) == 0.0);
    // A mis-subtracted c0 leaves O(2k+1) deficits that the same shallow
    // spectrum cannot certify at t = 1e-6.
    try {
        abel_sum(shallow, 0.3, 1e-6);
        FAIL("expected TailBoundError");
    } catch (const TailBoundError& e) {
        CHECK(e.min_usable_t() > 1e-2);
    }
}

TEST_CASE("constant potential: deficits vanish identically") {
    const double c = 0.4;
    const ClusteredSpectrum s = sphere_galerkin(ScalarField::constant(c), 30);
    const RegularizedSums sums = regularized_partial_sums(s, c);
    REQUIRE(int(sums.deficits.size()) == s.k_max_reliable + 1);
    for (double d : sums.deficits) CHECK(std::abs(d) < 1e-10);
    for (double sk : sums.partial_sums) CHECK(std::abs(sk) < 1e-9);
}

TEST_CASE("partial-sum extrapolation recovers a planted S + gamma/K tail") {
    RegularizedSums sums;
    sums.c0 = 0.0;
    const double S = 2.5, gamma = -0.7;
    sums.partial_sums.push_back(1.0); // K = 0 is outside the fitted model
    for (int K = 1; K <= 40; ++K) sums.partial_sums.push_back(S + gamma / K);
    sums.deficits.resize(sums.partial_sums.size());
    sums.deficits[0] = sums.partial_sums[0];
    for (size_t i = 1; i < sums.partial_sums.size(); ++i)
        sums.deficits[i] = sums.partial_sums[i] - sums.partial_sums[i - 1];

    const SeriesLimit lim = extrapolate_partial_sums(sums);
    CHECK(lim.ok);
    CHECK(std::abs(lim.limit - S) < 1e-10);
    REQUIRE(lim.coefficients.size() >= 2);
    CHECK(std::abs(lim.coefficients[1] - gamma) < 1e-8);
    CHECK(!lim.model_id.empty());
}

TEST_CASE("kernel double integral: constant potential closed form") {
    // q = c has only the l = 0 harmonic: DD = 8 pi^3 c^2 and c1 = 0 exactly.
    const double c = 0.7;
    const RoundTraceConstants rc = round_trace_constants(ScalarField::constant(c));
    const double dd = 8.0 * kPi * kPi * kPi * c * c;
    CHECK(std::abs(rc.double_integral_spectral - dd) < 1e-8 * dd);
    CHECK(std::abs(rc.double_integral_direct - dd) < 1e-6 * dd);
    CHECK(rc.agreement < 1e-6);
    CHECK(std::abs(rc.c0 - c) < 1e-12);
    CHECK(std::abs(rc.c1) < 1e-8);
    CHECK(std::abs(rc.q_sq_integral - 4 * kPi * c * c) < 1e-10);
}

TEST_CASE("kernel double integral: odd and even harmonic closed forms") {
    // DD(Y_lm) = 2 pi^2 P_l(0)^2: zero for odd l, pi^2/2 for l = 2.
    const RoundTraceConstants odd = round_trace_constants(ScalarField::harmonic({{3, 0, 1.0}}));
    CHECK(std::abs(odd.double_integral_spectral) < 1e-12);
    CHECK(std::abs(odd.c1 - (-1.0 / (16 * kPi))) < 1e-9);

    const RoundTraceConstants even = round_trace_constants(ScalarField::harmonic({{2, 0, 1.0}}));
    CHECK(std::abs(even.double_integral_spectral - kPi * kPi / 2) < 1e-12);
    // c1 = (pi^2/2)/(32 pi^3) - 1/(16 pi) = -3/(64 pi)
    CHECK(std::abs(even.c1 - (-3.0 / (64 * kPi))) < 1e-9);
    CHECK(even.agreement < 1e-8);

    // The m index only rotates the harmonic: same constants.
    const RoundTraceConstants sect = round_trace_constants(ScalarField::harmonic({{2, 2, 1.0}}));
    CHECK(std::abs(sect.c1 - even.c1) < 1e-9);
}

TEST_CASE("harmonic projection round-trips band-limited fields") {
    const std::vector<HarmonicCoeff> in = {{0, 0, 0.1}, {2, 1, 0.3}, {5, -3, 0.2}};
    const std::vector<HarmonicCoeff> out =
        project_round_harmonics(ScalarField::harmonic(in), 8);
    for (const HarmonicCoeff& c : out) {
        double expected = 0.0;
        for (const HarmonicCoeff& i : in)
            if (i.l == c.l && i.m == c.m) expected = i.c;
        CHECK(std::abs(c.c - expected) < 1e-12);
    }
    // Every input coefficient is present in the projection.
    for (const HarmonicCoeff& i : in) {
        bool found = false;
        for (const HarmonicCoeff& c : out)
            if (i.l == c.l && i.m == c.m && std::abs(c.c - i.c) < 1e-12) found = true;
        CHECK(found);
    }
}

TEST_CASE("subtraction constants: round sphere with a constant potential") {
    const MetricPatch round = builtin_metric("round");
    const double c = 0.3;
    const SubtractionConstants sc = subtraction_constants(round, ScalarField::constant(c));
    CHECK(std::abs(sc.a0) < 1e-10);
    CHECK(std::abs(sc.b0 - c) < 1e-10);
    CHECK(std::abs(sc.c0 - c) < 1e-10);
    CHECK(std::abs(sc.f.h0 - 1.0) < 1e-14);
    CHECK(std::abs(sc.f.h1 - 1.0 / 3.0) < 1e-14);
    CHECK(std::abs(sc.f.h2 - 1.0 / 15.0) < 1e-14);
    CHECK(std::abs(sc.l.h1 - 1.0 / 3.0) < 1e-10);
    CHECK(std::abs(sc.l.h2 - 1.0 / 15.0) < 1e-10);
    CHECK(std::abs(sc.m.h1 - (1.0 / 3.0 - c)) < 1e-10);
    CHECK(std::abs(sc.m.h2 - (1.0 / 15.0 + c * c / 2)) < 1e-10);
}

TEST_CASE("subtraction constants: a0 vanishes on the deformed profile") {
    // a0 = (f1 - l1)/f0 with l1 = (1/12pi) integral K dS = 1/3 for every
    // metric of total curvature 4 pi, so a0 = 0 beyond quadrature error.
    const MetricPatch zoll = builtin_metric("zoll", 0.1);
    const SubtractionConstants sc = subtraction_constants(zoll, ScalarField::constant(0.0));
    CHECK(std::abs(sc.a0) < 1e-7);
    CHECK(std::abs(sc.b0) < 1e-12);
}

TEST_CASE("geometric side: exact cancellation for constant potentials") {
    const MetricPatch round = builtin_metric("round");
    for (double c : {-1.0, 0.3, 2.0}) {
        const TheoremRhs rhs = theorem_rhs(round, ScalarField::constant(c));
        // Itemization is the definition of total.
        CHECK(rhs.total == rhs.v2_q_half + rhs.v2_sigma_half + rhs.f2_term +
                               rhs.curvature_term + rhs.potential_term);
        CHECK(std::abs(rhs.v2_q_half - c * c / 2) < 1e-10);
        CHECK(rhs.v2_sigma_half == 0.0); // constant curvature: exact zero
        CHECK(std::abs(rhs.curvature_term + 1.0 / 15.0) < 1e-10);
        CHECK(std::abs(rhs.potential_term + c * c / 2) < 1e-10);
        CHECK(std::abs(rhs.total) < 1e-9);
        // The diagnostic variant subtracts b0 * l1 = c/3.
        CHECK(std::abs(rhs.alt_total - (rhs.total - c / 3.0)) < 1e-10);
    }
}

TEST_CASE("geometric side equals twice the kernel constant for zero-mean potentials") {
    const ScalarField q = ScalarField::harmonic(
        {{1, 0, 0.25}, {2, 1, 0.15}, {4, 4, 0.2}, {6, 3, 0.1}});
    const MetricPatch round = builtin_metric("round");
    const TheoremRhs rhs = theorem_rhs(round, q);
    const RoundTraceConstants rc = round_trace_constants(q);
    CHECK(rc.agreement < 1e-6);
    CHECK(std::abs(rhs.total - 2 * rc.c1) < 1e-8);
}

TEST_CASE("shared trace geometry reproduces the per-call route") {
    const MetricPatch round = builtin_metric("round");
    const TraceGeometry geo = make_trace_geometry(round);
    CHECK(geo.v2_sigma == 0.0);
    CHECK(std::abs(geo.area - 4 * kPi) < 1e-9);
    CHECK(std::abs(geo.l1 - 1.0 / 3.0) < 1e-10);
    CHECK(std::abs(geo.curvature_integral - 4 * kPi) < 1e-8);

    const ScalarField q = ScalarField::harmonic({{2, 0, 0.2}});
    const TheoremRhs direct = theorem_rhs(round, q);
    const TheoremRhs shared = theorem_rhs(round, q, &geo);
    CHECK(std::abs(direct.total - shared.total) < 1e-12);
}

TEST_CASE("full verification closes on the free round sphere") {
    const MetricPatch round = builtin_metric("round");
    const TraceReport report = verify_trace(round, ScalarField::constant(0.0));
    CHECK(report.discrepancy < 1e-10);
    CHECK(report.method_agreement < 1e-8);
    CHECK(std::abs(report.lhs) < 1e-10);
    CHECK(std::abs(report.constants.c0) < 1e-12);
    CHECK(std::abs(report.heat_fit.coefficients.h0 - 1.0) < 1e-6);
    CHECK(report.k_max_reliable >= 200);
    CHECK(!report.solver_provenance.empty());
}
