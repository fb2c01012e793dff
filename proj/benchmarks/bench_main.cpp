// Microbenchmarks for the hot paths: quadrature construction, associated
// Legendre rows, geodesic flows and the invariant symbol on both metric
// families, zonal eigen-solves, and heat-trace evaluation. Run via the
// stl_benchmarks target; google-benchmark owns timing and reporting.

#include <benchmark/benchmark.h>

#include "spectrace/flow.hpp"
#include "spectrace/galerkin.hpp"
#include "spectrace/legendre.hpp"
#include "spectrace/quadrature.hpp"
#include "spectrace/scalar_field.hpp"
#include "spectrace/theta.hpp"
#include "spectrace/zelditch.hpp"

#include <vector>

using namespace spectrace;

namespace {

void bm_gauss_legendre(benchmark::State& state) {
    const int n = int(state.range(0));
    for (auto _ : state) {
        QuadratureRule rule = gauss_legendre(n);
        benchmark::DoNotOptimize(rule.nodes.data());
    }
}
BENCHMARK(bm_gauss_legendre)->Arg(32)->Arg(128)->Arg(512);

void bm_normalized_plm_row(benchmark::State& state) {
    const int L = int(state.range(0));
    std::vector<double> row(L + 1);
    for (auto _ : state) {
        normalized_plm_row(3, L, 0.37, row);
        benchmark::DoNotOptimize(row.data());
    }
}
BENCHMARK(bm_normalized_plm_row)->Arg(64)->Arg(240);

void bm_geodesic_flow(benchmark::State& state) {
    const bool deformed = state.range(0) != 0;
    const MetricPatch metric =
        deformed ? builtin_metric("zoll", 0.1) : builtin_metric("round");
    const GeodesicSystem system(metric);
    const PhasePoint start = system.lift(1.1, 0.4, 0.8);
    for (auto _ : state) {
        GeodesicPath path = system.flow(start, 2 * 3.14159265358979323846);
        benchmark::DoNotOptimize(path.closure_residual);
    }
}
BENCHMARK(bm_geodesic_flow)->Arg(0)->Arg(1);

void bm_invariant_symbol(benchmark::State& state) {
    const MetricPatch metric = builtin_metric("zoll", 0.1);
    const GeodesicSystem system(metric);
    const PhasePoint start = system.lift(1.1, 0.4, 0.8);
    for (auto _ : state) {
        SigmaPath sp = zelditch_sigma(system, start);
        benchmark::DoNotOptimize(sp.average);
    }
}
BENCHMARK(bm_invariant_symbol);

void bm_zonal_galerkin(benchmark::State& state) {
    const int L = int(state.range(0));
    const ScalarField q = ScalarField::harmonic({{2, 0, 0.2}});
    for (auto _ : state) {
        ClusteredSpectrum s = sphere_galerkin(q, L);
        benchmark::DoNotOptimize(s.k_max_reliable);
    }
}
BENCHMARK(bm_zonal_galerkin)->Arg(60)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);

void bm_theta_eval(benchmark::State& state) {
    const ClusteredSpectrum s = round_exact_spectrum(int(state.range(0)));
    const double t = theta_min_usable_t(s) * 1.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(theta_eval(s, t));
    }
}
BENCHMARK(bm_theta_eval)->Arg(240)->Arg(600);

} // namespace

BENCHMARK_MAIN();
