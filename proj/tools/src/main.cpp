// spectral-trace-lab: configuration-driven experiments on regularized
// spectral traces over two-spheres whose geodesics all close.
//
// Exit codes: 0 success; 1 configuration/validation failure; 2 failure in a
// numerical stage (the stage is named on standard error); 3 a --check
// threshold was violated in trace-verify.

#include <CLI11.hpp>

#include "spectrace/abel.hpp"
#include "spectrace/cache.hpp"
#include "spectrace/clusters.hpp"
#include "spectrace/config.hpp"
#include "spectrace/curvature.hpp"
#include "spectrace/error.hpp"
#include "spectrace/flow.hpp"
#include "spectrace/galerkin.hpp"
#include "spectrace/parallel.hpp"
#include "spectrace/report.hpp"
#include "spectrace/round_constants.hpp"
#include "spectrace/separated.hpp"
#include "spectrace/surface_integral.hpp"
#include "spectrace/theta.hpp"
#include "spectrace/trace.hpp"
#include "spectrace/zelditch.hpp"
#include "spectrace/zeta.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace spectrace;

constexpr const char* kSchema = "spectrace-report v1";
constexpr const char* kVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

struct CliArgs {
    std::string config_path;
    std::string out_override;
    int threads = 0;
    std::uint64_t seed = 12345;
    bool check = false;
};

ExperimentConfig load_cli_config(const CliArgs& args) {
    ExperimentConfig config = load_config(args.config_path);
    if (!args.out_override.empty())
        config.out_dir = args.out_override;
    return config;
}

bool round_family(const ExperimentConfig& config) { return config.metric_family == "round"; }

Report base_report(const ExperimentConfig& config, const std::string& command,
                   const ScalarField& q) {
    Report r;
    r.add("schema", kSchema);
    r.add("version", kVersion);
    r.add("command", command);
    r.add("metric.family", config.metric_family);
    r.add("metric.eps", config.metric_eps);
    r.add("potential.description", q.description());
    return r;
}

std::string out_path(const ExperimentConfig& config, const std::string& name) {
    return (std::filesystem::path(config.out_dir) / name).string();
}

void emit(const ExperimentConfig& config, const std::string& name, const Report& report) {
    atomic_write_text(out_path(config, name), report.render());
}

void emit_csv(const ExperimentConfig& config, const std::string& name,
              const std::vector<std::vector<std::string>>& rows) {
    atomic_write_text(out_path(config, name), render_csv(rows));
}

/// Deterministic uniform numbers in [0, 1): the generator is the standard
/// 64-bit Mersenne twister, but the variate construction is spelled out so
/// reports are byte-identical across standard-library implementations.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : state_(seed) {}
    double next() { return static_cast<double>(state_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 state_;
};

ClusteredSpectrum compute_spectrum(const ExperimentConfig& config, const MetricPatch& metric,
                                   const ScalarField& q, int threads) {
    if (round_family(config))
        return sphere_galerkin(q, config.l_max, threads);
    SeparatedOptions opts;
    opts.backend = config.backend == "fd-divergence" ? SeparatedBackend::fd_divergence
                                                     : SeparatedBackend::galerkin_legendre;
    opts.n_basis = config.n_basis;
    opts.n_grid = config.n_grid;
    opts.threads = threads;
    return separated_spectrum(metric, q, config.k_cap, opts);
}

ClusteredSpectrum cached_spectrum(const ExperimentConfig& config, const MetricPatch& metric,
                                  const ScalarField& q, int threads, bool* cache_hit,
                                  std::string* key_hash) {
    const std::string key = spectrum_content_string(config);
    const std::string cache_dir =
        !config.cache_dir.empty()
            ? config.cache_dir
            : (std::filesystem::path(config.out_dir) / "cache").string();
    SpectrumCache cache(cache_dir);
    if (key_hash)
        *key_hash = content_hash(key);
    if (auto hit = cache.load(key)) {
        if (cache_hit)
            *cache_hit = true;
        return *hit;
    }
    if (cache_hit)
        *cache_hit = false;
    ClusteredSpectrum spectrum = compute_spectrum(config, metric, q, threads);
    cache.store(key, spectrum);
    return spectrum;
}

// ---------------------------------------------------------------------------
// curvature: zonal curvature profile + total-curvature check
// ---------------------------------------------------------------------------
int run_curvature(const CliArgs& args) {
    const ExperimentConfig config = load_cli_config(args);
    const MetricPatch metric = make_metric(config);
    const ScalarField q = make_potential(config);

    const int n = 181;
    std::vector<std::vector<std::string>> rows{{"theta", "K"}};
    double k_min = std::numeric_limits<double>::infinity();
    double k_max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double theta = (j + 0.5) * kPi / n;
        const double k = gauss_curvature(metric, theta, 0.0);
        k_min = std::min(k_min, k);
        k_max = std::max(k_max, k);
        rows.push_back({format_full(theta), format_full(k)});
    }

    const double area = surface_area(metric);
    const double total = integrate_scalar(metric, curvature_field(metric));
    const double residual = total - 4.0 * kPi;

    Report report = base_report(config, "curvature", q);
    report.add("curvature.grid_points", n);
    report.add("curvature.min", k_min);
    report.add("curvature.max", k_max);
    report.add("curvature.total", total);
    report.add("curvature.four_pi_residual", residual);
    report.add("area", area);
    emit(config, "curvature_report.txt", report);
    emit_csv(config, "curvature.csv", rows);

    fmt::print("curvature: total = {:.12g}, residual vs 4*pi = {:.3e} -> {}\n", total,
               residual, out_path(config, "curvature_report.txt"));
    return 0;
}

// ---------------------------------------------------------------------------
// geodesics: random closure census + symbol averages on closing orbits
// ---------------------------------------------------------------------------
int run_geodesics(const CliArgs& args) {
    const ExperimentConfig config = load_cli_config(args);
    const MetricPatch metric = make_metric(config);
    const ScalarField q = make_potential(config);
    GeodesicSystem system(metric);

    FlowOptions fo;
    fo.tol = config.flow_tol;
    fo.samples_per_turn = config.samples_per_turn;

    const int census = 100;
    UniformSource rng(args.seed);
    std::vector<std::vector<std::string>> rows{
        {"index", "theta0", "phi0", "alpha0", "closure_residual", "h_drift",
         "sigma_average"}};

    double max_closure = 0.0, sum_closure = 0.0;
    int closed = 0;
    for (int i = 0; i < census; ++i) {
        double x = 0.0;
        do {
            x = 1.0 - 2.0 * rng.next();
        } while (std::abs(x) > 0.95); // keep lift points clear of the poles
        const double theta = std::acos(x);
        const double phi = 2.0 * kPi * rng.next();
        const double alpha = 2.0 * kPi * rng.next();

        const PhasePoint start = lift_to_cosphere(metric, theta, phi, alpha);
        const GeodesicPath path = geodesic_flow(metric, start, 2.0 * kPi, fo);

        std::string sigma_cell;
        if (path.closure_residual < 1e-6) {
            ++closed;
            const SigmaPath sp = zelditch_sigma(system, start, fo);
            sigma_cell = format_full(sp.average);
        }
        max_closure = std::max(max_closure, path.closure_residual);
        sum_closure += path.closure_residual;
        rows.push_back({fmt::format("{}", i), format_full(theta), format_full(phi),
                        format_full(alpha), format_full(path.closure_residual),
                        format_full(path.h_drift), sigma_cell});
    }

    Report report = base_report(config, "geodesics", q);
    report.add("census.count", census);
    report.add("census.seed", static_cast<long long>(args.seed));
    report.add("census.max_closure_residual", max_closure);
    report.add("census.mean_closure_residual", sum_closure / census);
    report.add("census.closed_count", closed);
    report.add_flag("metric.closes_geodesics",
                    metric.has_profile() && metric.profile().closes_geodesics);
    emit(config, "geodesics_report.txt", report);
    emit_csv(config, "geodesics.csv", rows);

    fmt::print("geodesics: {}/{} orbits close within 1e-6 (max residual {:.3e}) -> {}\n",
               closed, census, max_closure, out_path(config, "geodesics_report.txt"));
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum: compute (or serve from cache) and export eigenvalues
// ---------------------------------------------------------------------------
int run_spectrum(const CliArgs& args) {
    const ExperimentConfig config = load_cli_config(args);
    const MetricPatch metric = make_metric(config);
    const ScalarField q = make_potential(config);

    bool cache_hit = false;
    std::string key_hash;
    const ClusteredSpectrum spectrum =
        cached_spectrum(config, metric, q, args.threads, &cache_hit, &key_hash);

    std::vector<std::vector<std::string>> rows{{"k", "i", "lambda"}};
    std::size_t count = 0;
    for (const auto& [k, cluster] : spectrum.clusters)
        for (std::size_t i = 0; i < cluster.size(); ++i) {
            rows.push_back(
                {fmt::format("{}", k), fmt::format("{}", i), format_full(cluster[i])});
            ++count;
        }

    Report report = base_report(config, "spectrum", q);
    report.add("spectrum.count", static_cast<long long>(count));
    report.add("spectrum.k_max_reliable", spectrum.k_max_reliable);
    report.add("spectrum.provenance", spectrum.provenance);
    report.add_flag("cache.hit", cache_hit);
    report.add("cache.key_hash", key_hash);
    emit(config, "spectrum_report.txt", report);
    emit_csv(config, "eigenvalues.csv", rows);

    fmt::print("spectrum: {} eigenvalues (k <= {}), cache {} -> {}\n", count,
               spectrum.k_max_reliable, cache_hit ? "hit" : "miss",
               out_path(config, "eigenvalues.csv"));
    return 0;
}

// ---------------------------------------------------------------------------
// heat-fit: least-squares heat coefficients vs the zeta pipeline
// ---------------------------------------------------------------------------
int run_heat_fit(const CliArgs& args) {
    const ExperimentConfig config = load_cli_config(args);
    const MetricPatch metric = make_metric(config);
    const ScalarField q = make_potential(config);

    bool cache_hit = false;
    const ClusteredSpectrum spectrum =
        cached_spectrum(config, metric, q, args.threads, &cache_hit, nullptr);

    const std::vector<double> grid =
        config.heat_t_min > 0
            ? geometric_grid(config.heat_t_min, config.heat_t_max, config.heat_points)
            : certified_heat_grid(spectrum, round_family(config));
    const HeatKind kind = q.is_zero() ? HeatKind::L : HeatKind::M;
    const GammaConvention gamma = config.gamma == "curvature"
                                      ? GammaConvention::curvature
                                      : GammaConvention::curvature_minus_one;

    const HeatFit fit = fit_heat_coefficients(spectrum, grid, kind, args.threads);
    const HeatCoefficients ref = heat_coefficients_from_zeta(metric, q, kind, gamma);

    std::vector<std::vector<std::string>> rows{{"t", "theta_t"}};
    for (double t : grid)
        rows.push_back({format_full(t), format_full(theta_eval(spectrum, t))});

    Report report = base_report(config, "heat-fit", q);
    report.add("spectrum.provenance", spectrum.provenance);
    report.add_flag("cache.hit", cache_hit);
    report.add("grid.t_min", grid.front());
    report.add("grid.t_max", grid.back());
    report.add("grid.points", static_cast<int>(grid.size()));
    report.add("fit.h0", fit.coefficients.h0);
    report.add("fit.h1", fit.coefficients.h1);
    report.add("fit.h2", fit.coefficients.h2);
    report.add("fit.residual", fit.residual);
    report.add("fit.threshold", fit.threshold);
    report.add_flag("fit.asymptote_warning", fit.asymptote_warning);
    report.add("zeta.h0", ref.h0);
    report.add("zeta.h1", ref.h1);
    report.add("zeta.h2", ref.h2);
    report.add("diff.h0", fit.coefficients.h0 - ref.h0);
    report.add("diff.h1", fit.coefficients.h1 - ref.h1);
    report.add("diff.h2", fit.coefficients.h2 - ref.h2);
    emit(config, "heat_fit_report.txt", report);
    emit_csv(config, "heat_fit.csv", rows);

    fmt::print("heat-fit: ({:.8g}, {:.8g}, {:.8g}) vs zeta ({:.8g}, {:.8g}, {:.8g}) -> {}\n",
               fit.coefficients.h0, fit.coefficients.h1, fit.coefficients.h2, ref.h0, ref.h1,
               ref.h2, out_path(config, "heat_fit_report.txt"));
    return 0;
}

// ---------------------------------------------------------------------------
// trace-verify: the full identity, eigenvalue side vs geometric side
// ---------------------------------------------------------------------------
int run_trace_verify(const CliArgs& args) {
    const ExperimentConfig config = load_cli_config(args);
    if (args.check && config.max_discrepancy <= 0 && config.max_discrepancy_rel <= 0)
        throw ConfigError("trace-verify --check requires trace.max_discrepancy or "
                          "trace.max_discrepancy_rel in the config");
    const MetricPatch metric = make_metric(config);
    const ScalarField q = make_potential(config);
    TraceOptions opts = make_trace_options(config);
    opts.threads = args.threads;

    const TraceReport tr = verify_trace(metric, q, opts);

    Report report = base_report(config, "trace-verify", q);
    report.add("solver.provenance", tr.solver_provenance);
    report.add("solver.k_max_reliable", tr.k_max_reliable);
    report.add("constants.a0", tr.constants.a0);
    report.add("constants.b0", tr.constants.b0);
    report.add("constants.c0", tr.constants.c0);
    report.add("constants.f.h0", tr.constants.f.h0);
    report.add("constants.f.h1", tr.constants.f.h1);
    report.add("constants.f.h2", tr.constants.f.h2);
    report.add("constants.l.h0", tr.constants.l.h0);
    report.add("constants.l.h1", tr.constants.l.h1);
    report.add("constants.l.h2", tr.constants.l.h2);
    report.add("constants.m.h0", tr.constants.m.h0);
    report.add("constants.m.h1", tr.constants.m.h1);
    report.add("constants.m.h2", tr.constants.m.h2);
    report.add("heat_fit.h0", tr.heat_fit.coefficients.h0);
    report.add("heat_fit.h1", tr.heat_fit.coefficients.h1);
    report.add("heat_fit.h2", tr.heat_fit.coefficients.h2);
    report.add("heat_fit.residual", tr.heat_fit.residual);
    report.add_flag("heat_fit.asymptote_warning", tr.heat_fit.asymptote_warning);
    report.add("lhs.abel_limit", tr.abel_limit.limit);
    report.add_flag("lhs.abel_fit_ok", tr.abel_limit.ok);
    report.add("lhs.abel_fit_residual", tr.abel_limit.residual);
    report.add("lhs.partial_sum_limit", tr.partial_limit.limit);
    report.add_flag("lhs.partial_fit_ok", tr.partial_limit.ok);
    report.add("lhs.partial_fit_residual", tr.partial_limit.residual);
    report.add("lhs.value", tr.lhs);
    report.add("lhs.method_agreement", tr.method_agreement);
    report.add("rhs.v2_q_half", tr.rhs.v2_q_half);
    report.add("rhs.v2_sigma_half", tr.rhs.v2_sigma_half);
    report.add("rhs.f2_term", tr.rhs.f2_term);
    report.add("rhs.curvature_term", tr.rhs.curvature_term);
    report.add("rhs.potential_term", tr.rhs.potential_term);
    report.add("rhs.total", tr.rhs.total);
    report.add("rhs.alt_total", tr.rhs.alt_total);
    report.add("rhs.v2_q_error_estimate", tr.rhs.v2_q_error);
    report.add("rhs.v2_sigma_error_estimate", tr.rhs.v2_sigma_error);
    report.add("discrepancy", tr.discrepancy);
    report.add("discrepancy_alt", tr.discrepancy_alt);

    bool violated = false;
    if (args.check) {
        const double scale = std::max(std::abs(tr.lhs), std::abs(tr.rhs.total));
        if (config.max_discrepancy > 0 && tr.discrepancy > config.max_discrepancy)
            violated = true;
        if (config.max_discrepancy_rel > 0 &&
            tr.discrepancy > config.max_discrepancy_rel * scale)
            violated = true;
        report.add("check.max_discrepancy", config.max_discrepancy);
        report.add("check.max_discrepancy_rel", config.max_discrepancy_rel);
        report.add_flag("check.passed", !violated);
    }
    emit(config, "trace_report.txt", report);

    std::vector<std::vector<std::string>> sums{{"K", "S_K", "per_cluster_deficit"}};
    for (std::size_t k = 0; k < tr.sums.partial_sums.size(); ++k)
        sums.push_back({fmt::format("{}", k), format_full(tr.sums.partial_sums[k]),
                        format_full(tr.sums.deficits[k])});
    emit_csv(config, "partial_sums.csv", sums);

    std::vector<std::vector<std::string>> abel{{"t", "G_t"}};
    for (const auto& [t, g] : tr.abel_samples)
        abel.push_back({format_full(t), format_full(g)});
    emit_csv(config, "abel.csv", abel);

    std::vector<std::vector<std::string>> rhs{{"term", "value"}};
    rhs.push_back({"v2_q_half", format_full(tr.rhs.v2_q_half)});
    rhs.push_back({"v2_sigma_half", format_full(tr.rhs.v2_sigma_half)});
    rhs.push_back({"f2_term", format_full(tr.rhs.f2_term)});
    rhs.push_back({"curvature_term", format_full(tr.rhs.curvature_term)});
    rhs.push_back({"potential_term", format_full(tr.rhs.potential_term)});
    rhs.push_back({"total", format_full(tr.rhs.total)});
    rhs.push_back({"alt_total", format_full(tr.rhs.alt_total)});
    emit_csv(config, "rhs.csv", rhs);

    fmt::print("trace-verify: lhs = {:.8g}, rhs = {:.8g}, discrepancy = {:.3e} -> {}\n",
               tr.lhs, tr.rhs.total, tr.discrepancy, out_path(config, "trace_report.txt"));
    if (args.check) {
        if (violated) {
            fmt::print(stderr, "check FAILED: discrepancy {:.6e} exceeds threshold\n",
                       tr.discrepancy);
            return 3;
        }
        fmt::print("check passed\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// oracle: the kernel constants on the round sphere, two independent ways
// ---------------------------------------------------------------------------
int run_oracle(const CliArgs& args) {
    const ExperimentConfig config = load_cli_config(args);
    if (!round_family(config))
        throw ConfigError("oracle requires metric.family = round");
    const ScalarField q = make_potential(config);

    const RoundTraceConstants rc = round_trace_constants(q);

    Report report = base_report(config, "oracle", q);
    report.add("oracle.c0", rc.c0);
    report.add("oracle.c1", rc.c1);
    report.add("oracle.two_c1", 2.0 * rc.c1);
    report.add("oracle.double_integral_spectral", rc.double_integral_spectral);
    report.add("oracle.double_integral_direct", rc.double_integral_direct);
    report.add("oracle.q_sq_integral", rc.q_sq_integral);
    report.add("oracle.agreement", rc.agreement);
    emit(config, "oracle_report.txt", report);

    fmt::print("oracle: c0 = {:.10g}, c1 = {:.10g}, methods agree to {:.3e} -> {}\n", rc.c0,
               rc.c1, rc.agreement, out_path(config, "oracle_report.txt"));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral-trace-lab: regularized spectral traces on spheres whose "
                 "geodesics all close"};
    app.require_subcommand(1);

    CliArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "experiment config file")->required();
        sub->add_option("--out", args.out_override, "output directory (overrides [output])");
        sub->add_option("--threads", args.threads,
                        "worker threads (0 = machine parallelism)");
        sub->add_option("--seed", args.seed, "random seed for sampled censuses");
        return sub;
    };

    CLI::App* curvature =
        add_common(app.add_subcommand("curvature", "curvature profile + total curvature"));
    CLI::App* geodesics =
        add_common(app.add_subcommand("geodesics", "closure census + symbol averages"));
    CLI::App* spectrum =
        add_common(app.add_subcommand("spectrum", "compute and cache the eigenvalue list"));
    CLI::App* heat_fit =
        add_common(app.add_subcommand("heat-fit", "heat coefficients: fit vs zeta"));
    CLI::App* trace_verify = add_common(
        app.add_subcommand("trace-verify", "full regularized-trace verification"));
    trace_verify->add_flag("--check", args.check,
                           "fail (exit 3) when the discrepancy exceeds the configured "
                           "threshold");
    CLI::App* oracle =
        add_common(app.add_subcommand("oracle", "kernel constants two independent ways"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (args.threads > 0)
            set_default_threads(args.threads);
        if (curvature->parsed())
            return run_curvature(args);
        if (geodesics->parsed())
            return run_geodesics(args);
        if (spectrum->parsed())
            return run_spectrum(args);
        if (heat_fit->parsed())
            return run_heat_fit(args);
        if (trace_verify->parsed())
            return run_trace_verify(args);
        if (oracle->parsed())
            return run_oracle(args);
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 1;
    } catch (const Error& e) {
        fmt::print(stderr, "error in stage {}: {}\n", e.stage(), e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
