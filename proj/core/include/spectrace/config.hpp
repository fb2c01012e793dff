#pragma once

/// Strict INI-style experiment configuration. Sections and keys are
/// whitelisted: any unknown section or key is a ConfigError naming the
/// offender, so a typo can never silently fall back to a default. Numbers
/// are parsed as full-precision decimals.

#include "spectrace/metric.hpp"
#include "spectrace/scalar_field.hpp"
#include "spectrace/trace.hpp"

#include <string>
#include <vector>

namespace spectrace {

struct ExperimentConfig {
    // [metric]
    std::string metric_family = "round"; ///< round | zoll | control
    double metric_eps = 0.0;

    // [potential]
    std::string potential_kind = "zero"; ///< zero | constant | harmonic
    double potential_amplitude = 1.0;    ///< the value for `constant`, a scale for `harmonic`
    std::vector<HarmonicCoeff> potential_harmonics; ///< "l m c; l m c; ..."

    // [solver]
    int l_max = 240;
    int k_cap = 72;
    std::string backend = "galerkin-legendre"; ///< galerkin-legendre | fd-divergence
    int n_basis = 0;
    int n_grid = 800;
    int fiber_count = 24;
    int order_x = 32;
    int phi_count = 48;
    double flow_tol = 1e-11;
    int samples_per_turn = 2048;

    // [trace]
    double abel_t_min = 0.0; ///< 0 = automatic from spectrum depth
    double abel_t_max = 0.0;
    int abel_points = 12;
    double heat_t_min = 0.0; ///< 0 = family default
    double heat_t_max = 0.0;
    int heat_points = 12;
    std::string gamma = "curvature-minus-one"; ///< or "curvature"
    double max_discrepancy = 0.0;     ///< --check threshold, absolute; 0 disables
    double max_discrepancy_rel = 0.0; ///< --check threshold, relative; 0 disables

    // [output]
    std::string out_dir = ".";
    std::string cache_dir; ///< empty = out_dir

    /// The file the config was read from (diagnostics only; not a key).
    std::string origin;
};

/// Parse a config file; throws ConfigError on unknown keys, malformed
/// numbers, or out-of-range values.
ExperimentConfig load_config(const std::string& path);

/// Parse config text directly (origin names the source in errors).
ExperimentConfig parse_config(const std::string& text, const std::string& origin);

/// Realize the configured objects.
MetricPatch make_metric(const ExperimentConfig& config);
ScalarField make_potential(const ExperimentConfig& config);
TraceOptions make_trace_options(const ExperimentConfig& config);

/// Canonical one-line description of the experiment inputs that affect a
/// spectrum (metric, potential, solver truncation) -- the content string the
/// cache key hashes.
std::string spectrum_content_string(const ExperimentConfig& config);

} // namespace spectrace
