#include "spectrace/config.hpp"

#include "spectrace/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace spectrace {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, const std::string& key,
                    const std::string& origin) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(fmt::format("{}: key '{}' has malformed number '{}'", origin, key,
                                      value));
    return out;
}

int parse_int(const std::string& value, const std::string& key, const std::string& origin) {
    int out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(fmt::format("{}: key '{}' has malformed integer '{}'", origin, key,
                                      value));
    return out;
}

std::vector<HarmonicCoeff> parse_harmonics(const std::string& value, const std::string& origin) {
    std::vector<HarmonicCoeff> out;
    std::stringstream groups(value);
    std::string triple;
    while (std::getline(groups, triple, ';')) {
        std::string cleaned = triple;
        std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
        cleaned = trim(cleaned);
        if (cleaned.empty())
            continue;
        std::stringstream parts(cleaned);
        HarmonicCoeff c;
        if (!(parts >> c.l >> c.m >> c.c) || !(parts >> std::ws).eof())
            throw ConfigError(fmt::format(
                "{}: key 'coefficients' expects 'l m c; l m c; ...' but got '{}'", origin,
                trim(triple)));
        if (c.l < 0 || c.l > 64 || std::abs(c.m) > c.l)
            throw ConfigError(fmt::format(
                "{}: harmonic coefficient (l = {}, m = {}) out of range (0 <= l <= 64, "
                "|m| <= l)",
                origin, c.l, c.m));
        out.push_back(c);
    }
    if (out.empty())
        throw ConfigError(fmt::format("{}: key 'coefficients' is empty", origin));
    return out;
}

void validate(const ExperimentConfig& c, const std::string& origin) {
    auto fail = [&](const std::string& msg) { throw ConfigError(origin + ": " + msg); };
    if (c.metric_family != "round" && c.metric_family != "zoll" && c.metric_family != "control")
        fail(fmt::format("metric.family '{}' is not one of round, zoll, control",
                         c.metric_family));
    if (std::abs(c.metric_eps) > 0.3)
        fail(fmt::format("metric.eps = {} outside [-0.3, 0.3]", c.metric_eps));
    if (c.potential_kind != "zero" && c.potential_kind != "constant" &&
        c.potential_kind != "harmonic")
        fail(fmt::format("potential.kind '{}' is not one of zero, constant, harmonic",
                         c.potential_kind));
    if (c.potential_kind == "harmonic" && c.potential_harmonics.empty())
        fail("potential.kind = harmonic requires potential.coefficients");
    if (c.backend != "galerkin-legendre" && c.backend != "fd-divergence")
        fail(fmt::format("solver.backend '{}' is not one of galerkin-legendre, fd-divergence",
                         c.backend));
    if (c.l_max < 8)
        fail(fmt::format("solver.l_max = {} below the minimum of 8", c.l_max));
    if (c.k_cap < 6)
        fail(fmt::format("solver.k_cap = {} below the minimum of 6", c.k_cap));
    if (c.n_grid != 0 && c.n_grid < 200)
        fail(fmt::format("solver.n_grid = {} below the floor of 200", c.n_grid));
    if (c.fiber_count < 2 || c.order_x < 2 || c.phi_count < 1)
        fail("solver.fiber_count/order_x/phi_count too small");
    if (c.flow_tol < 1e-14 || c.flow_tol > 1e-4)
        fail(fmt::format("solver.flow_tol = {} outside [1e-14, 1e-4]", c.flow_tol));
    if (c.samples_per_turn < 64)
        fail(fmt::format("solver.samples_per_turn = {} below the minimum of 64",
                         c.samples_per_turn));
    auto check_grid = [&](double lo, double hi, int n, const char* which) {
        if ((lo == 0.0) != (hi == 0.0))
            fail(fmt::format("trace.{0}_t_min and trace.{0}_t_max must be set together", which));
        if (lo != 0.0) {
            if (!(lo > 0) || !(hi > lo))
                fail(fmt::format("trace.{0}_t_min/{0}_t_max must satisfy 0 < min < max", which));
            if (hi / lo < 8.0)
                fail(fmt::format("trace.{}_t grid must span a factor >= 8", which));
        }
        if (n < 6)
            fail(fmt::format("trace.{}_points = {} below the minimum of 6", which, n));
    };
    check_grid(c.abel_t_min, c.abel_t_max, c.abel_points, "abel");
    check_grid(c.heat_t_min, c.heat_t_max, c.heat_points, "heat");
    if (c.abel_t_min != 0.0 && (c.abel_t_min < 1e-4 || c.abel_t_max > 0.2))
        fail("trace.abel_t grid must lie within [1e-4, 0.2]");
    if (c.gamma != "curvature-minus-one" && c.gamma != "curvature")
        fail(fmt::format("trace.gamma '{}' is not one of curvature-minus-one, curvature",
                         c.gamma));
    if (c.max_discrepancy < 0 || c.max_discrepancy_rel < 0)
        fail("trace.max_discrepancy(_rel) must be >= 0");
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    ExperimentConfig config;
    config.origin = origin;
    std::stringstream stream(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        const std::string where = fmt::format("{}:{}", origin, line_no);
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(where + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section != "metric" && section != "potential" && section != "solver" &&
                section != "trace" && section != "output")
                throw ConfigError(fmt::format("{}: unknown section [{}]", where, section));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(where + ": empty key or value");
        if (section.empty())
            throw ConfigError(fmt::format("{}: key '{}' appears before any section", where, key));

        auto unknown = [&]() -> ConfigError {
            return ConfigError(
                fmt::format("{}: unknown key '{}' in section [{}]", where, key, section));
        };
        if (section == "metric") {
            if (key == "family")
                config.metric_family = value;
            else if (key == "eps")
                config.metric_eps = parse_double(value, key, where);
            else
                throw unknown();
        } else if (section == "potential") {
            if (key == "kind")
                config.potential_kind = value;
            else if (key == "amplitude")
                config.potential_amplitude = parse_double(value, key, where);
            else if (key == "coefficients")
                config.potential_harmonics = parse_harmonics(value, where);
            else
                throw unknown();
        } else if (section == "solver") {
            if (key == "l_max")
                config.l_max = parse_int(value, key, where);
            else if (key == "k_cap")
                config.k_cap = parse_int(value, key, where);
            else if (key == "backend")
                config.backend = value;
            else if (key == "n_basis")
                config.n_basis = parse_int(value, key, where);
            else if (key == "n_grid")
                config.n_grid = parse_int(value, key, where);
            else if (key == "fiber_count")
                config.fiber_count = parse_int(value, key, where);
            else if (key == "order_x")
                config.order_x = parse_int(value, key, where);
            else if (key == "phi_count")
                config.phi_count = parse_int(value, key, where);
            else if (key == "flow_tol")
                config.flow_tol = parse_double(value, key, where);
            else if (key == "samples_per_turn")
                config.samples_per_turn = parse_int(value, key, where);
            else
                throw unknown();
        } else if (section == "trace") {
            if (key == "abel_t_min")
                config.abel_t_min = parse_double(value, key, where);
            else if (key == "abel_t_max")
                config.abel_t_max = parse_double(value, key, where);
            else if (key == "abel_points")
                config.abel_points = parse_int(value, key, where);
            else if (key == "heat_t_min")
                config.heat_t_min = parse_double(value, key, where);
            else if (key == "heat_t_max")
                config.heat_t_max = parse_double(value, key, where);
            else if (key == "heat_points")
                config.heat_points = parse_int(value, key, where);
            else if (key == "gamma")
                config.gamma = value;
            else if (key == "max_discrepancy")
                config.max_discrepancy = parse_double(value, key, where);
            else if (key == "max_discrepancy_rel")
                config.max_discrepancy_rel = parse_double(value, key, where);
            else
                throw unknown();
        } else if (section == "output") {
            if (key == "dir")
                config.out_dir = value;
            else if (key == "cache_dir")
                config.cache_dir = value;
            else
                throw unknown();
        }
    }
    validate(config, origin);
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot open config file '{}'", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

MetricPatch make_metric(const ExperimentConfig& config) {
    return builtin_metric(config.metric_family, config.metric_eps);
}

ScalarField make_potential(const ExperimentConfig& config) {
    if (config.potential_kind == "zero")
        return ScalarField::constant(0.0);
    if (config.potential_kind == "constant")
        return ScalarField::constant(config.potential_amplitude);
    std::vector<HarmonicCoeff> scaled = config.potential_harmonics;
    for (HarmonicCoeff& c : scaled)
        c.c *= config.potential_amplitude;
    return ScalarField::harmonic(scaled);
}

TraceOptions make_trace_options(const ExperimentConfig& config) {
    TraceOptions opts;
    opts.l_max = config.l_max;
    opts.k_cap = config.k_cap;
    opts.separated.backend = config.backend == "fd-divergence"
                                 ? SeparatedBackend::fd_divergence
                                 : SeparatedBackend::galerkin_legendre;
    opts.separated.n_basis = config.n_basis;
    opts.separated.n_grid = config.n_grid;
    opts.liouville.fiber_count = config.fiber_count;
    opts.liouville.order_x = config.order_x;
    opts.liouville.phi_count = config.phi_count;
    opts.liouville.flow_tol = config.flow_tol;
    opts.liouville.samples_per_turn = config.samples_per_turn;
    opts.gamma = config.gamma == "curvature" ? GammaConvention::curvature
                                             : GammaConvention::curvature_minus_one;
    if (config.abel_t_min > 0)
        opts.abel_grid = geometric_grid(config.abel_t_min, config.abel_t_max,
                                        config.abel_points);
    if (config.heat_t_min > 0)
        opts.heat_grid = geometric_grid(config.heat_t_min, config.heat_t_max,
                                        config.heat_points);
    return opts;
}

std::string spectrum_content_string(const ExperimentConfig& config) {
    std::string coeffs;
    for (const HarmonicCoeff& c : config.potential_harmonics)
        coeffs += fmt::format("{},{},{:.17g};", c.l, c.m, c.c);
    return fmt::format("metric={}|eps={:.17g}|potential={}|amplitude={:.17g}|coeffs={}|"
                       "backend={}|l_max={}|k_cap={}|n_basis={}|n_grid={}",
                       config.metric_family, config.metric_eps, config.potential_kind,
                       config.potential_amplitude, coeffs, config.backend, config.l_max,
                       config.k_cap, config.n_basis, config.n_grid);
}

} // namespace spectrace
