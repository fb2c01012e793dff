// Plumbing layer: strict config parsing, the content-addressed spectrum
// cache, and deterministic report/CSV rendering. Oracles: hand-written
// config texts with known field values, published FNV-1a test vectors,
// hand-corrupted cache files, and RFC 4180 quoting cases.

#include <doctest.h>

#include "spectrace/cache.hpp"
#include "spectrace/clusters.hpp"
#include "spectrace/config.hpp"
#include "spectrace/error.hpp"
#include "spectrace/report.hpp"
#include "spectrace/theta.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace spectrace;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Unique scratch directory, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spectrace-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

const char* kFullConfig = R"(# full experiment description
[metric]
family = zoll
eps = 0.15

[potential]
kind = harmonic
amplitude = 0.5
coefficients = 1 0 0.3; 2,2,0.1

[solver]
l_max = 60
k_cap = 20
backend = fd-divergence
n_grid = 400
fiber_count = 16
order_x = 24
phi_count = 32
flow_tol = 1e-10
samples_per_turn = 1024

[trace]
abel_t_min = 0.01
abel_t_max = 0.08
abel_points = 10
heat_t_min = 0.005
heat_t_max = 0.06
heat_points = 11
gamma = curvature
max_discrepancy = 1e-6
max_discrepancy_rel = 1e-3

[output]
dir = /tmp/somewhere
cache_dir = /tmp/elsewhere
)";

} // namespace

TEST_CASE("config: a full file parses into the declared fields") {
    const ExperimentConfig c = parse_config(kFullConfig, "inline");
    CHECK(c.metric_family == "zoll");
    CHECK(c.metric_eps == 0.15);
    CHECK(c.potential_kind == "harmonic");
    CHECK(c.potential_amplitude == 0.5);
    REQUIRE(c.potential_harmonics.size() == 2);
    CHECK(c.potential_harmonics[0].l == 1);
    CHECK(c.potential_harmonics[0].m == 0);
    CHECK(c.potential_harmonics[0].c == 0.3);
    CHECK(c.potential_harmonics[1].l == 2);
    CHECK(c.potential_harmonics[1].m == 2);
    CHECK(c.potential_harmonics[1].c == 0.1);
    CHECK(c.l_max == 60);
    CHECK(c.k_cap == 20);
    CHECK(c.backend == "fd-divergence");
    CHECK(c.n_grid == 400);
    CHECK(c.fiber_count == 16);
    CHECK(c.order_x == 24);
    CHECK(c.phi_count == 32);
    CHECK(c.flow_tol == 1e-10);
    CHECK(c.samples_per_turn == 1024);
    CHECK(c.abel_t_min == 0.01);
    CHECK(c.abel_t_max == 0.08);
    CHECK(c.abel_points == 10);
    CHECK(c.heat_t_min == 0.005);
    CHECK(c.heat_t_max == 0.06);
    CHECK(c.heat_points == 11);
    CHECK(c.gamma == "curvature");
    CHECK(c.max_discrepancy == 1e-6);
    CHECK(c.max_discrepancy_rel == 1e-3);
    CHECK(c.out_dir == "/tmp/somewhere");
    CHECK(c.cache_dir == "/tmp/elsewhere");
    CHECK(c.origin == "inline");
}

TEST_CASE("config: defaults survive an empty file") {
    const ExperimentConfig c = parse_config("", "empty");
    CHECK(c.metric_family == "round");
    CHECK(c.metric_eps == 0.0);
    CHECK(c.potential_kind == "zero");
    CHECK(c.l_max == 240);
    CHECK(c.k_cap == 72);
    CHECK(c.backend == "galerkin-legendre");
    CHECK(c.gamma == "curvature-minus-one");
    CHECK(c.out_dir == ".");
}

TEST_CASE("config: unknown keys and sections are named with their line") {
    try {
        parse_config("[metric]\nfamily = round\nepsilon = 0.1\n", "bad.ini");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("bad.ini:3") != std::string::npos);
        CHECK(what.find("epsilon") != std::string::npos);
    }
    try {
        parse_config("[metrics]\n", "bad.ini");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("metrics") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("family = round\n", "no-section.ini"), ConfigError);
}

TEST_CASE("config: malformed and out-of-range values are rejected") {
    CHECK_THROWS_AS(parse_config("[metric]\neps = 0.1x\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nl_max = twelve\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nl_max = 4\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[metric]\nfamily = torus\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[metric]\nfamily = zoll\neps = 0.5\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nbackend = spectral\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nn_grid = 100\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nflow_tol = 1e-20\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config("[trace]\ngamma = none\n", "t"), ConfigError);
    // Grid bounds must come in pairs and in order.
    CHECK_THROWS_AS(parse_config("[trace]\nabel_t_min = 0.01\n", "t"), ConfigError);
    CHECK_THROWS_AS(
        parse_config("[trace]\nheat_t_min = 0.05\nheat_t_max = 0.01\n", "t"), ConfigError);
    // A heat span below a factor of 8 is not fittable.
    CHECK_THROWS_AS(
        parse_config("[trace]\nheat_t_min = 0.01\nheat_t_max = 0.02\n", "t"), ConfigError);
}

TEST_CASE("config: harmonic coefficient lists") {
    auto parse_h = [](const std::string& spec) {
        return parse_config("[potential]\nkind = harmonic\ncoefficients = " + spec + "\n", "t")
            .potential_harmonics;
    };
    const auto a = parse_h("1 0 0.5");
    REQUIRE(a.size() == 1);
    CHECK(a[0].l == 1);
    const auto b = parse_h("2, -1, 0.25; 3 3 1e-2");
    REQUIRE(b.size() == 2);
    CHECK(b[0].m == -1);
    CHECK(b[1].c == 1e-2);
    CHECK_THROWS_AS(parse_h("1 0"), ConfigError);          // incomplete triple
    CHECK_THROWS_AS(parse_h("2 3 0.1"), ConfigError);      // |m| > l
    CHECK_THROWS_AS(parse_h("-1 0 0.1"), ConfigError);     // negative degree
    CHECK_THROWS_AS(parse_h("70 0 0.1"), ConfigError);     // beyond the band cap
    CHECK_THROWS_AS(
        parse_config("[potential]\nkind = harmonic\n", "t"), ConfigError); // none at all
}

TEST_CASE("config: realized potential scales harmonics by the amplitude") {
    const ExperimentConfig c = parse_config(
        "[potential]\nkind = harmonic\namplitude = 2.0\ncoefficients = 2 0 0.3\n", "t");
    const ScalarField q = make_potential(c);
    CHECK(q.band() == 2);
    REQUIRE(q.harmonic_coeffs().size() == 1);
    CHECK(q.harmonic_coeffs()[0].c == 0.6);

    const ExperimentConfig z = parse_config("", "t");
    CHECK(make_potential(z).is_zero());

    const ExperimentConfig k =
        parse_config("[potential]\nkind = constant\namplitude = -0.4\n", "t");
    const ScalarField qk = make_potential(k);
    CHECK(qk.value(1.0, 2.0) == -0.4);
}

TEST_CASE("config: every spectrum-relevant input moves the content string") {
    const ExperimentConfig base = parse_config("", "t");
    const std::string s0 = spectrum_content_string(base);
    const char* variants[] = {
        "[metric]\nfamily = zoll\neps = 0.1\n",
        "[metric]\nfamily = round\neps = 0.0\n[potential]\nkind = constant\namplitude = 1\n",
        "[potential]\nkind = harmonic\ncoefficients = 1 0 0.5\n",
        "[solver]\nl_max = 200\n",
        "[solver]\nk_cap = 40\n",
        "[solver]\nbackend = fd-divergence\n",
        "[solver]\nn_grid = 400\n",
        "[solver]\nn_basis = 90\n",
    };
    for (const char* v : variants) {
        const std::string s = spectrum_content_string(parse_config(v, "t"));
        CHECK(s != s0);
    }
    // Inputs that do not affect the spectrum leave the key unchanged.
    const std::string s_out =
        spectrum_content_string(parse_config("[output]\ndir = /tmp/x\n", "t"));
    CHECK(s_out == s0);
    const std::string s_trace =
        spectrum_content_string(parse_config("[trace]\nabel_points = 9\n", "t"));
    CHECK(s_trace == s0);
}

TEST_CASE("content hash matches the published 64-bit FNV-1a vectors") {
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("foobar") == "85944171f73967e8");
}

TEST_CASE("spectrum cache: store/load round trip is bit exact") {
    TempDir tmp;
    SpectrumCache cache((tmp.path / "cache").string());
    const std::string key = "metric=round|potential=zero|l_max=30";

    CHECK(!cache.load(key).has_value());

    ClusteredSpectrum s = round_exact_spectrum(12);
    // Perturb to non-trivial doubles so bit-exactness actually bites.
    for (auto& [k, lams] : s.clusters)
        for (double& lam : lams) lam += 0.1 * std::sin(lam + k);
    s.provenance = "unit-test";
    cache.store(key, s);

    const auto back = cache.load(key);
    REQUIRE(back.has_value());
    CHECK(back->k_max_reliable == s.k_max_reliable);
    CHECK(back->provenance == s.provenance);
    REQUIRE(back->clusters.size() == s.clusters.size());
    for (const auto& [k, lams] : s.clusters) {
        const auto& other = back->clusters.at(k);
        REQUIRE(other.size() == lams.size());
        for (size_t i = 0; i < lams.size(); ++i) CHECK(other[i] == lams[i]);
    }

    // A different key is a miss, not a collision.
    CHECK(!cache.load(key + "|x").has_value());
}

TEST_CASE("spectrum cache: stale versions miss, corrupt rows throw") {
    TempDir tmp;
    SpectrumCache cache(tmp.path.string());
    const std::string key = "k";
    ClusteredSpectrum s = round_exact_spectrum(3);
    cache.store(key, s);
    const std::string path = cache.entry_path(key);
    REQUIRE(fs::exists(path));
    const std::string good = slurp(path);

    // Stale code version: silently a miss.
    std::string stale = good;
    const size_t vpos = stale.find("version=");
    REQUIRE(vpos != std::string::npos);
    stale.replace(vpos, std::string("version=").size() + 5, "version=0.0.0");
    atomic_write_text(path, stale);
    CHECK(!cache.load(key).has_value());

    // Foreign schema line: also a miss.
    atomic_write_text(path, "some-other-tool v9\n");
    CHECK(!cache.load(key).has_value());

    // Structural damage behind a valid header: an error, not a miss.
    std::string corrupt = good;
    const size_t last = corrupt.find_last_of('\n', corrupt.size() - 2);
    corrupt = corrupt.substr(0, last + 1); // drop the final eigenvalue row
    atomic_write_text(path, corrupt);
    CHECK_THROWS_AS(cache.load(key), CacheError);

    // Restoring the original bytes restores the hit.
    atomic_write_text(path, good);
    CHECK(cache.load(key).has_value());
}

TEST_CASE("report rendering is insertion-ordered and full precision") {
    Report r;
    r.add("schema", std::string("spectrace-report v1"));
    r.add("alpha", 1.0 / 3.0);
    r.add("count", 42);
    r.add_flag("ok", true);
    r.add("big", 9007199254740993ll);
    const std::string text = r.render();
    CHECK(text == "schema = spectrace-report v1\n"
                  "alpha = 0.33333333333333331\n"
                  "count = 42\n"
                  "ok = true\n"
                  "big = 9007199254740993\n");
    CHECK(format_full(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_full(1.0) == "1");
}

TEST_CASE("csv rendering quotes exactly the fields that need it") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
    CHECK(csv_escape("with\nnewline") == "\"with\nnewline\"");
    CHECK(csv_escape("") == "");
    const std::string csv = render_csv({{"k", "value"}, {"1", "0.5"}, {"2", "a,b"}});
    CHECK(csv == "k,value\n1,0.5\n2,\"a,b\"\n");
}

TEST_CASE("atomic text writes create parents and replace contents") {
    TempDir tmp;
    const fs::path p = tmp.path / "nested" / "dir" / "file.txt";
    atomic_write_text(p.string(), "first\n");
    CHECK(slurp(p) == "first\n");
    atomic_write_text(p.string(), "second\n");
    CHECK(slurp(p) == "second\n");
    // No temp-file litter in the directory.
    int files = 0;
    for (const auto& entry : fs::directory_iterator(p.parent_path())) {
        (void)entry;
        ++files;
    }
    CHECK(files == 1);
}

TEST_CASE("config: realized metric and trace options match the text") {
    const ExperimentConfig c = parse_config(kFullConfig, "t");
    const MetricPatch metric = make_metric(c);
    REQUIRE(metric.has_profile());
    CHECK(metric.profile().family == "zoll");
    CHECK(metric.profile().eps == 0.15);
    const TraceOptions opts = make_trace_options(c);
    CHECK(opts.l_max == 60);
    CHECK(opts.k_cap == 20);
    CHECK(opts.separated.backend == SeparatedBackend::fd_divergence);
    CHECK(opts.separated.n_grid == 400);
    CHECK(opts.liouville.fiber_count == 16);
    CHECK(opts.liouville.order_x == 24);
    CHECK(opts.liouville.phi_count == 32);
    CHECK(opts.gamma == GammaConvention::curvature);
    REQUIRE(int(opts.abel_grid.size()) == 10);
    CHECK(std::abs(opts.abel_grid.front() - 0.01) < 1e-15);
    CHECK(std::abs(opts.abel_grid.back() - 0.08) < 1e-15);
    REQUIRE(int(opts.heat_grid.size()) == 11);
    CHECK(std::abs(opts.heat_grid.front() - 0.005) < 1e-15);
}
