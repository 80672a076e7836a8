#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqha/config.hpp"
#include "sqha/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace sqha;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string scratch_path(const std::string& name) {
    return "config_output_scratch/" + name;
}

} // namespace

TEST_CASE("full config round trip through every section") {
    const std::string text = R"(
# run description
[constants]
hbar = 1.0
mass = 2.0

[grid]
q_min = -4.0
q_max = 4.0
n_cells = 256
boundary = clamped

[profile]
kind = stretched_exp
h = 1.5
scale = 2.0

[potential]
kind = harmonic
omega = 0.5

[noise]
theta = 0.25
delta_l = 1.5
kernel = gaussian

[evolve]
dt = 2e-4
n_steps = 500
c_cfl = 0.15
positivity = clip_only
reanchor_interval = 10
classical_companion = true
mask_abort_fraction = 0.8
snapshot_stride = 50

[ensemble]
n_realizations = 64
base_seed = 777
window_lo = 0.5
window_hi = 2.5

[scan]
thetas = 0.001, 0.01, 0.1, 1.0
synthetic = false

[analyze]
tail_window_lo = 2.0
tail_window_hi = 3.5
q_min = 0.4
delta_omega_q = 5.0
delta_omega_c = 50.0

[output]
directory = out_test
timestamp = false
)";
    const RunConfig cfg = parse_config_text(text);

    CHECK(cfg.constants.mass == 2.0);
    CHECK(cfg.grid_q_min == -4.0);
    CHECK(cfg.grid_n_cells == 256);
    CHECK(cfg.grid_boundary == Boundary::clamped);
    CHECK(cfg.profile.kind == ProfileSpec::Kind::stretched_exp);
    CHECK(cfg.profile.h == 1.5);
    CHECK(cfg.profile.scale == 2.0);
    CHECK(cfg.potential_kind == PotentialKind::harmonic);
    CHECK(cfg.potential_omega == 0.5);
    CHECK(cfg.theta == 0.25);
    CHECK(cfg.delta_l == 1.5);
    CHECK(cfg.dt == 2e-4);
    CHECK(cfg.n_steps == 500);
    CHECK(cfg.c_cfl == 0.15);
    CHECK(cfg.positivity == Positivity::clip_only);
    CHECK(cfg.reanchor_interval == 10);
    CHECK(cfg.classical_companion);
    CHECK(cfg.mask_abort_fraction == 0.8);
    CHECK(cfg.snapshot_stride == 50);
    CHECK(cfg.n_realizations == 64);
    CHECK(cfg.base_seed == 777);
    CHECK(cfg.window_lo == 0.5);
    CHECK(cfg.window_hi == 2.5);
    REQUIRE(cfg.scan_thetas.size() == 4);
    CHECK(cfg.scan_thetas[0] == 0.001);
    CHECK(cfg.scan_thetas[3] == 1.0);
    CHECK_FALSE(cfg.scan_synthetic);
    CHECK(cfg.tail_window_lo == 2.0);
    CHECK(cfg.tail_window_hi == 3.5);
    CHECK(cfg.integral_q_min == 0.4);
    CHECK(cfg.delta_omega_q == 5.0);
    CHECK(cfg.delta_omega_c == 50.0);
    CHECK(cfg.output_dir == "out_test");
    CHECK_FALSE(cfg.emit_timestamp);

    // Factories wire the parsed values through unchanged.
    const Grid1D grid = cfg.make_run_grid();
    CHECK(grid.n_cells == 256);
    CHECK(grid.boundary == Boundary::clamped);
    const SqhaConfig sc = cfg.make_sqha_config();
    CHECK(sc.theta == 0.25);
    CHECK(sc.delta_l == 1.5);
    CHECK(sc.positivity == Positivity::clip_only);
    CHECK(sc.reanchor_interval == 10);
    CHECK(sc.classical_companion);
    CHECK(sc.madelung.c_cfl == 0.15);
    CHECK(sc.madelung.mask_abort_fraction == 0.8);
    const EnsembleConfig ec = cfg.make_ensemble_config(Exec::serial);
    CHECK(ec.n_realizations == 64);
    CHECK(ec.base_seed == 777);
    CHECK(ec.window.abs_min == 0.5);
    CHECK(ec.window.abs_max == 2.5);
    const auto V = cfg.make_run_potential(grid);
    const std::size_t i = grid.nearest_cell(1.0);
    // V = m omega^2 q^2 / 2 with m = 2, omega = 0.5.
    CHECK(V[i] == doctest::Approx(0.25 * grid.q(i) * grid.q(i)).epsilon(1e-14));
}

TEST_CASE("defaults survive an empty config") {
    const RunConfig cfg = parse_config_text("");
    CHECK(cfg.grid_n_cells == 256);
    CHECK(cfg.theta == 0.0);
    CHECK(cfg.positivity == Positivity::clip_renormalize);
    CHECK(cfg.emit_timestamp);
    CHECK(cfg.output_dir == "out");
}

TEST_CASE("every problem in a config is reported at once") {
    const std::string text = R"(
[noise]
theta = -0.5

[evolve]
dt = 1e-3
dt = 2e-3

[frobnicate]
x = 1
)";
    try {
        parse_config_text(text);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.errors().size() == 3);
        const std::string all = e.what();
        CHECK(all.find("noise.theta: must be non-negative") != std::string::npos);
        CHECK(all.find("duplicate key 'evolve.dt'") != std::string::npos);
        CHECK(all.find("[frobnicate]: unknown section") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected, not silently dropped") {
    try {
        parse_config_text("[noise]\nlambda_v = 3\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.errors().size() == 1);
        CHECK(e.errors()[0].find("noise.lambda_v: unknown key") != std::string::npos);
    }
}

TEST_CASE("malformed numbers carry their location") {
    try {
        parse_config_text("[evolve]\ndt = fast\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.errors().size() >= 1);
        CHECK(e.what() == doctest::Contains("evolve.dt"));
    }
}

TEST_CASE("kernel tables load from disk through the kernel spec") {
    ensure_directory("config_output_scratch");
    const std::string path = scratch_path("kernel.csv");
    {
        std::ofstream out(path);
        out << "# distance, correlation\n";
        out << "0.0, 1.0\n";
        out << "1.0  0.5\n";  // whitespace-separated rows are accepted too
        out << "2.0, 0.0\n";
    }
    const auto rows = load_kernel_table(path);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].first == 1.0);
    CHECK(rows[1].second == 0.5);

    RunConfig cfg = parse_config_text("[noise]\ntheta = 0.1\nkernel = table:" + path + "\n");
    const CorrelationKernel k = cfg.make_kernel();
    CHECK(k(0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(k(3.0) == 0.0);

    cfg.kernel_spec = "cubic_spline";
    CHECK_THROWS_AS(cfg.make_kernel(), std::invalid_argument);
}

TEST_CASE("format_double is shortest-round-trip and locale-free") {
    const double cases[] = {0.0,           1.0,          0.1,        1.0 / 3.0,
                            -2.5e17,       1e-300,       5e-324,     3.14159265358979323846,
                            123456.789012, -1.0 / 1024.0};
    for (const double x : cases) {
        const std::string s = format_double(x);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("csv tables: schema comment, CRLF rows, minimal quoting") {
    ensure_directory("config_output_scratch");
    const std::string path = scratch_path("table.csv");
    CsvTable t;
    t.schema = "sqha.test.v1";
    t.header = {"name", "value"};
    t.rows = {{"plain", "1"}, {"with,comma", "2"}, {"with\"quote", "3"}};
    write_csv(path, t);

    const std::string bytes = slurp(path);
    CHECK(bytes.rfind("# schema=sqha.test.v1\r\n", 0) == 0);
    CHECK(bytes.find("name,value\r\n") != std::string::npos);
    CHECK(bytes.find("plain,1\r\n") != std::string::npos);
    CHECK(bytes.find("\"with,comma\",2\r\n") != std::string::npos);
    CHECK(bytes.find("\"with\"\"quote\",3\r\n") != std::string::npos);
    // Every row ends CRLF: as many CR as LF.
    std::size_t cr = 0, lf = 0;
    for (char c : bytes) {
        if (c == '\r') ++cr;
        if (c == '\n') ++lf;
    }
    CHECK(cr == lf);
    CHECK(lf == 5);  // schema + header + 3 rows
}

TEST_CASE("svg plots are byte-deterministic") {
    ensure_directory("config_output_scratch");
    PlotSeries s;
    s.label = "series-a";
    s.x = {0.1, 1.0, 10.0, 100.0};
    s.y = {1.0, 0.5, 0.25, 0.125};
    PlotOptions opt;
    opt.title = "decay";
    opt.x_label = "q";
    opt.y_label = "f";
    opt.log_x = true;
    opt.log_y = true;

    const std::string pa = scratch_path("plot_a.svg");
    const std::string pb = scratch_path("plot_b.svg");
    write_svg_plot(pa, {s}, opt);
    write_svg_plot(pb, {s}, opt);
    const std::string a = slurp(pa), b = slurp(pb);
    CHECK(a == b);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("series-a") != std::string::npos);
}

TEST_CASE("reports without timestamps are byte-reproducible") {
    ensure_directory("config_output_scratch");
    RunConfig cfg = parse_config_text("[output]\ntimestamp = false\n");
    ReportBuilder builder(cfg);
    builder.add_time_series("mass", {0.0, 1.0}, {1.0, 1.0});
    builder.set("extra", ordered_json{{"alpha", 1}});
    builder.add_runtime(12.34, 1000);  // suppressed without timestamps

    const std::string pa = scratch_path("report_a.json");
    const std::string pb = scratch_path("report_b.json");
    builder.write(pa);
    builder.write(pb);
    const std::string a = slurp(pa), b = slurp(pb);
    CHECK(a == b);
    CHECK(a.find("\"schema\"") != std::string::npos);
    CHECK(a.find("sqha.report.v1") != std::string::npos);
    CHECK(a.find("\"config\"") != std::string::npos);
    CHECK(a.find("generated_at") == std::string::npos);
    CHECK(a.find("wall_seconds") == std::string::npos);

    // With timestamps on, the clock fields appear.
    RunConfig timed = parse_config_text("[output]\ntimestamp = true\n");
    ReportBuilder tb(timed);
    tb.add_runtime(1.0, 10);
    const std::string pt = scratch_path("report_t.json");
    tb.write(pt);
    const std::string t = slurp(pt);
    CHECK(t.find("generated_at") != std::string::npos);
}

TEST_CASE("config echo mirrors the sections") {
    const RunConfig cfg = parse_config_text("[noise]\ntheta = 0.3\n");
    const ordered_json echo = config_echo(cfg);
    CHECK(echo.contains("constants"));
    CHECK(echo.contains("grid"));
    CHECK(echo.contains("noise"));
    CHECK(echo["noise"]["theta"].get<double>() == 0.3);
}

TEST_CASE("ensure_directory builds nested paths and is idempotent") {
    const std::string deep = "config_output_scratch/a/b/c";
    ensure_directory(deep);
    ensure_directory(deep);
    std::ofstream probe(deep + "/touch.txt");
    CHECK(probe.good());
}
