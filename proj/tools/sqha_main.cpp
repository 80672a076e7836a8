// Command-line front end: simulate | scan-theta | analyze | gen-noise | validate.
// Every run artifact (CSV, SVG, JSON report) lands in the configured output
// directory; stdout carries a short human summary.

#include "CLI11.hpp"

#include "sqha/acceptance.hpp"
#include "sqha/config.hpp"
#include "sqha/diagnostics.hpp"
#include "sqha/ensemble.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/madelung.hpp"
#include "sqha/noise.hpp"
#include "sqha/nonlocality.hpp"
#include "sqha/output.hpp"
#include "sqha/quantum_potential.hpp"
#include "sqha/sqha.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

using sqha::ordered_json;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string seed_text;
    int threads = 0;
    bool no_timestamp = false;
};

/// Seed precedence: --seed beats SQHA_SEED beats the config file.
sqha::RunConfig load_config(const CommonOpts& o) {
    sqha::RunConfig cfg = sqha::parse_config(o.config_path);
    if (const char* env = std::getenv("SQHA_SEED"); env != nullptr && *env != '\0') {
        cfg.base_seed = std::strtoull(env, nullptr, 10);
    }
    if (!o.seed_text.empty()) {
        cfg.base_seed = std::strtoull(o.seed_text.c_str(), nullptr, 10);
    }
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    if (o.no_timestamp) cfg.emit_timestamp = false;
    return cfg;
}

sqha::Exec choose_exec(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
    return threads == 1 ? sqha::Exec::serial : sqha::Exec::openmp;
#else
    (void)threads;
    return sqha::Exec::serial;
#endif
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> velocity_field(const sqha::WFMField& f, const sqha::Grid1D& grid,
                                   const sqha::PhysicalConstants& c) {
    std::vector<double> v(grid.n_cells);
    const double inv = 1.0 / (2.0 * grid.spacing() * c.mass);
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const std::size_t l = grid.neighbor(static_cast<std::ptrdiff_t>(i) - 1);
        const std::size_t r = grid.neighbor(static_cast<std::ptrdiff_t>(i) + 1);
        v[i] = (f.S[r] - f.S[l]) * inv;
    }
    return v;
}

sqha::CsvTable trace_table(const sqha::EnsembleResult& res) {
    sqha::CsvTable t;
    t.schema = "sqha.trace.v1";
    t.header = {"realization", "observable", "value"};
    const char* names[6] = {"mass_drift",
                            "mean_clip_fraction",
                            "istar_ms_window",
                            "compensated_grad_ms_window",
                            "wave_particle_residual",
                            "delta_p_st"};
    for (std::size_t k = 0; k < res.realizations.size(); ++k) {
        const sqha::RealizationSummary& s = res.realizations[k];
        const double values[6] = {s.mass_drift,
                                  s.mean_clip_fraction,
                                  s.istar_ms_window,
                                  s.compensated_grad_ms_window,
                                  s.wave_particle_residual,
                                  s.delta_p_st};
        for (int j = 0; j < 6; ++j) {
            t.rows.push_back({std::to_string(k), names[j], sqha::format_double(values[j])});
        }
    }
    return t;
}

ordered_json ensemble_json(const sqha::EnsembleResult& res) {
    ordered_json j;
    j["n_realizations"] = res.realizations.size();
    j["istar_variance"] = res.istar_variance;
    j["istar_variance_se"] = res.istar_variance_se;
    j["compensated_grad_variance"] = res.compensated_grad_variance;
    j["compensated_grad_variance_se"] = res.compensated_grad_variance_se;
    j["mean_mass_drift"] = res.mean_mass_drift;
    j["max_clip_fraction"] = res.max_clip_fraction;
    j["mean_delta_p_st"] = res.mean_delta_p_st;
    j["window_cell_count"] = res.window_cell_count;
    return j;
}

int cmd_simulate(const sqha::RunConfig& cfg, sqha::Exec exec) {
    const auto t0 = std::chrono::steady_clock::now();
    const sqha::Grid1D grid = cfg.make_run_grid();
    const std::vector<double> V = cfg.make_run_potential(grid);
    const sqha::WFMField init = sqha::init_profile(grid, cfg.profile, cfg.constants);
    const sqha::SqhaConfig scfg = cfg.make_sqha_config();

    sqha::SqhaSolver solver(grid, V, cfg.constants, scfg, cfg.dt);
    sqha::SQHAState state = solver.make_state(init);
    std::mt19937_64 rng(cfg.base_seed);

    const std::size_t snap_stride =
        cfg.snapshot_stride != 0 ? cfg.snapshot_stride : std::max<std::size_t>(cfg.n_steps / 10, 1);
    const std::size_t obs_stride = std::max<std::size_t>(cfg.n_steps / 1000, 1);
    const double mass0 = sqha::integrate(init.n, grid);

    sqha::CsvTable trajectory;
    trajectory.schema = "sqha.trajectory.v1";
    trajectory.header = {"t", "q", "n", "S"};
    const auto snapshot = [&](double t, const sqha::WFMField& f) {
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            trajectory.rows.push_back({sqha::format_double(t), sqha::format_double(grid.q(i)),
                                       sqha::format_double(f.n[i]),
                                       sqha::format_double(f.S[i])});
        }
    };
    std::vector<sqha::PlotSeries> density_series;
    const auto density_snapshot = [&](double t, const sqha::WFMField& f) {
        sqha::PlotSeries s;
        s.label = "t = " + sqha::format_double(t);
        s.x = grid.coordinates();
        s.y = f.n;
        density_series.push_back(std::move(s));
    };
    snapshot(0.0, state.field);
    density_snapshot(0.0, state.field);

    std::vector<double> ts, mass_drift, clip_fraction, residual;
    for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
        solver.step(state, rng);
        const double t = static_cast<double>(k) * cfg.dt;
        if (k % obs_stride == 0 || k == cfg.n_steps) {
            ts.push_back(t);
            mass_drift.push_back(sqha::integrate(state.field.n, grid) / mass0 - 1.0);
            clip_fraction.push_back(state.last_clip_fraction);
            residual.push_back(sqha::wave_particle_residual(
                state.field, grid, cfg.constants,
                velocity_field(state.companion, grid, cfg.constants)));
        }
        if (k % snap_stride == 0 || k == cfg.n_steps) {
            snapshot(t, state.field);
            if (density_series.size() < 8) density_snapshot(t, state.field);
        }
    }

    const sqha::EnsembleConfig ens = cfg.make_ensemble_config(exec);
    const sqha::EnsembleResult res =
        sqha::run_ensemble(grid, V, cfg.constants, scfg, cfg.dt, init, ens);

    sqha::ensure_directory(cfg.output_dir);
    sqha::write_csv(cfg.output_dir + "/trajectory.csv", trajectory);

    sqha::CsvTable obs;
    obs.schema = "sqha.observables.v1";
    obs.header = {"t", "mass_drift", "clip_fraction", "wave_particle_residual"};
    for (std::size_t k = 0; k < ts.size(); ++k) {
        obs.rows.push_back({sqha::format_double(ts[k]), sqha::format_double(mass_drift[k]),
                            sqha::format_double(clip_fraction[k]),
                            sqha::format_double(residual[k])});
    }
    sqha::write_csv(cfg.output_dir + "/observables.csv", obs);
    sqha::write_csv(cfg.output_dir + "/trace.csv", trace_table(res));

    sqha::PlotOptions dopt;
    dopt.title = "density snapshots";
    dopt.x_label = "q";
    dopt.y_label = "n";
    sqha::write_svg_plot(cfg.output_dir + "/density.svg", density_series, dopt);

    sqha::PlotOptions oopt;
    oopt.title = "run observables";
    oopt.x_label = "t";
    oopt.y_label = "value";
    sqha::write_svg_plot(cfg.output_dir + "/observables.svg",
                         {sqha::PlotSeries{"mass_drift", ts, mass_drift, false},
                          sqha::PlotSeries{"clip_fraction", ts, clip_fraction, false},
                          sqha::PlotSeries{"wave_particle_residual", ts, residual, false}},
                         oopt);

    sqha::ReportBuilder rb(cfg);
    rb.add_time_series("mass_drift", ts, mass_drift);
    rb.add_time_series("clip_fraction", ts, clip_fraction);
    rb.add_time_series("wave_particle_residual", ts, residual);
    rb.set("ensemble", ensemble_json(res));
    rb.add_runtime(seconds_since(t0), cfg.n_steps * (1 + ens.n_realizations));
    rb.write(cfg.output_dir + "/report.json");

    std::cout << "simulate: " << cfg.n_steps << " steps, " << ens.n_realizations
              << " realizations\n"
              << "  final mass drift  " << sqha::format_double(mass_drift.back()) << "\n"
              << "  excess-potential variance  " << sqha::format_double(res.istar_variance)
              << " (se " << sqha::format_double(res.istar_variance_se) << ")\n"
              << "  wrote " << cfg.output_dir
              << "/{trajectory.csv, observables.csv, trace.csv, density.svg, observables.svg, "
                 "report.json}\n";
    return 0;
}

int cmd_scan_theta(const sqha::RunConfig& cfg, sqha::Exec exec) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.scan_thetas.size() < 4) {
        throw std::runtime_error(
            "scan-theta needs at least 4 values in scan.thetas (got " +
            std::to_string(cfg.scan_thetas.size()) + ")");
    }
    const sqha::Grid1D grid = cfg.make_run_grid();
    const std::vector<double> V = cfg.make_run_potential(grid);
    const sqha::WFMField init = sqha::init_profile(grid, cfg.profile, cfg.constants);

    std::vector<double> v_istar, se_istar, v_grad, se_grad;
    std::size_t total_steps = 0;
    for (std::size_t i = 0; i < cfg.scan_thetas.size(); ++i) {
        const double theta = cfg.scan_thetas[i];
        if (cfg.scan_synthetic) {
            // Pipeline self-check: exact power laws in place of the solver.
            v_istar.push_back(0.5 * theta * theta * theta);
            v_grad.push_back(0.25 * theta * theta * theta * theta);
            se_istar.push_back(0.0);
            se_grad.push_back(0.0);
            continue;
        }
        sqha::RunConfig point = cfg;
        point.theta = theta;
        const sqha::SqhaConfig scfg = point.make_sqha_config();
        sqha::EnsembleConfig ens = cfg.make_ensemble_config(exec);
        ens.base_seed = cfg.base_seed + 1000 * static_cast<std::uint64_t>(i);
        const sqha::EnsembleResult res =
            sqha::run_ensemble(grid, V, cfg.constants, scfg, cfg.dt, init, ens);
        v_istar.push_back(res.istar_variance);
        se_istar.push_back(res.istar_variance_se);
        v_grad.push_back(res.compensated_grad_variance);
        se_grad.push_back(res.compensated_grad_variance_se);
        total_steps += ens.n_realizations * ens.n_steps;
    }

    const sqha::ScalingFitResult fit3 = sqha::scaling_fit(cfg.scan_thetas, v_istar);
    const sqha::ScalingFitResult fit4 = sqha::scaling_fit(cfg.scan_thetas, v_grad);

    sqha::ensure_directory(cfg.output_dir);
    sqha::CsvTable scan;
    scan.schema = "sqha.scan.v1";
    scan.header = {"theta", "istar_variance", "istar_variance_se", "compensated_grad_variance",
                   "compensated_grad_variance_se"};
    for (std::size_t i = 0; i < cfg.scan_thetas.size(); ++i) {
        scan.rows.push_back({sqha::format_double(cfg.scan_thetas[i]),
                             sqha::format_double(v_istar[i]), sqha::format_double(se_istar[i]),
                             sqha::format_double(v_grad[i]), sqha::format_double(se_grad[i])});
    }
    sqha::write_csv(cfg.output_dir + "/scan.csv", scan);

    const auto fit_line_series = [&](const sqha::ScalingFitResult& fit, const char* label) {
        const double lo = cfg.scan_thetas.front(), hi = cfg.scan_thetas.back();
        sqha::PlotSeries s;
        s.label = label;
        s.x = {lo, hi};
        s.y = {std::exp(fit.intercept + fit.exponent * std::log(lo)),
               std::exp(fit.intercept + fit.exponent * std::log(hi))};
        return s;
    };
    sqha::PlotOptions popt;
    popt.title = "variance scaling with theta";
    popt.x_label = "theta";
    popt.y_label = "variance";
    popt.log_x = true;
    popt.log_y = true;
    sqha::write_svg_plot(
        cfg.output_dir + "/scaling.svg",
        {sqha::PlotSeries{"excess potential", cfg.scan_thetas, v_istar, true},
         fit_line_series(fit3, "fit"),
         sqha::PlotSeries{"compensated gradient", cfg.scan_thetas, v_grad, true},
         fit_line_series(fit4, "fit")},
        popt);

    sqha::ReportBuilder rb(cfg);
    rb.set("scaling_istar", sqha::scaling_json(fit3));
    rb.set("scaling_compensated_grad", sqha::scaling_json(fit4));
    rb.set("synthetic", cfg.scan_synthetic);
    rb.add_runtime(seconds_since(t0), total_steps);
    rb.write(cfg.output_dir + "/report.json");

    std::cout << "scan-theta over " << cfg.scan_thetas.size() << " values\n"
              << "  excess-potential variance ~ theta^"
              << sqha::format_double(fit3.exponent) << " (r2 "
              << sqha::format_double(fit3.r_squared) << ")\n"
              << "  compensated-gradient variance ~ theta^"
              << sqha::format_double(fit4.exponent) << " (r2 "
              << sqha::format_double(fit4.r_squared) << ")\n"
              << "  wrote " << cfg.output_dir << "/{scan.csv, scaling.svg, report.json}\n";
    return 0;
}

int cmd_analyze(const sqha::RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const sqha::Grid1D grid = cfg.make_run_grid();
    const sqha::WFMField field = sqha::init_profile(grid, cfg.profile, cfg.constants);
    const sqha::NonlocalityParams params = cfg.make_nonlocality_params(cfg.constants);

    const sqha::NonlocalityReport rep =
        sqha::analyze_nonlocality(field, grid, cfg.constants, params);
    const std::string verdict = sqha::nonlocality_verdict_line(rep);

    sqha::ensure_directory(cfg.output_dir);
    const sqha::QPField qp = sqha::qp_sqrt_form(field.n, grid, cfg.constants);
    const std::vector<double> force = sqha::quantum_force(qp, grid);
    sqha::CsvTable ft;
    ft.schema = "sqha.force.v1";
    ft.header = {"q", "n", "v_qu", "force", "masked"};
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        ft.rows.push_back({sqha::format_double(grid.q(i)), sqha::format_double(field.n[i]),
                           sqha::format_double(qp.v_qu[i]), sqha::format_double(force[i]),
                           qp.masked[i] != 0 ? "1" : "0"});
    }
    sqha::write_csv(cfg.output_dir + "/force_profile.csv", ft);

    // Tail view: -log sqrt(n) against |q| on log-log axes, with the fitted
    // window marked by restricting the series to it.
    sqha::PlotSeries tail_pts;
    tail_pts.label = "profile";
    tail_pts.scatter = true;
    sqha::PlotSeries window_pts;
    window_pts.label = "fit window (h = " + sqha::format_double(rep.tail.h) + ")";
    window_pts.scatter = true;
    const double max_n = *std::max_element(field.n.begin(), field.n.end());
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double aq = std::abs(grid.q(i));
        const double n = field.n[i];
        if (aq <= 0.0 || !(n > 1e-12 * max_n) || !(n < max_n)) continue;
        const double y = -0.5 * std::log(n);
        if (!(y > 0.0)) continue;
        tail_pts.x.push_back(aq);
        tail_pts.y.push_back(y);
        if (aq >= rep.tail.window_lo && aq <= rep.tail.window_hi) {
            window_pts.x.push_back(aq);
            window_pts.y.push_back(y);
        }
    }
    sqha::PlotOptions topt;
    topt.title = "density tail";
    topt.x_label = "|q|";
    topt.y_label = "-log sqrt(n)";
    topt.log_x = true;
    topt.log_y = true;
    sqha::write_svg_plot(cfg.output_dir + "/tail.svg", {tail_pts, window_pts}, topt);

    sqha::ReportBuilder rb(cfg);
    rb.set("nonlocality", sqha::nonlocality_json(rep));
    rb.set("verdict", verdict);
    rb.add_runtime(seconds_since(t0), 0);
    rb.write(cfg.output_dir + "/report.json");

    std::cout << verdict << "\n"
              << "  wrote " << cfg.output_dir
              << "/{force_profile.csv, tail.svg, report.json}\n";
    return 0;
}

int cmd_gen_noise(const sqha::RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(cfg.theta > 0.0)) {
        throw std::runtime_error("gen-noise needs noise.theta > 0");
    }
    const sqha::Grid1D grid = cfg.make_run_grid();
    const sqha::NoiseModel model =
        sqha::make_noise_model(cfg.constants, cfg.theta, cfg.delta_l);
    const sqha::CorrelationKernel kernel = cfg.make_kernel();
    const sqha::KernelAdmissibility adm = sqha::check_kernel_admissible(kernel);

    sqha::NoiseSampler sampler(grid, model, kernel, cfg.dt);
    std::mt19937_64 rng(cfg.base_seed);
    const std::size_t n_fields = cfg.n_realizations;
    std::vector<std::vector<double>> fields(n_fields);
    double mean_square = 0.0;
    for (std::size_t k = 0; k < n_fields; ++k) {
        fields[k] = sampler.sample(rng);
        for (const double e : fields[k]) mean_square += e * e;
    }
    mean_square /= static_cast<double>(n_fields * grid.n_cells);

    sqha::ensure_directory(cfg.output_dir);
    sqha::CsvTable nt;
    nt.schema = "sqha.noise.v1";
    nt.header = {"realization", "q", "value"};
    for (std::size_t k = 0; k < n_fields; ++k) {
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            nt.rows.push_back({std::to_string(k), sqha::format_double(grid.q(i)),
                               sqha::format_double(fields[k][i])});
        }
    }
    sqha::write_csv(cfg.output_dir + "/noise_fields.csv", nt);

    const std::size_t max_lag = std::min<std::size_t>(grid.n_cells / 2, 32);
    const std::vector<double> corr = sqha::estimate_correlation(fields, max_lag);
    sqha::CsvTable ct;
    ct.schema = "sqha.correlation.v1";
    ct.header = {"lag", "distance", "empirical", "kernel"};
    sqha::PlotSeries emp, ker;
    emp.label = "empirical";
    emp.scatter = true;
    ker.label = "kernel";
    for (std::size_t lag = 0; lag < corr.size(); ++lag) {
        const double d = static_cast<double>(lag) * grid.spacing();
        const double kv = std::isfinite(model.lambda_c) ? kernel(d / model.lambda_c) : 1.0;
        ct.rows.push_back({std::to_string(lag), sqha::format_double(d),
                           sqha::format_double(corr[lag]), sqha::format_double(kv)});
        emp.x.push_back(d);
        emp.y.push_back(corr[lag]);
        ker.x.push_back(d);
        ker.y.push_back(kv);
    }
    sqha::write_csv(cfg.output_dir + "/correlation.csv", ct);
    sqha::PlotOptions copt;
    copt.title = "noise autocorrelation";
    copt.x_label = "distance";
    copt.y_label = "G";
    sqha::write_svg_plot(cfg.output_dir + "/correlation.svg", {emp, ker}, copt);

    sqha::ReportBuilder rb(cfg);
    ordered_json nj;
    nj["lambda_c"] = model.lambda_c;
    nj["g0"] = model.g0;
    nj["mean_square"] = mean_square;
    nj["expected_mean_square"] = model.g0 * cfg.dt;
    nj["clipped_eigenvalues"] = sampler.n_clipped();
    nj["kernel_admissible"] = adm.admissible;
    if (!adm.admissible) nj["kernel_rejection"] = adm.reason;
    rb.set("noise", nj);
    rb.add_runtime(seconds_since(t0), n_fields);
    rb.write(cfg.output_dir + "/report.json");

    std::cout << "gen-noise: " << n_fields << " fields on " << grid.n_cells << " cells\n"
              << "  lambda_c " << sqha::format_double(model.lambda_c) << ", g0 "
              << sqha::format_double(model.g0) << "\n"
              << "  mean square " << sqha::format_double(mean_square) << " (expected "
              << sqha::format_double(model.g0 * cfg.dt) << ")\n"
              << "  wrote " << cfg.output_dir
              << "/{noise_fields.csv, correlation.csv, correlation.svg, report.json}\n";
    return 0;
}

int cmd_validate(int criterion, double qp_scale, const std::string& out_dir) {
    sqha::AcceptanceOptions opt;
    opt.qp_prefactor_scale = qp_scale;
    if (!out_dir.empty()) opt.scratch_dir = out_dir + "/acceptance_scratch";

    std::vector<sqha::CriterionResult> results;
    if (criterion != 0) {
        results.push_back(sqha::run_criterion(criterion, opt));
    } else {
        results = sqha::run_acceptance(opt);
    }
    int failures = 0;
    for (const sqha::CriterionResult& r : results) {
        std::cout << sqha::format_criterion_line(r) << "\n" << std::flush;
        if (!r.passed) ++failures;
    }
    std::cout << (static_cast<int>(results.size()) - failures) << "/" << results.size()
              << " criteria passed\n";
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic quantum-hydrodynamic evolution and diagnostics"};
    app.require_subcommand(1);

    CommonOpts common;
    const auto add_common = [&](CLI::App* sub, bool config_required) {
        CLI::Option* c = sub->add_option("--config,-c", common.config_path,
                                         "run configuration file (key = value sections)");
        if (config_required) c->required();
        sub->add_option("--out,-o", common.out_dir, "output directory (overrides [output])");
        sub->add_option("--seed", common.seed_text,
                        "base RNG seed (beats SQHA_SEED and the config file)");
        sub->add_option("--threads,-j", common.threads,
                        "worker thread count (0 = library default, 1 = serial)");
        sub->add_flag("--no-timestamp", common.no_timestamp,
                      "omit timestamps and wall-clock fields for byte-identical reruns");
    };

    CLI::App* sim = app.add_subcommand(
        "simulate", "run one realization plus an ensemble and write all artifacts");
    add_common(sim, true);
    CLI::App* scan = app.add_subcommand(
        "scan-theta", "sweep scan.thetas and fit the variance power laws");
    add_common(scan, true);
    CLI::App* analyze = app.add_subcommand(
        "analyze", "tail exponent, force integral, nonlocality length, regime label");
    add_common(analyze, true);
    CLI::App* noise = app.add_subcommand(
        "gen-noise", "sample correlated noise fields and check their statistics");
    add_common(noise, true);

    CLI::App* validate = app.add_subcommand("validate", "run the built-in validation criteria");
    int criterion = 0;
    double qp_scale = 1.0;
    validate->add_option("--criterion", criterion, "run one criterion (1..10) instead of all");
    validate->add_option("--qp-prefactor-scale", qp_scale,
                         "mutation hook: scale the curvature prefactor inside criterion 3");
    validate->add_option("--out,-o", common.out_dir, "directory for scratch artifacts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(sim)) {
            return cmd_simulate(load_config(common), choose_exec(common.threads));
        }
        if (app.got_subcommand(scan)) {
            return cmd_scan_theta(load_config(common), choose_exec(common.threads));
        }
        if (app.got_subcommand(analyze)) {
            return cmd_analyze(load_config(common));
        }
        if (app.got_subcommand(noise)) {
            return cmd_gen_noise(load_config(common));
        }
        if (app.got_subcommand(validate)) {
            return cmd_validate(criterion, qp_scale, common.out_dir);
        }
    } catch (const sqha::ConfigError& e) {
        for (const std::string& msg : e.errors()) std::cerr << "config error: " << msg << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
