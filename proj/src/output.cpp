#include "sqha/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sqha {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> ticks;
    const double span = hi - lo;
    if (!(span > 0.0)) return ticks;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = 10.0 * mag;
    if (norm < 1.5) step = 1.0 * mag;
    else if (norm < 3.5) step = 2.0 * mag;
    else if (norm < 7.5) step = 5.0 * mag;
    double t = std::ceil(lo / step) * step;
    while (t <= hi + 1e-9 * span) {
        ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
        t += step;
    }
    return ticks;
}

std::string iso_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// JSON value for a double that may be non-finite (JSON has no inf/nan).
ordered_json jnum(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    const auto field = [](const std::string& f) {
        if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
        std::string quoted = "\"";
        for (const char c : f) {
            quoted += c;
            if (c == '"') quoted += '"';
        }
        quoted += '"';
        return quoted;
    };
    const auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << field(row[i]);
        }
        out << "\r\n";
    };
    out << "# schema=" << table.schema << "\r\n";
    write_row(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::invalid_argument("write_csv: row width does not match header in " + path);
        }
        write_row(row);
    }
}

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const PlotOptions& opt) {
    const double W = opt.width, H = opt.height;
    const double ml = 72, mr = 18, mt = 42, mb = 56;
    const double pw = W - ml - mr, ph = H - mt - mb;

    // Transformed, finite data extent.
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    bool any = false;
    const auto tx = [&](double x) { return opt.log_x ? std::log10(x) : x; };
    const auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
    const auto usable = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return false;
        if (opt.log_x && !(x > 0.0)) return false;
        if (opt.log_y && !(y > 0.0)) return false;
        return true;
    };
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double X = tx(s.x[i]), Y = ty(s.y[i]);
            if (!any) {
                x0 = x1 = X;
                y0 = y1 = Y;
                any = true;
            } else {
                x0 = std::min(x0, X);
                x1 = std::max(x1, X);
                y0 = std::min(y0, Y);
                y1 = std::max(y1, Y);
            }
        }
    }
    const auto pad = [](double& lo, double& hi) {
        if (hi - lo > 0.0) {
            const double p = 0.05 * (hi - lo);
            lo -= p;
            hi += p;
        } else {
            const double p = std::max(1.0, std::abs(hi) * 0.1);
            lo -= p;
            hi += p;
        }
    };
    pad(x0, x1);
    pad(y0, y1);
    const auto sx = [&](double X) { return ml + (X - x0) / (x1 - x0) * pw; };
    const auto sy = [&](double Y) { return H - mb - (Y - y0) / (y1 - y0) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n";
    svg << "<rect width=\"" << opt.width << "\" height=\"" << opt.height
        << "\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"" << px(W / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\" fill=\"#111111\">"
        << xml_escape(opt.title) << "</text>\n";

    // Gridlines and ticks.
    const auto axis_ticks = [&](double lo, double hi, bool log_axis) {
        if (log_axis) {
            std::vector<double> t;
            for (double d = std::ceil(lo); d <= std::floor(hi) + 1e-9; d += 1.0) t.push_back(d);
            if (t.size() >= 2) return t;
        }
        return nice_ticks(lo, hi, 5);
    };
    for (const double t : axis_ticks(x0, x1, opt.log_x)) {
        const double X = sx(t);
        svg << "<line x1=\"" << px(X) << "\" y1=\"" << px(mt) << "\" x2=\"" << px(X)
            << "\" y2=\"" << px(H - mb) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << px(X) << "\" y=\"" << px(H - mb + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
            << "fill=\"#333333\">" << tick_label(opt.log_x ? std::pow(10.0, t) : t)
            << "</text>\n";
    }
    for (const double t : axis_ticks(y0, y1, opt.log_y)) {
        const double Y = sy(t);
        svg << "<line x1=\"" << px(ml) << "\" y1=\"" << px(Y) << "\" x2=\"" << px(W - mr)
            << "\" y2=\"" << px(Y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << px(ml - 6) << "\" y=\"" << px(Y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
            << "fill=\"#333333\">" << tick_label(opt.log_y ? std::pow(10.0, t) : t)
            << "</text>\n";
    }
    svg << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\"" << px(pw)
        << "\" height=\"" << px(ph) << "\" fill=\"none\" stroke=\"#333333\" "
        << "stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << px(ml + pw / 2) << "\" y=\"" << px(H - 14)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "fill=\"#111111\">" << xml_escape(opt.x_label) << "</text>\n";
    svg << "<text x=\"18\" y=\"" << px(mt + ph / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "fill=\"#111111\" transform=\"rotate(-90 18 " << px(mt + ph / 2) << ")\">"
        << xml_escape(opt.y_label) << "</text>\n";

    svg << "<clipPath id=\"plotclip\"><rect x=\"" << px(ml) << "\" y=\"" << px(mt)
        << "\" width=\"" << px(pw) << "\" height=\"" << px(ph) << "\"/></clipPath>\n";
    svg << "<g clip-path=\"url(#plotclip)\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kPaletteSize];
        if (s.scatter) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                svg << "<circle cx=\"" << px(sx(tx(s.x[i]))) << "\" cy=\"" << px(sy(ty(s.y[i])))
                    << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
            }
        } else {
            svg << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.6\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                if (!first) svg << ' ';
                svg << px(sx(tx(s.x[i]))) << ',' << px(sy(ty(s.y[i])));
                first = false;
            }
            svg << "\"/>\n";
        }
    }
    svg << "</g>\n";

    // Legend.
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k].label.empty()) continue;
        const double ly = mt + 16 + 18.0 * static_cast<double>(k);
        const double lx = W - mr - 180;
        svg << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(lx + 22)
            << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << kPalette[k % kPaletteSize]
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << px(lx + 28) << "\" y=\"" << px(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#111111\">"
            << xml_escape(series[k].label) << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << svg.str();
}

ordered_json config_echo(const RunConfig& cfg) {
    ordered_json j;
    j["constants"] = {{"hbar", cfg.constants.hbar},
                      {"mass", cfg.constants.mass},
                      {"boltzmann", cfg.constants.boltzmann},
                      {"light_speed", cfg.constants.light_speed}};
    j["grid"] = {{"q_min", cfg.grid_q_min},
                 {"q_max", cfg.grid_q_max},
                 {"n_cells", cfg.grid_n_cells},
                 {"boundary", cfg.grid_boundary == Boundary::periodic ? "periodic" : "clamped"}};
    const char* profile_kind = "gaussian";
    switch (cfg.profile.kind) {
        case ProfileSpec::Kind::gaussian: profile_kind = "gaussian"; break;
        case ProfileSpec::Kind::stretched_exp: profile_kind = "stretched_exp"; break;
        case ProfileSpec::Kind::harmonic_ground: profile_kind = "harmonic_ground"; break;
        case ProfileSpec::Kind::table: profile_kind = "table"; break;
    }
    j["profile"] = {{"kind", profile_kind},     {"sigma", cfg.profile.sigma},
                    {"q0", cfg.profile.q0},     {"h", cfg.profile.h},
                    {"scale", cfg.profile.scale}, {"omega", cfg.profile.omega},
                    {"table", cfg.profile.table_path}};
    const char* potential_kind = "none";
    switch (cfg.potential_kind) {
        case PotentialKind::none: potential_kind = "none"; break;
        case PotentialKind::harmonic: potential_kind = "harmonic"; break;
        case PotentialKind::table: potential_kind = "table"; break;
    }
    j["potential"] = {{"kind", potential_kind},
                      {"omega", cfg.potential_omega},
                      {"table", cfg.potential_table}};
    j["noise"] = {{"theta", cfg.theta}, {"delta_l", cfg.delta_l}, {"kernel", cfg.kernel_spec}};
    j["evolve"] = {{"dt", cfg.dt},
                   {"n_steps", cfg.n_steps},
                   {"c_cfl", cfg.c_cfl},
                   {"positivity", cfg.positivity == Positivity::clip_only ? "clip_only"
                                                                          : "clip_renormalize"},
                   {"reanchor_interval", cfg.reanchor_interval},
                   {"classical_companion", cfg.classical_companion},
                   {"mask_abort_fraction", cfg.mask_abort_fraction},
                   {"snapshot_stride", cfg.snapshot_stride}};
    j["ensemble"] = {{"n_realizations", cfg.n_realizations},
                     {"base_seed", cfg.base_seed},
                     {"window_lo", cfg.window_lo},
                     {"window_hi", jnum(cfg.window_hi)}};
    j["scan"] = {{"thetas", cfg.scan_thetas}, {"synthetic", cfg.scan_synthetic}};
    j["analyze"] = {{"tail_window_lo", cfg.tail_window_lo},
                    {"tail_window_hi", cfg.tail_window_hi},
                    {"q_min", cfg.integral_q_min},
                    {"lambda_c", cfg.analyze_lambda_c},
                    {"delta_omega_q", cfg.delta_omega_q},
                    {"delta_omega_c", cfg.delta_omega_c},
                    {"m_exp", cfg.analyze_m_exp},
                    {"p_deg", cfg.analyze_p_deg},
                    {"macroscopic_ratio", cfg.thresholds.macroscopic_ratio},
                    {"local_ratio", cfg.thresholds.local_ratio}};
    j["output"] = {{"directory", cfg.output_dir}, {"timestamp", cfg.emit_timestamp}};
    return j;
}

ordered_json diagnostics_json(const FluctuationStats& stats, const VarianceCheck& gradsq,
                              const VarianceCheck& laplacian, const CrossTermCheck& cross,
                              const QpVarianceCheck& qp) {
    ordered_json j;
    j["g_hat"] = stats.g_hat;
    j["G_hat"] = stats.G_hat;
    j["A"] = stats.A;
    j["d1"] = stats.d1;
    j["d2"] = stats.d2;
    j["delta_t"] = stats.delta_t;
    j["gradsq_var_formula"] = gradsq.formula;
    j["gradsq_var_direct"] = gradsq.direct;
    j["laplacian_var_formula"] = laplacian.formula;
    j["laplacian_var_direct"] = laplacian.direct;
    j["cross_term"] = cross.value;
    j["cross_term_z"] = cross.z_score;
    j["qp_var_formula"] = qp.formula;
    j["qp_var_formula_negative"] = qp.formula_negative;
    j["qp_var_corrected"] = qp.corrected;
    j["qp_var_direct"] = qp.direct;
    return j;
}

ordered_json scaling_json(const ScalingFitResult& fit) {
    ordered_json j;
    j["exponent"] = fit.exponent;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r_squared;
    j["thetas"] = fit.theta_values;
    return j;
}

ordered_json nonlocality_json(const NonlocalityReport& report) {
    ordered_json j;
    j["tail"] = {{"h", report.tail.h},
                 {"phi", report.tail.phi},
                 {"window", {report.tail.window_lo, report.tail.window_hi}},
                 {"residual", report.tail.residual},
                 {"m_exp", report.tail.m_exp},
                 {"p_deg", report.tail.p_deg}};
    j["force_integral"] = {{"value", report.force.value},
                           {"diverges", report.force.diverges},
                           {"verdict", to_string(report.force.verdict)},
                           {"fitted_power", report.force.fitted_power},
                           {"power_fit_ok", report.force.power_fit_ok},
                           {"cauchy_ratio", report.force.cauchy_ratio},
                           {"n_windows", report.force.n_windows}};
    j["lambda_L"] = {{"status", to_string(report.lambda_l.status)},
                     {"value", jnum(report.lambda_l.value)}};
    j["prefactor_admissible"] = report.prefactor_ok;
    j["regime"] = to_string(report.regime);
    return j;
}

std::string nonlocality_verdict_line(const NonlocalityReport& report) {
    const auto locality_word = [&]() -> const char* {
        switch (report.regime) {
            case Regime::non_local_deterministic:
            case Regime::macroscopic_nonlocal_stochastic: return "non-local";
            case Regime::local_deterministic:
            case Regime::macroscopic_local_stochastic: return "local";
            case Regime::microscopic_stochastic: return "microscopic";
        }
        return "?";
    };
    char head[96];
    std::snprintf(head, sizeof head, "tail h = %.3f (phi = %.3f); force integral %s",
                  report.tail.h, report.tail.phi, to_string(report.force.verdict));
    std::string lambda_part;
    if (report.lambda_l.status == LambdaLStatus::finite) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.4g", report.lambda_l.value);
        lambda_part = buf;
    } else if (report.lambda_l.status == LambdaLStatus::infinite) {
        lambda_part = "infinite";
    } else {
        lambda_part = "undefined (zero denominator)";
    }
    std::ostringstream line;
    line << head << "; lambda_L: " << lambda_part << "; regime candidate: " << locality_word()
         << " [" << to_string(report.regime) << "]";
    return line.str();
}

ReportBuilder::ReportBuilder(const RunConfig& cfg) : emit_timestamp_(cfg.emit_timestamp) {
    root_["schema"] = "sqha.report.v1";
    if (emit_timestamp_) root_["generated_at"] = iso_utc_now();
    root_["config"] = config_echo(cfg);
}

void ReportBuilder::add_time_series(const std::string& name, const std::vector<double>& t,
                                    const std::vector<double>& values) {
    root_["observables"][name] = {{"t", t}, {"value", values}};
}

void ReportBuilder::set(const std::string& key, ordered_json value) {
    root_[key] = std::move(value);
}

void ReportBuilder::add_runtime(double wall_seconds, std::size_t total_steps) {
    root_["runtime"]["total_steps"] = total_steps;
    // Wall-clock is the one nondeterministic scalar; it rides with the
    // timestamp switch so that timestamp-free reports are byte-reproducible.
    if (emit_timestamp_) root_["runtime"]["wall_seconds"] = wall_seconds;
}

void ReportBuilder::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << root_.dump(2) << '\n';
}

}  // namespace sqha
