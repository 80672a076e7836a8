#include "sqha/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace sqha {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

/// Raw parse product: section -> key -> value, plus structural errors.
struct RawConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::vector<std::string> errors;
};

RawConfig tokenize(const std::string& text, const std::string& origin) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        std::ostringstream where;
        where << origin << ":" << lineno;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                raw.errors.push_back(where.str() + ": malformed section header '" + t + "'");
                section.clear();
                continue;
            }
            section = lower(trim(t.substr(1, t.size() - 2)));
            raw.sections[section];  // remember even empty sections
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            raw.errors.push_back(where.str() + ": expected 'key = value', got '" + t + "'");
            continue;
        }
        const std::string key = lower(trim(t.substr(0, eq)));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            raw.errors.push_back(where.str() + ": empty key");
            continue;
        }
        if (section.empty()) {
            raw.errors.push_back(where.str() + ": key '" + key + "' appears outside a section");
            continue;
        }
        auto& sect = raw.sections[section];
        if (sect.count(key)) {
            raw.errors.push_back(where.str() + ": duplicate key '" + section + "." + key + "'");
            continue;
        }
        sect[key] = value;
    }
    return raw;
}

/// Typed readers over the raw map.  Each records an error (with the dotted
/// key name) instead of throwing, so every problem in the file surfaces.
class Reader {
  public:
    Reader(RawConfig raw, std::vector<std::string>& errors)
        : raw_(std::move(raw)), errors_(errors) {
        errors_.insert(errors_.end(), raw_.errors.begin(), raw_.errors.end());
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = raw_.sections.find(section);
        return s != raw_.sections.end() && s->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           std::string fallback) {
        mark_consumed(section, key);
        const auto* v = find(section, key);
        return v ? *v : fallback;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) {
        mark_consumed(section, key);
        const auto* v = find(section, key);
        if (!v) return fallback;
        if (lower(*v) == "inf" || lower(*v) == "infinity") {
            return std::numeric_limits<double>::infinity();
        }
        try {
            std::size_t idx = 0;
            const double x = std::stod(*v, &idx);
            if (idx == v->size()) return x;
        } catch (const std::exception&) {
        }
        fail(section, key, "expected a number, got '" + *v + "'");
        return fallback;
    }

    std::size_t get_size(const std::string& section, const std::string& key,
                         std::size_t fallback) {
        mark_consumed(section, key);
        const auto* v = find(section, key);
        if (!v) return fallback;
        try {
            if (!v->empty() && (*v)[0] != '-') {
                std::size_t idx = 0;
                const unsigned long long x = std::stoull(*v, &idx);
                if (idx == v->size()) return static_cast<std::size_t>(x);
            }
        } catch (const std::exception&) {
        }
        fail(section, key, "expected a non-negative integer, got '" + *v + "'");
        return fallback;
    }

    int get_int(const std::string& section, const std::string& key, int fallback) {
        mark_consumed(section, key);
        const auto* v = find(section, key);
        if (!v) return fallback;
        try {
            std::size_t idx = 0;
            const int x = std::stoi(*v, &idx);
            if (idx == v->size()) return x;
        } catch (const std::exception&) {
        }
        fail(section, key, "expected an integer, got '" + *v + "'");
        return fallback;
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) {
        mark_consumed(section, key);
        const auto* v = find(section, key);
        if (!v) return fallback;
        const std::string w = lower(*v);
        if (w == "true" || w == "1" || w == "yes" || w == "on") return true;
        if (w == "false" || w == "0" || w == "no" || w == "off") return false;
        fail(section, key, "expected a boolean, got '" + *v + "'");
        return fallback;
    }

    std::vector<double> get_double_list(const std::string& section, const std::string& key) {
        mark_consumed(section, key);
        const auto* v = find(section, key);
        std::vector<double> out;
        if (!v) return out;
        std::string item;
        std::istringstream stream(*v);
        while (std::getline(stream, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            try {
                std::size_t idx = 0;
                const double x = std::stod(t, &idx);
                if (idx == t.size()) {
                    out.push_back(x);
                    continue;
                }
            } catch (const std::exception&) {
            }
            fail(section, key, "expected a comma-separated number list, got '" + t + "'");
            return {};
        }
        return out;
    }

    void fail(const std::string& section, const std::string& key, const std::string& why) {
        errors_.push_back(section + "." + key + ": " + why);
    }

    /// After all known keys were consumed: everything left is unknown.
    void reject_unknown() {
        for (const auto& [section, entries] : raw_.sections) {
            const auto cs = consumed_.find(section);
            if (cs == consumed_.end()) {
                errors_.push_back("[" + section + "]: unknown section");
                continue;
            }
            for (const auto& [key, value] : entries) {
                (void)value;
                if (!cs->second.count(key)) {
                    errors_.push_back(section + "." + key + ": unknown key (strict mode)");
                }
            }
        }
    }

  private:
    const std::string* find(const std::string& section, const std::string& key) const {
        const auto s = raw_.sections.find(section);
        if (s == raw_.sections.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    void mark_consumed(const std::string& section, const std::string& key) {
        consumed_[section].insert(key);
    }

    RawConfig raw_;
    std::vector<std::string>& errors_;
    std::map<std::string, std::set<std::string>> consumed_;
};

std::string join_errors(const std::vector<std::string>& errors) {
    std::ostringstream out;
    out << "configuration invalid (" << errors.size()
        << (errors.size() == 1 ? " problem):" : " problems):");
    for (const auto& e : errors) out << "\n  - " << e;
    return out.str();
}

std::vector<std::pair<double, double>> load_two_columns(const std::string& path,
                                                        const char* who) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(std::string(who) + ": cannot open table file " + path);
    }
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream ls(t);
        double x, y;
        if (!(ls >> x >> y)) {
            throw std::runtime_error(std::string(who) + ": malformed row '" + line + "' in " +
                                     path);
        }
        rows.emplace_back(x, y);
    }
    if (rows.size() < 2) {
        throw std::runtime_error(std::string(who) + ": table " + path +
                                 " has fewer than 2 rows");
    }
    return rows;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::vector<std::string> errors;
    Reader r(tokenize(text, origin), errors);
    RunConfig cfg;

    // [constants]
    cfg.constants.hbar = r.get_double("constants", "hbar", cfg.constants.hbar);
    cfg.constants.mass = r.get_double("constants", "mass", cfg.constants.mass);
    cfg.constants.boltzmann = r.get_double("constants", "boltzmann", cfg.constants.boltzmann);
    cfg.constants.light_speed =
        r.get_double("constants", "light_speed", cfg.constants.light_speed);
    if (cfg.constants.hbar < 0.0) r.fail("constants", "hbar", "must be non-negative");
    if (!(cfg.constants.mass > 0.0)) r.fail("constants", "mass", "must be positive");
    if (!(cfg.constants.boltzmann > 0.0)) r.fail("constants", "boltzmann", "must be positive");
    if (!(cfg.constants.light_speed > 0.0)) {
        r.fail("constants", "light_speed", "must be positive");
    }

    // [grid]
    cfg.grid_q_min = r.get_double("grid", "q_min", cfg.grid_q_min);
    cfg.grid_q_max = r.get_double("grid", "q_max", cfg.grid_q_max);
    cfg.grid_n_cells = r.get_size("grid", "n_cells", cfg.grid_n_cells);
    {
        const std::string b = lower(r.get_string("grid", "boundary", "periodic"));
        if (b == "periodic") cfg.grid_boundary = Boundary::periodic;
        else if (b == "clamped") cfg.grid_boundary = Boundary::clamped;
        else r.fail("grid", "boundary", "expected 'periodic' or 'clamped', got '" + b + "'");
    }
    if (!std::isfinite(cfg.grid_q_min) || !std::isfinite(cfg.grid_q_max) ||
        !(cfg.grid_q_max > cfg.grid_q_min)) {
        r.fail("grid", "q_max", "domain must be finite with q_max > q_min");
    }
    if (cfg.grid_n_cells < 8) r.fail("grid", "n_cells", "need at least 8 cells");

    // [profile]
    {
        const std::string k = lower(r.get_string("profile", "kind", "gaussian"));
        if (k == "gaussian") cfg.profile.kind = ProfileSpec::Kind::gaussian;
        else if (k == "stretched_exp") cfg.profile.kind = ProfileSpec::Kind::stretched_exp;
        else if (k == "harmonic_ground") cfg.profile.kind = ProfileSpec::Kind::harmonic_ground;
        else if (k == "table") cfg.profile.kind = ProfileSpec::Kind::table;
        else {
            r.fail("profile", "kind",
                   "expected gaussian | stretched_exp | harmonic_ground | table, got '" + k +
                       "'");
        }
    }
    cfg.profile.sigma = r.get_double("profile", "sigma", cfg.profile.sigma);
    cfg.profile.q0 = r.get_double("profile", "q0", cfg.profile.q0);
    cfg.profile.h = r.get_double("profile", "h", cfg.profile.h);
    cfg.profile.scale = r.get_double("profile", "scale", cfg.profile.scale);
    cfg.profile.omega = r.get_double("profile", "omega", cfg.profile.omega);
    cfg.profile.table_path = r.get_string("profile", "table", cfg.profile.table_path);
    if (!(cfg.profile.sigma > 0.0)) r.fail("profile", "sigma", "must be positive");
    if (!(cfg.profile.h > 0.0)) r.fail("profile", "h", "must be positive");
    if (!(cfg.profile.scale > 0.0)) r.fail("profile", "scale", "must be positive");
    if (!(cfg.profile.omega > 0.0)) r.fail("profile", "omega", "must be positive");
    if (cfg.profile.kind == ProfileSpec::Kind::table && cfg.profile.table_path.empty()) {
        r.fail("profile", "table", "table profile needs a file path");
    }

    // [potential]
    {
        const std::string k = lower(r.get_string("potential", "kind", "none"));
        if (k == "none") cfg.potential_kind = PotentialKind::none;
        else if (k == "harmonic") cfg.potential_kind = PotentialKind::harmonic;
        else if (k == "table") cfg.potential_kind = PotentialKind::table;
        else r.fail("potential", "kind", "expected none | harmonic | table, got '" + k + "'");
    }
    cfg.potential_omega = r.get_double("potential", "omega", cfg.potential_omega);
    cfg.potential_table = r.get_string("potential", "table", cfg.potential_table);
    if (!(cfg.potential_omega > 0.0)) r.fail("potential", "omega", "must be positive");
    if (cfg.potential_kind == PotentialKind::table && cfg.potential_table.empty()) {
        r.fail("potential", "table", "table potential needs a file path");
    }

    // [noise]
    cfg.theta = r.get_double("noise", "theta", cfg.theta);
    cfg.delta_l = r.get_double("noise", "delta_l", cfg.delta_l);
    cfg.kernel_spec = r.get_string("noise", "kernel", cfg.kernel_spec);
    if (cfg.theta < 0.0) r.fail("noise", "theta", "must be non-negative");
    if (cfg.theta > 0.0 && cfg.constants.hbar == 0.0) {
        r.fail("noise", "theta",
               "theta > 0 with hbar = 0 has no representable correlation length");
    }
    if (!(cfg.delta_l > 0.0)) r.fail("noise", "delta_l", "must be positive");
    {
        const std::string k = cfg.kernel_spec;
        const bool ok = k == "gaussian" ||
                        (k.rfind("table:", 0) == 0 && k.size() > std::string("table:").size());
        if (!ok) r.fail("noise", "kernel", "expected 'gaussian' or 'table:<path>', got '" + k + "'");
    }

    // [evolve]
    cfg.dt = r.get_double("evolve", "dt", cfg.dt);
    cfg.n_steps = r.get_size("evolve", "n_steps", cfg.n_steps);
    cfg.c_cfl = r.get_double("evolve", "c_cfl", cfg.c_cfl);
    {
        const std::string p = lower(r.get_string("evolve", "positivity", "clip_renormalize"));
        if (p == "clip_only") cfg.positivity = Positivity::clip_only;
        else if (p == "clip_renormalize") cfg.positivity = Positivity::clip_renormalize;
        else {
            r.fail("evolve", "positivity",
                   "expected 'clip_only' or 'clip_renormalize', got '" + p + "'");
        }
    }
    cfg.reanchor_interval = r.get_size("evolve", "reanchor_interval", cfg.reanchor_interval);
    cfg.classical_companion =
        r.get_bool("evolve", "classical_companion", cfg.classical_companion);
    cfg.mask_abort_fraction =
        r.get_double("evolve", "mask_abort_fraction", cfg.mask_abort_fraction);
    cfg.snapshot_stride = r.get_size("evolve", "snapshot_stride", cfg.snapshot_stride);
    if (!(cfg.dt > 0.0)) r.fail("evolve", "dt", "must be positive");
    if (cfg.n_steps < 1) r.fail("evolve", "n_steps", "must be at least 1");
    if (!(cfg.c_cfl > 0.0)) r.fail("evolve", "c_cfl", "must be positive");
    if (!(cfg.mask_abort_fraction > 0.0 && cfg.mask_abort_fraction <= 1.0)) {
        r.fail("evolve", "mask_abort_fraction", "must lie in (0, 1]");
    }

    // [ensemble]
    cfg.n_realizations = r.get_size("ensemble", "n_realizations", cfg.n_realizations);
    cfg.base_seed = static_cast<std::uint64_t>(
        r.get_size("ensemble", "base_seed", static_cast<std::size_t>(cfg.base_seed)));
    cfg.window_lo = r.get_double("ensemble", "window_lo", cfg.window_lo);
    cfg.window_hi = r.get_double("ensemble", "window_hi", cfg.window_hi);
    if (cfg.n_realizations < 2) r.fail("ensemble", "n_realizations", "need at least 2");
    if (cfg.window_lo < 0.0) r.fail("ensemble", "window_lo", "must be non-negative");
    if (!(cfg.window_hi > cfg.window_lo)) {
        r.fail("ensemble", "window_hi", "must exceed window_lo");
    }

    // [scan]
    cfg.scan_thetas = r.get_double_list("scan", "thetas");
    cfg.scan_synthetic = r.get_bool("scan", "synthetic", cfg.scan_synthetic);
    for (const double t : cfg.scan_thetas) {
        if (!(t > 0.0)) {
            r.fail("scan", "thetas", "every theta in the sweep must be positive");
            break;
        }
    }

    // [analyze]
    cfg.tail_window_lo = r.get_double("analyze", "tail_window_lo", cfg.tail_window_lo);
    cfg.tail_window_hi = r.get_double("analyze", "tail_window_hi", cfg.tail_window_hi);
    cfg.integral_q_min = r.get_double("analyze", "q_min", cfg.integral_q_min);
    cfg.analyze_lambda_c = r.get_double("analyze", "lambda_c", cfg.analyze_lambda_c);
    cfg.delta_omega_q = r.get_double("analyze", "delta_omega_q", cfg.delta_omega_q);
    cfg.delta_omega_c = r.get_double("analyze", "delta_omega_c", cfg.delta_omega_c);
    cfg.analyze_m_exp = r.get_double("analyze", "m_exp", cfg.analyze_m_exp);
    cfg.analyze_p_deg = r.get_int("analyze", "p_deg", cfg.analyze_p_deg);
    cfg.thresholds.macroscopic_ratio =
        r.get_double("analyze", "macroscopic_ratio", cfg.thresholds.macroscopic_ratio);
    cfg.thresholds.local_ratio =
        r.get_double("analyze", "local_ratio", cfg.thresholds.local_ratio);
    if (!(cfg.integral_q_min > 0.0)) r.fail("analyze", "q_min", "must be positive");
    if (cfg.analyze_lambda_c < 0.0) r.fail("analyze", "lambda_c", "must be non-negative");
    if (!(cfg.delta_omega_q > 0.0)) r.fail("analyze", "delta_omega_q", "must be positive");
    if (!(cfg.delta_omega_c > 0.0)) r.fail("analyze", "delta_omega_c", "must be positive");
    if (cfg.delta_omega_q > cfg.delta_omega_c) {
        r.fail("analyze", "delta_omega_q", "must not exceed delta_omega_c (system size)");
    }
    if (cfg.analyze_p_deg < 0) r.fail("analyze", "p_deg", "must be non-negative");
    if (!(cfg.thresholds.macroscopic_ratio > 0.0)) {
        r.fail("analyze", "macroscopic_ratio", "must be positive");
    }
    if (!(cfg.thresholds.local_ratio > 0.0)) r.fail("analyze", "local_ratio", "must be positive");

    // [output]
    cfg.output_dir = r.get_string("output", "directory", cfg.output_dir);
    cfg.emit_timestamp = r.get_bool("output", "timestamp", cfg.emit_timestamp);
    if (cfg.output_dir.empty()) r.fail("output", "directory", "must not be empty");

    r.reject_unknown();
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::vector<std::pair<double, double>> load_kernel_table(const std::string& path) {
    return load_two_columns(path, "load_kernel_table");
}

Grid1D RunConfig::make_run_grid() const {
    return make_grid(grid_q_min, grid_q_max, grid_n_cells, grid_boundary);
}

std::vector<double> RunConfig::make_run_potential(const Grid1D& grid) const {
    switch (potential_kind) {
        case PotentialKind::none:
            return zero_potential(grid);
        case PotentialKind::harmonic:
            return harmonic_potential(grid, constants, potential_omega);
        case PotentialKind::table: {
            const auto rows = load_two_columns(potential_table, "potential table");
            std::vector<double> v(grid.n_cells);
            for (std::size_t i = 0; i < grid.n_cells; ++i) {
                const double q = grid.q(i);
                // Linear interpolation, clamped to the outermost table rows.
                if (q <= rows.front().first) {
                    v[i] = rows.front().second;
                } else if (q >= rows.back().first) {
                    v[i] = rows.back().second;
                } else {
                    auto hi = std::lower_bound(
                        rows.begin(), rows.end(), std::make_pair(q, 0.0),
                        [](const auto& a, const auto& b) { return a.first < b.first; });
                    auto lo = hi - 1;
                    const double w = (q - lo->first) / (hi->first - lo->first);
                    v[i] = (1.0 - w) * lo->second + w * hi->second;
                }
            }
            return v;
        }
    }
    throw std::logic_error("make_run_potential: unhandled potential kind");
}

CorrelationKernel RunConfig::make_kernel() const {
    if (kernel_spec == "gaussian") return gaussian_kernel();
    const std::string prefix = "table:";
    if (kernel_spec.rfind(prefix, 0) == 0) {
        return table_kernel(load_kernel_table(kernel_spec.substr(prefix.size())));
    }
    throw std::invalid_argument("make_kernel: unsupported kernel spec '" + kernel_spec + "'");
}

SqhaConfig RunConfig::make_sqha_config() const {
    SqhaConfig sc;
    sc.theta = theta;
    sc.delta_l = delta_l;
    sc.positivity = positivity;
    sc.reanchor_interval = reanchor_interval;
    sc.classical_companion = classical_companion;
    sc.kernel = make_kernel();
    sc.madelung.c_cfl = c_cfl;
    sc.madelung.mask_abort_fraction = mask_abort_fraction;
    return sc;
}

EnsembleConfig RunConfig::make_ensemble_config(Exec exec) const {
    EnsembleConfig ec;
    ec.n_realizations = n_realizations;
    ec.n_steps = n_steps;
    ec.base_seed = base_seed;
    ec.window.abs_min = window_lo;
    ec.window.abs_max = window_hi;
    ec.exec = exec;
    return ec;
}

NonlocalityParams RunConfig::make_nonlocality_params(const PhysicalConstants& c) const {
    NonlocalityParams p;
    p.tail_window_lo = tail_window_lo;
    p.tail_window_hi = tail_window_hi;
    p.integral_q_min = integral_q_min;
    if (analyze_lambda_c > 0.0) {
        p.lambda_c = analyze_lambda_c;
    } else if (theta > 0.0) {
        p.lambda_c = make_noise_model(c, theta, delta_l).lambda_c;
    } else {
        p.lambda_c = 1.0;
    }
    p.delta_omega_q = delta_omega_q;
    p.delta_omega_c = delta_omega_c;
    p.theta = theta;
    p.hbar = c.hbar;
    p.m_exp = analyze_m_exp;
    p.p_deg = analyze_p_deg;
    p.thresholds = thresholds;
    return p;
}

}  // namespace sqha
