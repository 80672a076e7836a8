#include "sqha/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sqha {

ProfileSpec ProfileSpec::gaussian_profile(double sigma, double q0) {
    ProfileSpec s;
    s.kind = Kind::gaussian;
    s.sigma = sigma;
    s.q0 = q0;
    return s;
}

ProfileSpec ProfileSpec::stretched_exp_profile(double h, double scale) {
    ProfileSpec s;
    s.kind = Kind::stretched_exp;
    s.h = h;
    s.scale = scale;
    return s;
}

ProfileSpec ProfileSpec::harmonic_ground_profile(double omega) {
    ProfileSpec s;
    s.kind = Kind::harmonic_ground;
    s.omega = omega;
    return s;
}

ProfileSpec ProfileSpec::table_profile(std::vector<std::pair<double, double>> rows) {
    ProfileSpec s;
    s.kind = Kind::table;
    s.table = std::move(rows);
    return s;
}

namespace {

std::vector<std::pair<double, double>> load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("init_profile: cannot open table " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double q, v;
        if (ls >> q >> v) rows.emplace_back(q, v);
    }
    if (rows.size() < 2) throw std::runtime_error("init_profile: table " + path + " has fewer than 2 rows");
    return rows;
}

double interpolate(const std::vector<std::pair<double, double>>& rows, double q) {
    if (q <= rows.front().first) return rows.front().second;
    if (q >= rows.back().first) return rows.back().second;
    auto it = std::lower_bound(rows.begin(), rows.end(), q,
                               [](const auto& r, double x) { return r.first < x; });
    const auto [q1, v1] = *it;
    const auto [q0, v0] = *(it - 1);
    const double t = (q - q0) / (q1 - q0);
    return v0 + t * (v1 - v0);
}

} // namespace

WFMField init_profile(const Grid1D& grid, const ProfileSpec& spec,
                      const PhysicalConstants& constants) {
    WFMField f;
    f.n.resize(grid.n_cells);
    f.S.assign(grid.n_cells, 0.0);

    switch (spec.kind) {
    case ProfileSpec::Kind::gaussian: {
        if (!(spec.sigma > 0.0)) throw std::invalid_argument("init_profile: sigma must be positive");
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            const double x = (grid.q(i) - spec.q0) / spec.sigma;
            f.n[i] = std::exp(-0.5 * x * x);
        }
        break;
    }
    case ProfileSpec::Kind::stretched_exp: {
        if (!(spec.h > 0.0) || !(spec.scale > 0.0))
            throw std::invalid_argument("init_profile: stretched_exp needs h > 0 and scale > 0");
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            const double x = std::abs(grid.q(i) / spec.scale);
            // sqrt(n) ~ exp(-x^h), so n ~ exp(-2 x^h).
            f.n[i] = std::exp(-2.0 * std::pow(x, spec.h));
        }
        break;
    }
    case ProfileSpec::Kind::harmonic_ground: {
        if (!(spec.omega > 0.0)) throw std::invalid_argument("init_profile: omega must be positive");
        const double a = constants.mass * spec.omega / constants.hbar;
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            const double q = grid.q(i);
            f.n[i] = std::exp(-a * q * q);
        }
        break;
    }
    case ProfileSpec::Kind::table: {
        const auto rows = spec.table_path.empty() ? spec.table : load_table(spec.table_path);
        if (rows.size() < 2) throw std::invalid_argument("init_profile: table needs at least 2 rows");
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            const double v = interpolate(rows, grid.q(i));
            if (v < 0.0) throw std::invalid_argument("init_profile: table density must be non-negative");
            f.n[i] = v;
        }
        break;
    }
    }
    normalize_density(f.n, grid);
    return f;
}

void normalize_density(std::vector<double>& n, const Grid1D& grid) {
    const double mass = integrate(n, grid);
    if (!(mass > 0.0)) throw std::runtime_error("normalize_density: non-positive mass");
    const double inv = 1.0 / mass;
    for (double& v : n) v *= inv;
}

double integrate(const std::vector<double>& f, const Grid1D& grid) {
    // Cell-centered uniform grid: the trapezoid rule and the Riemann sum
    // coincide on periodic data; keep the plain sum for both boundary kinds.
    double acc = 0.0;
    for (double v : f) acc += v;
    return acc * grid.spacing();
}

FieldDistance field_distance(const WFMField& a, const WFMField& b, const Grid1D& grid) {
    if (a.n.size() != b.n.size() || a.n.size() != grid.n_cells)
        throw std::invalid_argument("field_distance: size mismatch");
    FieldDistance d;
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double dn = a.n[i] - b.n[i];
        acc += dn * dn;
        d.linf = std::max(d.linf, std::abs(dn));
    }
    d.l2 = std::sqrt(acc * grid.spacing());
    return d;
}

std::vector<double> zero_potential(const Grid1D& grid) {
    return std::vector<double>(grid.n_cells, 0.0);
}

std::vector<double> harmonic_potential(const Grid1D& grid, const PhysicalConstants& constants,
                                       double omega) {
    std::vector<double> V(grid.n_cells);
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double q = grid.q(i);
        V[i] = 0.5 * constants.mass * omega * omega * q * q;
    }
    return V;
}

} // namespace sqha
