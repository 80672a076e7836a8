#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sqha/constants.hpp"
#include "sqha/grid.hpp"

namespace sqha {

/// Hydrodynamic representation of a wave function: density n = |psi|^2 and
/// action S with psi = sqrt(n) * exp(i S / hbar).  Both sampled at cell
/// centers.  S is defined up to a global additive constant.
struct WFMField {
    std::vector<double> n;
    std::vector<double> S;
};

/// Initial-profile selector.  All profiles are emitted with unit mass
/// (trapezoid quadrature, which on a uniform periodic grid is the plain
/// Riemann sum) and S = 0 unless noted.
struct ProfileSpec {
    enum class Kind { gaussian, stretched_exp, harmonic_ground, table };
    Kind kind = Kind::gaussian;

    // gaussian: n ~ exp(-(q - q0)^2 / (2 sigma^2)); sigma is the density std.
    double sigma = 1.0;
    double q0 = 0.0;

    // stretched_exp: sqrt(n) ~ exp(-|q / scale|^h).
    double h = 1.0;
    double scale = 1.0;

    // harmonic_ground: n = sqrt(m omega / (pi hbar)) exp(-m omega q^2 / hbar).
    double omega = 1.0;

    // table: two-column CSV (q, n), linearly interpolated onto the grid.
    std::string table_path;
    // Alternatively an in-memory table; used when table_path is empty.
    std::vector<std::pair<double, double>> table;

    static ProfileSpec gaussian_profile(double sigma, double q0 = 0.0);
    static ProfileSpec stretched_exp_profile(double h, double scale = 1.0);
    static ProfileSpec harmonic_ground_profile(double omega = 1.0);
    static ProfileSpec table_profile(std::vector<std::pair<double, double>> rows);
};

WFMField init_profile(const Grid1D& grid, const ProfileSpec& spec,
                      const PhysicalConstants& constants);

/// Rescale n in place to unit mass.  Throws if the mass is not positive.
void normalize_density(std::vector<double>& n, const Grid1D& grid);

/// Trapezoid quadrature of a cell-centered field over the grid.
double integrate(const std::vector<double>& f, const Grid1D& grid);

struct FieldDistance {
    double l2 = 0.0;
    double linf = 0.0;
};

/// Density distance between two states on the same grid:
/// l2 = sqrt(sum (dn)^2 * spacing), linf = max |dn|.
FieldDistance field_distance(const WFMField& a, const WFMField& b, const Grid1D& grid);

std::vector<double> zero_potential(const Grid1D& grid);
std::vector<double> harmonic_potential(const Grid1D& grid, const PhysicalConstants& constants,
                                       double omega);

} // namespace sqha
