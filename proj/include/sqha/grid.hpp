#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sqha {

enum class Boundary { periodic, clamped };

/// Uniform 1D grid of cell centers: q_i = q_min + (i + 1/2) * spacing,
/// spacing = (q_max - q_min) / n_cells.  Periodic grids wrap index
/// arithmetic; clamped grids replicate the edge cell in stencils.
struct Grid1D {
    double q_min = 0.0;
    double q_max = 1.0;
    std::size_t n_cells = 0;
    Boundary boundary = Boundary::periodic;

    double spacing() const { return (q_max - q_min) / static_cast<double>(n_cells); }
    double length() const { return q_max - q_min; }
    double q(std::size_t i) const {
        return q_min + (static_cast<double>(i) + 0.5) * spacing();
    }
    std::vector<double> coordinates() const;

    /// Index of the cell whose center is nearest to q (clamped to range).
    std::size_t nearest_cell(double q) const;

    /// Wrap (periodic) or clamp (clamped) a possibly out-of-range index.
    std::size_t neighbor(std::ptrdiff_t i) const;
};

/// Validating factory.  Throws std::invalid_argument listing every violation:
/// q_max must exceed q_min, bounds must be finite, and n_cells >= 8 (the
/// smallest grid on which the five-point diagnostics stencils fit).
Grid1D make_grid(double q_min, double q_max, std::size_t n_cells,
                 Boundary boundary = Boundary::periodic);

} // namespace sqha
