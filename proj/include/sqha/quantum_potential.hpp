#pragma once

#include <cstdint>
#include <vector>

#include "sqha/constants.hpp"
#include "sqha/exec.hpp"
#include "sqha/grid.hpp"

namespace sqha {

/// Quantum (Madelung) potential field together with its low-density mask.
/// Cells with n below floor_value = density_rel_floor * max(n) cannot support
/// the n^{-1/2} stencil; they are masked and their v_qu is clamped to the
/// value of the nearest unmasked cell.
struct QPField {
    std::vector<double> v_qu;
    std::vector<std::uint8_t> masked;  // 1 = below the density floor
    double floor_value = 0.0;
    std::size_t n_masked = 0;
    /// Rounding noise of a v_qu difference across one stencil width: the
    /// three-point Laplacian cancels to O(eps / spacing^2) relative to
    /// sqrt(n), so force values at or below this are indistinguishable from
    /// zero and quantum_force reports them as exact zeros.  Zero disables
    /// the snap (fields assembled from differences leave it at zero).
    double force_floor = 0.0;
};

struct QPOptions {
    double density_rel_floor = 1e-12;
    Exec exec = Exec::serial;
};

/// v_qu = -(hbar^2 / 2m) * Lap(sqrt(n)) / sqrt(n), with the central 3-point
/// Laplacian.  The curvature form: exact for any smooth density, O(spacing^2)
/// on the grid.  This is the form the solvers use.
QPField qp_sqrt_form(const std::vector<double>& n, const Grid1D& grid,
                     const PhysicalConstants& constants, const QPOptions& opt = {});

/// Same potential through density gradients,
///   v_qu = -(hbar^2 / 2m) [ Lap(n) / (2n) - (grad n)^2 / (4 n^2) ],
/// evaluated with one-sided forward stencils:
///   grad n |_i = (n_{i+1} - n_i) / spacing,
///   Lap  n |_i = (n_{i+2} - 2 n_{i+1} + n_i) / spacing^2.
/// The forward stencils are the ones the fluctuation diagnostics are built
/// on, so this form closes against them; it agrees with qp_sqrt_form to
/// O(spacing) (the one-sided stencils are first-order).
QPField qp_grad_form(const std::vector<double>& n, const Grid1D& grid,
                     const PhysicalConstants& constants, const QPOptions& opt = {});

/// Force -d(v_qu)/dq by central differences.  Masked cells and their stencil
/// neighbors carry zero force (the mask is dilated by one cell so that no
/// force value is contaminated by a clamped v_qu).
std::vector<double> quantum_force(const QPField& qp, const Grid1D& grid);

} // namespace sqha
