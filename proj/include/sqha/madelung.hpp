#pragma once

#include <vector>

#include "sqha/constants.hpp"
#include "sqha/exec.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/quantum_potential.hpp"

namespace sqha {

struct MadelungOptions {
    /// Step-size guard: dt must not exceed c_cfl * mass * spacing^2 / hbar.
    double c_cfl = 0.1;
    double density_rel_floor = 1e-12;
    /// Abort when more than this fraction of cells falls below the density
    /// floor; the quantum potential is no longer meaningful on such a state.
    double mask_abort_fraction = 0.20;
    /// When false, v_qu is dropped from the phase equation and the system
    /// reduces to pressureless classical hydrodynamics.  The hbar-based CFL
    /// bound does not apply in that mode (only the advective guard does).
    bool include_quantum_potential = true;
    Exec exec = Exec::serial;
};

/// One RK4 step of the Madelung system
///   dn/dt = -d/dq ( n * (dS/dq) / m )
///   dS/dt = -[ (dS/dq)^2 / (2m) + V + v_qu(n) ]
/// with v_qu recomputed from qp_sqrt_form at every stage.  The continuity
/// update uses a conservative flux form, so the total mass is conserved to
/// rounding.  Throws on a CFL violation, on an advective Courant violation
/// (max|v| dt > spacing), and when the low-density mask exceeds
/// mask_abort_fraction.
void madelung_step(WFMField& field, const Grid1D& grid, const std::vector<double>& potential,
                   const PhysicalConstants& constants, double dt,
                   const MadelungOptions& opt = {});

/// n-weighted L2 norm of d(V + v_qu)/dq over unmasked cells; zero for an
/// eigenstate of the discrete Hamiltonian, O(spacing^2) for an analytic
/// eigenstate sampled onto the grid.
double stationarity_residual(const WFMField& field, const Grid1D& grid,
                             const std::vector<double>& potential,
                             const PhysicalConstants& constants,
                             double density_rel_floor = 1e-12);

/// n-weighted L2 distance between a supplied velocity field and the
/// hydrodynamic velocity dS/dq / m.
double wave_particle_residual(const WFMField& field, const Grid1D& grid,
                              const PhysicalConstants& constants,
                              const std::vector<double>& velocity);

/// Ground state of the discrete Hamiltonian
///   H = -(hbar^2 / 2m) Lap_3pt + diag(V)
/// computed by shifted inverse iteration.  This is the state that is exactly
/// stationary under madelung_step (V + v_qu is constant on it cell-by-cell),
/// which the analytic ground state sampled onto a finite grid is not.
WFMField fd_ground_state(const Grid1D& grid, const std::vector<double>& potential,
                         const PhysicalConstants& constants);

} // namespace sqha
