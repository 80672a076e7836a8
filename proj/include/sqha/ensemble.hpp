#pragma once

#include "sqha/exec.hpp"
#include "sqha/sqha.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace sqha {

/// Symmetric observation window: selects cells with abs_min <= |q| <= abs_max.
/// Profiles with a structure at the origin (a cusp, say) are analyzed on a
/// window that excludes it.
struct Window {
    double abs_min = 0.0;
    double abs_max = std::numeric_limits<double>::infinity();
    bool contains(double q) const {
        const double a = q < 0.0 ? -q : q;
        return a >= abs_min && a <= abs_max;
    }
};

struct EnsembleConfig {
    std::size_t n_realizations = 100;
    std::size_t n_steps = 1;
    std::uint64_t base_seed = 12345;
    Window window;
    Exec exec = Exec::serial;
};

/// Per-realization summaries, all taken on the final state.
struct RealizationSummary {
    /// Relative mass change of the realization against the initial mass.
    double mass_drift = 0.0;
    /// Clip fraction averaged over the steps of this realization.
    double mean_clip_fraction = 0.0;
    /// Spatial mean square of the excess quantum potential over the window.
    double istar_ms_window = 0.0;
    /// Spatial mean square over the window of d/dq [ I*(q) n0(q) ], the
    /// reference-density-compensated excess potential gradient.
    double compensated_grad_ms_window = 0.0;
    /// Mass-weighted rms deviation of the realization velocity field from
    /// the reference velocity field.
    double wave_particle_residual = 0.0;
    /// Stochastic momentum proxy: mass-weighted rms of the time-integrated
    /// excess quantum force, accumulated over the realization's steps.
    double delta_p_st = 0.0;
};

struct EnsembleResult {
    std::vector<RealizationSummary> realizations;

    /// Ensemble means of the windowed mean squares, with standard errors.
    double istar_variance = 0.0;
    double istar_variance_se = 0.0;
    double compensated_grad_variance = 0.0;
    double compensated_grad_variance_se = 0.0;

    double mean_mass_drift = 0.0;
    double max_clip_fraction = 0.0;
    double mean_delta_p_st = 0.0;

    /// Across-realization variance of the final density, per cell.
    std::vector<double> density_variance;
    /// Final deterministic reference (identical for every realization).
    WFMField companion_final;
    std::size_t window_cell_count = 0;
};

/// Runs n_realizations independent realizations from the same initial field,
/// realization r seeded with base_seed + r, and reduces the summaries in a
/// fixed order.  Results are bit-identical between serial and OpenMP
/// execution and independent of the thread count.
EnsembleResult run_ensemble(const Grid1D& grid, const std::vector<double>& potential,
                            const PhysicalConstants& constants, const SqhaConfig& config,
                            double dt, const WFMField& init, const EnsembleConfig& ens);

}  // namespace sqha
