#pragma once

#include "sqha/constants.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/madelung.hpp"
#include "sqha/noise.hpp"
#include "sqha/quantum_potential.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace sqha {

/// What to do with cells driven negative by a noise increment.
/// `clip_only` zeroes them and accepts the (tiny) mass gain; it leaves the
/// surviving cells untouched, which keeps spatially local statistics clean.
/// `clip_renormalize` additionally rescales the density to the anchored
/// mass, trading a uniform multiplicative bias for exact mass conservation.
enum class Positivity { clip_only, clip_renormalize };

struct SqhaConfig {
    double theta = 0.0;
    double delta_l = 1.0;
    Positivity positivity = Positivity::clip_renormalize;
    /// Re-adopt the fluctuating realization as the deterministic reference
    /// every this many steps; 0 disables re-anchoring.
    std::size_t reanchor_interval = 0;
    /// Evolve the reference without the quantum potential (pressureless
    /// classical hydrodynamics) instead of the full Madelung dynamics.
    bool classical_companion = false;
    CorrelationKernel kernel = gaussian_kernel();
    MadelungOptions madelung;
};

/// One stochastic realization paired with its deterministic reference.
/// The excess quantum potential and all fluctuation statistics are measured
/// against `companion`, which is advanced by the same integrator without the
/// noise increments.  With theta = 0 the two evolve bit-identically.
struct SQHAState {
    WFMField field;
    WFMField companion;
    std::size_t step_count = 0;
    double anchor_mass = 0.0;
    double last_clip_fraction = 0.0;
};

/// Classical-evolution variant: the density is transported by the classical
/// action `field.S` alone, while the quantum action the full dynamics would
/// have accumulated is integrated separately into `s_qu` as a passive
/// diagnostic.  Comparing `field.S + s_qu` against the full solver's phase
/// measures how strongly the quantum potential feeds back on the transport.
struct ClassicalState {
    WFMField field;
    std::vector<double> s_qu;
    double anchor_mass = 0.0;
    double last_clip_fraction = 0.0;
};

/// Advances fluctuating hydrodynamic states: a deterministic transport step
/// (RK4 Madelung) followed by an additive density increment with spatial
/// covariance g0 G(d / lambda_c) dt.  Holds the spectral noise sampler, so
/// one instance must not be shared across threads; create one per thread.
class SqhaSolver {
  public:
    SqhaSolver(const Grid1D& grid, std::vector<double> potential,
               const PhysicalConstants& constants, const SqhaConfig& config, double dt);

    SQHAState make_state(const WFMField& init) const;
    ClassicalState make_classical_state(const WFMField& init) const;

    void step(SQHAState& state, std::mt19937_64& rng);
    void classical_step(ClassicalState& state, std::mt19937_64& rng);

    /// Excess quantum potential of the realization over its reference,
    /// I*(q) = v_qu[n](q) - v_qu[companion](q), with the low-density masks
    /// of the two evaluations merged.
    QPField istar(const SQHAState& state) const;

    /// Adopt the current realization as the new deterministic reference.
    void reanchor(SQHAState& state) const;

    const NoiseModel& noise_model() const { return model_; }
    const Grid1D& grid() const { return grid_; }
    const std::vector<double>& potential() const { return potential_; }
    const PhysicalConstants& constants() const { return constants_; }
    const SqhaConfig& config() const { return config_; }
    double dt() const { return dt_; }

  private:
    /// Adds one sampled increment to f.n, applies the positivity policy, and
    /// reports the fraction of cells clipped.
    double apply_noise(WFMField& f, double anchor_mass, std::mt19937_64& rng);

    Grid1D grid_;
    std::vector<double> potential_;
    PhysicalConstants constants_;
    SqhaConfig config_;
    double dt_;
    NoiseModel model_;
    NoiseSampler sampler_;
    std::vector<double> increment_;
};

}  // namespace sqha
