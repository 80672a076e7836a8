#include "sqha/sqha.hpp"

#include <cmath>
#include <stdexcept>

namespace sqha {

SqhaSolver::SqhaSolver(const Grid1D& grid, std::vector<double> potential,
                       const PhysicalConstants& constants, const SqhaConfig& config,
                       double dt)
    : grid_(grid),
      potential_(std::move(potential)),
      constants_(constants),
      config_(config),
      dt_(dt),
      model_(make_noise_model(constants, config.theta, config.delta_l)),
      sampler_(grid, model_, config.kernel, dt) {
    if (grid_.boundary != Boundary::periodic)
        throw std::invalid_argument("SqhaSolver: requires a periodic grid");
    if (potential_.size() != grid_.n_cells)
        throw std::invalid_argument("SqhaSolver: potential size mismatch");
    if (!(dt_ > 0.0) || !std::isfinite(dt_))
        throw std::invalid_argument("SqhaSolver: dt must be positive and finite");
}

SQHAState SqhaSolver::make_state(const WFMField& init) const {
    if (init.n.size() != grid_.n_cells || init.S.size() != grid_.n_cells)
        throw std::invalid_argument("SqhaSolver: initial field size mismatch");
    SQHAState st;
    st.field = init;
    st.companion = init;
    st.anchor_mass = integrate(init.n, grid_);
    return st;
}

ClassicalState SqhaSolver::make_classical_state(const WFMField& init) const {
    if (init.n.size() != grid_.n_cells || init.S.size() != grid_.n_cells)
        throw std::invalid_argument("SqhaSolver: initial field size mismatch");
    ClassicalState st;
    st.field = init;
    st.s_qu.assign(grid_.n_cells, 0.0);
    st.anchor_mass = integrate(init.n, grid_);
    return st;
}

double SqhaSolver::apply_noise(WFMField& f, double anchor_mass, std::mt19937_64& rng) {
    if (model_.g0 == 0.0) return 0.0;
    sampler_.sample(rng, increment_);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < grid_.n_cells; ++i) {
        f.n[i] += increment_[i];
        if (f.n[i] < 0.0) {
            f.n[i] = 0.0;
            ++clipped;
        }
    }
    if (config_.positivity == Positivity::clip_renormalize) {
        const double mass = integrate(f.n, grid_);
        if (!(mass > 0.0))
            throw std::runtime_error("SqhaSolver: realization lost all mass after clipping");
        const double scale = anchor_mass / mass;
        for (double& v : f.n) v *= scale;
    }
    return static_cast<double>(clipped) / static_cast<double>(grid_.n_cells);
}

void SqhaSolver::step(SQHAState& state, std::mt19937_64& rng) {
    MadelungOptions companion_opt = config_.madelung;
    companion_opt.include_quantum_potential = !config_.classical_companion;
    madelung_step(state.companion, grid_, potential_, constants_, dt_, companion_opt);
    madelung_step(state.field, grid_, potential_, constants_, dt_, config_.madelung);
    state.last_clip_fraction = apply_noise(state.field, state.anchor_mass, rng);
    ++state.step_count;
    if (config_.reanchor_interval > 0 && state.step_count % config_.reanchor_interval == 0)
        reanchor(state);
}

void SqhaSolver::classical_step(ClassicalState& state, std::mt19937_64& rng) {
    QPOptions qpo;
    qpo.density_rel_floor = config_.madelung.density_rel_floor;
    qpo.exec = config_.madelung.exec;
    const QPField before = qp_sqrt_form(state.field.n, grid_, constants_, qpo);

    MadelungOptions opt = config_.madelung;
    opt.include_quantum_potential = false;
    madelung_step(state.field, grid_, potential_, constants_, dt_, opt);

    // trapezoidal accumulation of the quantum action the transport ignored
    const QPField after = qp_sqrt_form(state.field.n, grid_, constants_, qpo);
    for (std::size_t i = 0; i < grid_.n_cells; ++i)
        state.s_qu[i] -= 0.5 * dt_ * (before.v_qu[i] + after.v_qu[i]);

    state.last_clip_fraction = apply_noise(state.field, state.anchor_mass, rng);
}

QPField SqhaSolver::istar(const SQHAState& state) const {
    QPOptions qpo;
    qpo.density_rel_floor = config_.madelung.density_rel_floor;
    qpo.exec = config_.madelung.exec;
    const QPField vf = qp_sqrt_form(state.field.n, grid_, constants_, qpo);
    const QPField vc = qp_sqrt_form(state.companion.n, grid_, constants_, qpo);

    QPField out;
    out.v_qu.resize(grid_.n_cells);
    out.masked.resize(grid_.n_cells);
    out.floor_value = vf.floor_value;
    out.n_masked = 0;
    for (std::size_t i = 0; i < grid_.n_cells; ++i) {
        out.v_qu[i] = vf.v_qu[i] - vc.v_qu[i];
        out.masked[i] = static_cast<std::uint8_t>(vf.masked[i] || vc.masked[i]);
        if (out.masked[i]) ++out.n_masked;
    }
    return out;
}

void SqhaSolver::reanchor(SQHAState& state) const {
    // Only the density re-anchors; the companion keeps its evolved phase
    // rather than rederiving it from the fluctuating field.
    state.companion.n = state.field.n;
    state.anchor_mass = integrate(state.field.n, grid_);
}

}  // namespace sqha
