#include "sqha/ensemble.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <memory>
#include <stdexcept>

namespace sqha {

namespace {

struct RealizationOutput {
    RealizationSummary summary;
    std::vector<double> final_n;
    WFMField companion;
};

void run_one(SqhaSolver& solver, const WFMField& init, const EnsembleConfig& ens,
             std::uint64_t seed, RealizationOutput& out) {
    const Grid1D& grid = solver.grid();
    const PhysicalConstants& constants = solver.constants();
    std::mt19937_64 rng(seed);

    SQHAState st = solver.make_state(init);
    const double init_mass = st.anchor_mass;

    // time-integral of the excess quantum force, the stochastic momentum proxy
    std::vector<double> dp_st(grid.n_cells, 0.0);
    double clip_acc = 0.0;
    for (std::size_t k = 0; k < ens.n_steps; ++k) {
        solver.step(st, rng);
        clip_acc += st.last_clip_fraction;
        const std::vector<double> force = quantum_force(solver.istar(st), grid);
        for (std::size_t i = 0; i < grid.n_cells; ++i)
            dp_st[i] += solver.dt() * force[i];
    }
    out.summary.mean_clip_fraction = clip_acc / static_cast<double>(ens.n_steps);
    out.summary.mass_drift = (integrate(st.field.n, grid) - init_mass) / init_mass;

    const QPField ist = solver.istar(st);
    const double inv_2l = 1.0 / (2.0 * grid.spacing());
    double istar_ss = 0.0;
    double grad_ss = 0.0;
    std::size_t n_istar = 0;
    std::size_t n_grad = 0;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.n_cells); ++i) {
        const std::size_t ic = static_cast<std::size_t>(i);
        if (!ens.window.contains(grid.q(ic))) continue;
        if (ist.masked[ic]) continue;
        istar_ss += ist.v_qu[ic] * ist.v_qu[ic];
        ++n_istar;
        const std::size_t ip = grid.neighbor(i + 1);
        const std::size_t im = grid.neighbor(i - 1);
        if (ist.masked[ip] || ist.masked[im]) continue;
        const double hi = ist.v_qu[ip] * st.companion.n[ip];
        const double lo = ist.v_qu[im] * st.companion.n[im];
        const double g = (hi - lo) * inv_2l;
        grad_ss += g * g;
        ++n_grad;
    }
    if (n_istar == 0)
        throw std::runtime_error("run_ensemble: observation window contains no usable cells");
    out.summary.istar_ms_window = istar_ss / static_cast<double>(n_istar);
    out.summary.compensated_grad_ms_window =
        n_grad > 0 ? grad_ss / static_cast<double>(n_grad) : 0.0;

    std::vector<double> v0(grid.n_cells);
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.n_cells); ++i) {
        v0[static_cast<std::size_t>(i)] =
            (st.companion.S[grid.neighbor(i + 1)] - st.companion.S[grid.neighbor(i - 1)]) *
            inv_2l / constants.mass;
    }
    out.summary.wave_particle_residual = wave_particle_residual(st.field, grid, constants, v0);

    double dp_num = 0.0, dp_den = 0.0;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        dp_num += st.field.n[i] * dp_st[i] * dp_st[i];
        dp_den += st.field.n[i];
    }
    out.summary.delta_p_st = dp_den > 0.0 ? std::sqrt(dp_num / dp_den) : 0.0;

    out.final_n = st.field.n;
    out.companion = st.companion;
}

}  // namespace

EnsembleResult run_ensemble(const Grid1D& grid, const std::vector<double>& potential,
                            const PhysicalConstants& constants, const SqhaConfig& config,
                            double dt, const WFMField& init, const EnsembleConfig& ens) {
    if (ens.n_realizations < 2)
        throw std::invalid_argument("run_ensemble: need at least 2 realizations");
    if (ens.n_steps < 1)
        throw std::invalid_argument("run_ensemble: need at least 1 step");

    const auto count = static_cast<std::ptrdiff_t>(ens.n_realizations);
    std::vector<RealizationOutput> outputs(ens.n_realizations);

    if (ens.exec == Exec::openmp) {
#ifdef _OPENMP
        const int n_threads = omp_get_max_threads();
#else
        const int n_threads = 1;
#endif
        // FFT plan creation is not thread-safe: build every per-thread solver
        // up front, then hand realizations out with a static schedule.
        std::vector<std::unique_ptr<SqhaSolver>> solvers;
        solvers.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t)
            solvers.push_back(
                std::make_unique<SqhaSolver>(grid, potential, constants, config, dt));
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < count; ++r) {
#ifdef _OPENMP
            SqhaSolver& solver = *solvers[static_cast<std::size_t>(omp_get_thread_num())];
#else
            SqhaSolver& solver = *solvers[0];
#endif
            run_one(solver, init, ens, ens.base_seed + static_cast<std::uint64_t>(r),
                    outputs[static_cast<std::size_t>(r)]);
        }
    } else {
        SqhaSolver solver(grid, potential, constants, config, dt);
        for (std::ptrdiff_t r = 0; r < count; ++r)
            run_one(solver, init, ens, ens.base_seed + static_cast<std::uint64_t>(r),
                    outputs[static_cast<std::size_t>(r)]);
    }

    EnsembleResult res;
    res.realizations.reserve(ens.n_realizations);
    for (const auto& o : outputs) res.realizations.push_back(o.summary);
    res.companion_final = outputs.front().companion;

    const double r_count = static_cast<double>(ens.n_realizations);
    double istar_mean = 0.0, grad_mean = 0.0, drift_mean = 0.0, dp_mean = 0.0;
    for (const auto& s : res.realizations) {
        istar_mean += s.istar_ms_window;
        grad_mean += s.compensated_grad_ms_window;
        drift_mean += s.mass_drift;
        dp_mean += s.delta_p_st;
        res.max_clip_fraction = std::max(res.max_clip_fraction, s.mean_clip_fraction);
    }
    istar_mean /= r_count;
    grad_mean /= r_count;
    res.istar_variance = istar_mean;
    res.compensated_grad_variance = grad_mean;
    res.mean_mass_drift = drift_mean / r_count;
    res.mean_delta_p_st = dp_mean / r_count;

    double istar_ss = 0.0, grad_ss = 0.0;
    for (const auto& s : res.realizations) {
        istar_ss += (s.istar_ms_window - istar_mean) * (s.istar_ms_window - istar_mean);
        grad_ss += (s.compensated_grad_ms_window - grad_mean) *
                   (s.compensated_grad_ms_window - grad_mean);
    }
    res.istar_variance_se = std::sqrt(istar_ss / (r_count - 1.0) / r_count);
    res.compensated_grad_variance_se = std::sqrt(grad_ss / (r_count - 1.0) / r_count);

    std::size_t n_window = 0;
    for (std::size_t i = 0; i < grid.n_cells; ++i)
        if (ens.window.contains(grid.q(i))) ++n_window;
    res.window_cell_count = n_window;

    res.density_variance.assign(grid.n_cells, 0.0);
    std::vector<double> mean_n(grid.n_cells, 0.0);
    for (const auto& o : outputs)
        for (std::size_t i = 0; i < grid.n_cells; ++i) mean_n[i] += o.final_n[i];
    for (double& v : mean_n) v /= r_count;
    for (const auto& o : outputs)
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            const double d = o.final_n[i] - mean_n[i];
            res.density_variance[i] += d * d;
        }
    for (double& v : res.density_variance) v /= (r_count - 1.0);
    return res;
}

}  // namespace sqha
