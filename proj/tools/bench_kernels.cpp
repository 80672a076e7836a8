// Timing harness for the hot kernels: each one runs with the serial
// reference implementation and with the threaded one, on the same inputs,
// and the table reports both times plus the speedup.  The two paths are
// required to agree bit-for-bit, so the harness also checks that.

#include "sqha/ensemble.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/madelung.hpp"
#include "sqha/quantum_potential.hpp"
#include "sqha/sqha.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

namespace {

using clock_type = std::chrono::steady_clock;

double time_best_of(int reps, const std::function<void()>& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        body();
        const double s = std::chrono::duration<double>(clock_type::now() - t0).count();
        if (s < best) best = s;
    }
    return best;
}

void print_row(const char* kernel, std::size_t n_cells, double serial_s, double openmp_s,
               bool identical) {
    std::printf("%-16s %8zu %12.3f %12.3f %8.2fx   %s\n", kernel, n_cells, serial_s * 1e3,
                openmp_s * 1e3, serial_s / openmp_s, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads available: %d\n", omp_get_max_threads());
#else
    std::printf("built without thread support; both columns run serial code\n");
#endif
    std::printf("%-16s %8s %12s %12s %9s\n", "kernel", "cells", "serial ms", "threaded ms",
                "speedup");

    const sqha::PhysicalConstants c{};

    // Quantum potential evaluation.
    for (const std::size_t n_cells : {1024UL, 4096UL, 16384UL}) {
        const sqha::Grid1D grid = sqha::make_grid(-6.4, 6.4, n_cells);
        const sqha::WFMField f =
            sqha::init_profile(grid, sqha::ProfileSpec::gaussian_profile(1.0), c);
        const int iters = static_cast<int>(4u * 1024u * 1024u / n_cells);

        sqha::QPOptions serial_opt, omp_opt;
        serial_opt.exec = sqha::Exec::serial;
        omp_opt.exec = sqha::Exec::openmp;
        sqha::QPField out_serial, out_omp;
        const double t_serial = time_best_of(3, [&] {
            for (int k = 0; k < iters; ++k) out_serial = sqha::qp_sqrt_form(f.n, grid, c, serial_opt);
        });
        const double t_omp = time_best_of(3, [&] {
            for (int k = 0; k < iters; ++k) out_omp = sqha::qp_sqrt_form(f.n, grid, c, omp_opt);
        });
        const bool same = std::memcmp(out_serial.v_qu.data(), out_omp.v_qu.data(),
                                      n_cells * sizeof(double)) == 0;
        print_row("quantum_potential", n_cells, t_serial, t_omp, same);
    }

    // One deterministic transport step.
    for (const std::size_t n_cells : {1024UL, 4096UL, 16384UL}) {
        const sqha::Grid1D grid = sqha::make_grid(-6.4, 6.4, n_cells);
        const std::vector<double> V = sqha::harmonic_potential(grid, c, 1.0);
        const sqha::WFMField init =
            sqha::init_profile(grid, sqha::ProfileSpec::gaussian_profile(1.0), c);
        const double dt =
            0.5 * 0.1 * c.mass * grid.spacing() * grid.spacing() / c.hbar;
        const int iters = static_cast<int>(512u * 1024u / n_cells);

        sqha::MadelungOptions serial_opt, omp_opt;
        serial_opt.exec = sqha::Exec::serial;
        omp_opt.exec = sqha::Exec::openmp;
        sqha::WFMField f_serial, f_omp;
        const double t_serial = time_best_of(3, [&] {
            f_serial = init;
            for (int k = 0; k < iters; ++k)
                sqha::madelung_step(f_serial, grid, V, c, dt, serial_opt);
        });
        const double t_omp = time_best_of(3, [&] {
            f_omp = init;
            for (int k = 0; k < iters; ++k) sqha::madelung_step(f_omp, grid, V, c, dt, omp_opt);
        });
        const bool same =
            std::memcmp(f_serial.n.data(), f_omp.n.data(), n_cells * sizeof(double)) == 0 &&
            std::memcmp(f_serial.S.data(), f_omp.S.data(), n_cells * sizeof(double)) == 0;
        print_row("madelung_step", n_cells, t_serial, t_omp, same);
    }

    // A small stochastic ensemble end to end.
    {
        const std::size_t n_cells = 2048;
        const sqha::Grid1D grid = sqha::make_grid(-6.4, 6.4, n_cells);
        const std::vector<double> V = sqha::harmonic_potential(grid, c, 1.0);
        const sqha::WFMField init =
            sqha::init_profile(grid, sqha::ProfileSpec::gaussian_profile(1.5), c);
        sqha::SqhaConfig scfg;
        scfg.theta = 0.05;
        scfg.madelung.mask_abort_fraction = 1.0;
        const double dt = 0.5 * 0.1 * c.mass * grid.spacing() * grid.spacing() / c.hbar;

        sqha::EnsembleConfig ens;
        ens.n_realizations = 24;
        ens.n_steps = 5;
        ens.base_seed = 7;

        sqha::EnsembleResult res_serial, res_omp;
        ens.exec = sqha::Exec::serial;
        const double t_serial = time_best_of(
            2, [&] { res_serial = sqha::run_ensemble(grid, V, c, scfg, dt, init, ens); });
        ens.exec = sqha::Exec::openmp;
        const double t_omp = time_best_of(
            2, [&] { res_omp = sqha::run_ensemble(grid, V, c, scfg, dt, init, ens); });
        bool same = res_serial.realizations.size() == res_omp.realizations.size();
        for (std::size_t k = 0; same && k < res_serial.realizations.size(); ++k) {
            same = std::memcmp(&res_serial.realizations[k], &res_omp.realizations[k],
                               sizeof(sqha::RealizationSummary)) == 0;
        }
        print_row("run_ensemble", n_cells, t_serial, t_omp, same);
    }
    return 0;
}
