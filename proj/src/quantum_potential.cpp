#include "sqha/quantum_potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqha {

namespace {

void apply_floor_mask(const std::vector<double>& n, double rel_floor, QPField& out) {
    double nmax = 0.0;
    for (double v : n) nmax = std::max(nmax, v);
    if (!(nmax > 0.0)) throw std::invalid_argument("quantum potential: density is identically zero");
    out.floor_value = rel_floor * nmax;
    out.masked.assign(n.size(), 0);
    out.n_masked = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] >= out.floor_value)) {  // also catches NaN
            out.masked[i] = 1;
            ++out.n_masked;
        }
    }
}

/// Rounding-noise amplitude of a central force stencil.  The three-point
/// Laplacian of sqrt(n) carries an absolute error of a few eps relative to
/// sqrt(n) itself, which v_qu amplifies by 1 / spacing^2 and the force
/// difference by another 1 / spacing; 32 eps covers a handful of ulps on the
/// density samples with margin.
double force_noise_floor(double qp_prefactor, double spacing) {
    const double eps = std::numeric_limits<double>::epsilon();
    return 32.0 * eps * qp_prefactor / (spacing * spacing * spacing);
}

/// Replace masked entries by the value of the nearest unmasked cell
/// (ties broken toward lower index); distances honor the boundary kind.
/// Runs as two distance sweeps so a long sub-floor tail costs O(n), not a
/// pairwise scan per masked cell.
void clamp_masked(QPField& qp, const Grid1D& grid) {
    if (qp.n_masked == 0) return;
    const auto n = static_cast<std::ptrdiff_t>(grid.n_cells);
    if (qp.n_masked == grid.n_cells)
        throw std::runtime_error("quantum potential: every cell is below the density floor");

    const std::ptrdiff_t far = 2 * n;  // beyond any realizable distance
    std::vector<std::ptrdiff_t> left(grid.n_cells, far), right(grid.n_cells, far);
    // A periodic ring needs a second lap so distances propagate across the
    // wrap; on a clamped grid one pass per direction settles everything.
    const int passes = grid.boundary == Boundary::periodic ? 2 : 1;
    for (int p = 0; p < passes; ++p)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto ic = static_cast<std::size_t>(i);
            if (!qp.masked[ic]) {
                left[ic] = 0;
                continue;
            }
            const std::size_t prev = grid.neighbor(i - 1);
            if (prev != ic && left[prev] < far) left[ic] = std::min(left[ic], left[prev] + 1);
        }
    for (int p = 0; p < passes; ++p)
        for (std::ptrdiff_t i = n - 1; i >= 0; --i) {
            const auto ic = static_cast<std::size_t>(i);
            if (!qp.masked[ic]) {
                right[ic] = 0;
                continue;
            }
            const std::size_t next = grid.neighbor(i + 1);
            if (next != ic && right[next] < far) right[ic] = std::min(right[ic], right[next] + 1);
        }
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto ic = static_cast<std::size_t>(i);
        if (!qp.masked[ic]) continue;
        const std::size_t src = left[ic] <= right[ic] ? grid.neighbor(i - left[ic])
                                                      : grid.neighbor(i + right[ic]);
        qp.v_qu[ic] = qp.v_qu[src];
    }
}

} // namespace

QPField qp_sqrt_form(const std::vector<double>& n, const Grid1D& grid,
                     const PhysicalConstants& constants, const QPOptions& opt) {
    if (n.size() != grid.n_cells) throw std::invalid_argument("qp_sqrt_form: size mismatch");
    QPField qp;
    apply_floor_mask(n, opt.density_rel_floor, qp);
    qp.v_qu.assign(n.size(), 0.0);

    const double lam = grid.spacing();
    const double pref = -constants.hbar * constants.hbar / (2.0 * constants.mass);
    const double inv_l2 = 1.0 / (lam * lam);
    const double floor = qp.floor_value;
    const auto count = static_cast<std::ptrdiff_t>(n.size());

    // sqrt with the floor applied, so stencil neighbors of masked cells stay finite.
    std::vector<double> u(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) u[i] = std::sqrt(std::max(n[i], floor));

    auto cell = [&](std::ptrdiff_t i) {
        const double um = u[grid.neighbor(i - 1)];
        const double u0 = u[static_cast<std::size_t>(i)];
        const double up = u[grid.neighbor(i + 1)];
        qp.v_qu[static_cast<std::size_t>(i)] = pref * (up - 2.0 * u0 + um) * inv_l2 / u0;
    };
    if (opt.exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) cell(i);
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) cell(i);
    }
    clamp_masked(qp, grid);
    qp.force_floor = force_noise_floor(std::abs(pref), lam);
    return qp;
}

QPField qp_grad_form(const std::vector<double>& n, const Grid1D& grid,
                     const PhysicalConstants& constants, const QPOptions& opt) {
    if (n.size() != grid.n_cells) throw std::invalid_argument("qp_grad_form: size mismatch");
    QPField qp;
    apply_floor_mask(n, opt.density_rel_floor, qp);
    qp.v_qu.assign(n.size(), 0.0);

    const double lam = grid.spacing();
    const double pref = -constants.hbar * constants.hbar / (2.0 * constants.mass);
    const double floor = qp.floor_value;
    const auto count = static_cast<std::ptrdiff_t>(n.size());

    auto cell = [&](std::ptrdiff_t i) {
        const double n0 = std::max(n[static_cast<std::size_t>(i)], floor);
        const double n1 = std::max(n[grid.neighbor(i + 1)], floor);
        const double n2 = std::max(n[grid.neighbor(i + 2)], floor);
        const double grad = (n1 - n0) / lam;
        const double lap = (n2 - 2.0 * n1 + n0) / (lam * lam);
        qp.v_qu[static_cast<std::size_t>(i)] =
            pref * (0.5 * lap / n0 - 0.25 * grad * grad / (n0 * n0));
    };
    if (opt.exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) cell(i);
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) cell(i);
    }
    clamp_masked(qp, grid);
    qp.force_floor = force_noise_floor(std::abs(pref), lam);
    return qp;
}

std::vector<double> quantum_force(const QPField& qp, const Grid1D& grid) {
    if (qp.v_qu.size() != grid.n_cells) throw std::invalid_argument("quantum_force: size mismatch");
    const auto count = static_cast<std::ptrdiff_t>(grid.n_cells);
    const double inv_2l = 1.0 / (2.0 * grid.spacing());
    std::vector<double> force(grid.n_cells, 0.0);
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const std::size_t im = grid.neighbor(i - 1);
        const std::size_t ip = grid.neighbor(i + 1);
        const std::size_t ic = static_cast<std::size_t>(i);
        if (qp.masked[ic] || qp.masked[im] || qp.masked[ip]) continue;  // dilated mask -> 0
        const double f = -(qp.v_qu[ip] - qp.v_qu[im]) * inv_2l;
        // A profile whose v_qu is constant up to rounding (the simple
        // exponential, for one) must come out force-free, not force-jittery.
        force[ic] = std::abs(f) <= qp.force_floor ? 0.0 : f;
    }
    return force;
}

} // namespace sqha
