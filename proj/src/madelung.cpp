#include "sqha/madelung.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace sqha {

namespace {

struct Derivative {
    std::vector<double> dn;
    std::vector<double> dS;
};

/// Right-hand side of the Madelung system at a given stage state.
void evaluate_rhs(const std::vector<double>& n, const std::vector<double>& S,
                  const Grid1D& grid, const std::vector<double>& V,
                  const PhysicalConstants& constants, const MadelungOptions& opt,
                  Derivative& out) {
    const auto count = static_cast<std::ptrdiff_t>(grid.n_cells);
    const double lam = grid.spacing();
    const double inv_2l = 1.0 / (2.0 * lam);
    const double inv_m = 1.0 / constants.mass;

    QPOptions qpo;
    qpo.density_rel_floor = opt.density_rel_floor;
    qpo.exec = opt.exec;
    QPField qp;
    if (opt.include_quantum_potential) {
        qp = qp_sqrt_form(n, grid, constants, qpo);
    } else {
        qp.v_qu.assign(grid.n_cells, 0.0);
    }

    out.dn.resize(grid.n_cells);
    out.dS.resize(grid.n_cells);

    // velocity v = (dS/dq) / m, central differences
    std::vector<double> v(grid.n_cells);
    auto vel = [&](std::ptrdiff_t i) {
        const double Sp = S[grid.neighbor(i + 1)];
        const double Sm = S[grid.neighbor(i - 1)];
        v[static_cast<std::size_t>(i)] = (Sp - Sm) * inv_2l * inv_m;
    };
    auto rhs = [&](std::ptrdiff_t i) {
        const std::size_t ic = static_cast<std::size_t>(i);
        const std::size_t ip = grid.neighbor(i + 1);
        const std::size_t im = grid.neighbor(i - 1);
        // conservative flux: F_{i+1/2} = (n_i v_i + n_{i+1} v_{i+1}) / 2
        const double flux_hi = 0.5 * (n[ic] * v[ic] + n[ip] * v[ip]);
        const double flux_lo = 0.5 * (n[im] * v[im] + n[ic] * v[ic]);
        out.dn[ic] = -(flux_hi - flux_lo) / lam;
        out.dS[ic] = -(0.5 * constants.mass * v[ic] * v[ic] + V[ic] + qp.v_qu[ic]);
    };
    if (opt.exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) vel(i);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) rhs(i);
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) vel(i);
        for (std::ptrdiff_t i = 0; i < count; ++i) rhs(i);
    }
}

} // namespace

void madelung_step(WFMField& field, const Grid1D& grid, const std::vector<double>& potential,
                   const PhysicalConstants& constants, double dt, const MadelungOptions& opt) {
    if (field.n.size() != grid.n_cells || field.S.size() != grid.n_cells)
        throw std::invalid_argument("madelung_step: field size mismatch");
    if (potential.size() != grid.n_cells)
        throw std::invalid_argument("madelung_step: potential size mismatch");

    const double lam = grid.spacing();
    if (opt.include_quantum_potential && constants.hbar > 0.0) {
        const double dt_max = opt.c_cfl * constants.mass * lam * lam / constants.hbar;
        if (std::abs(dt) > dt_max * (1.0 + 1e-12))
            throw std::invalid_argument("madelung_step: dt = " + std::to_string(std::abs(dt)) +
                                        " exceeds CFL bound " + std::to_string(dt_max));
    }

    // Mask-fraction abort, checked on the entry state.  Only meaningful when
    // the quantum potential participates in the dynamics.
    if (opt.include_quantum_potential) {
        QPOptions qpo;
        qpo.density_rel_floor = opt.density_rel_floor;
        const QPField qp = qp_sqrt_form(field.n, grid, constants, qpo);
        const double frac = static_cast<double>(qp.n_masked) / static_cast<double>(grid.n_cells);
        if (frac > opt.mask_abort_fraction)
            throw std::runtime_error("madelung_step: " + std::to_string(100.0 * frac) +
                                     "% of cells below the density floor (limit " +
                                     std::to_string(100.0 * opt.mask_abort_fraction) + "%)");
    }

    // Advective Courant guard on the entry velocity.
    {
        const double inv_2l = 1.0 / (2.0 * lam);
        double vmax = 0.0;
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.n_cells); ++i) {
            const double v = std::abs(field.S[grid.neighbor(i + 1)] - field.S[grid.neighbor(i - 1)]) *
                             inv_2l / constants.mass;
            vmax = std::max(vmax, v);
        }
        if (vmax * std::abs(dt) > lam)
            throw std::runtime_error("madelung_step: advective Courant violation (max|v| dt > spacing)");
    }

    const std::size_t n_cells = grid.n_cells;
    Derivative k1, k2, k3, k4;
    std::vector<double> tn(n_cells), tS(n_cells);

    evaluate_rhs(field.n, field.S, grid, potential, constants, opt, k1);
    for (std::size_t i = 0; i < n_cells; ++i) {
        tn[i] = field.n[i] + 0.5 * dt * k1.dn[i];
        tS[i] = field.S[i] + 0.5 * dt * k1.dS[i];
    }
    evaluate_rhs(tn, tS, grid, potential, constants, opt, k2);
    for (std::size_t i = 0; i < n_cells; ++i) {
        tn[i] = field.n[i] + 0.5 * dt * k2.dn[i];
        tS[i] = field.S[i] + 0.5 * dt * k2.dS[i];
    }
    evaluate_rhs(tn, tS, grid, potential, constants, opt, k3);
    for (std::size_t i = 0; i < n_cells; ++i) {
        tn[i] = field.n[i] + dt * k3.dn[i];
        tS[i] = field.S[i] + dt * k3.dS[i];
    }
    evaluate_rhs(tn, tS, grid, potential, constants, opt, k4);

    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n_cells; ++i) {
        field.n[i] += w * (k1.dn[i] + 2.0 * k2.dn[i] + 2.0 * k3.dn[i] + k4.dn[i]);
        field.S[i] += w * (k1.dS[i] + 2.0 * k2.dS[i] + 2.0 * k3.dS[i] + k4.dS[i]);
    }
}

double stationarity_residual(const WFMField& field, const Grid1D& grid,
                             const std::vector<double>& potential,
                             const PhysicalConstants& constants, double density_rel_floor) {
    QPOptions qpo;
    qpo.density_rel_floor = density_rel_floor;
    const QPField qp = qp_sqrt_form(field.n, grid, constants, qpo);
    const double inv_2l = 1.0 / (2.0 * grid.spacing());

    double num = 0.0;
    double den = 0.0;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.n_cells); ++i) {
        const std::size_t ic = static_cast<std::size_t>(i);
        const std::size_t ip = grid.neighbor(i + 1);
        const std::size_t im = grid.neighbor(i - 1);
        if (qp.masked[ic] || qp.masked[ip] || qp.masked[im]) continue;
        const double r = ((potential[ip] + qp.v_qu[ip]) - (potential[im] + qp.v_qu[im])) * inv_2l;
        num += field.n[ic] * r * r;
        den += field.n[ic];
    }
    if (!(den > 0.0)) throw std::runtime_error("stationarity_residual: no unmasked cells");
    return std::sqrt(num / den);
}

double wave_particle_residual(const WFMField& field, const Grid1D& grid,
                              const PhysicalConstants& constants,
                              const std::vector<double>& velocity) {
    if (velocity.size() != grid.n_cells)
        throw std::invalid_argument("wave_particle_residual: velocity size mismatch");
    const double inv_2l = 1.0 / (2.0 * grid.spacing());
    double num = 0.0;
    double den = 0.0;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.n_cells); ++i) {
        const std::size_t ic = static_cast<std::size_t>(i);
        const double vS = (field.S[grid.neighbor(i + 1)] - field.S[grid.neighbor(i - 1)]) * inv_2l /
                          constants.mass;
        const double d = velocity[ic] - vS;
        num += field.n[ic] * d * d;
        den += field.n[ic];
    }
    return std::sqrt(num / den);
}

WFMField fd_ground_state(const Grid1D& grid, const std::vector<double>& potential,
                         const PhysicalConstants& constants) {
    if (potential.size() != grid.n_cells)
        throw std::invalid_argument("fd_ground_state: potential size mismatch");
    const auto n = static_cast<Eigen::Index>(grid.n_cells);
    const double lam = grid.spacing();
    const double t = constants.hbar * constants.hbar / (2.0 * constants.mass * lam * lam);

    double vmin = potential[0];
    for (double v : potential) vmin = std::min(vmin, v);
    // Shift strictly below the ground energy (kinetic part is positive
    // semi-definite, so E0 >= vmin; the margin keeps the factorization
    // well conditioned even for a flat potential).
    const double sigma = vmin - 1e-3 * (t + 1.0);

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(3 * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        trips.emplace_back(i, i, 2.0 * t + potential[static_cast<std::size_t>(i)] - sigma);
        const auto ip = static_cast<Eigen::Index>(grid.neighbor(i + 1));
        const auto im = static_cast<Eigen::Index>(grid.neighbor(i - 1));
        trips.emplace_back(i, ip, -t);
        trips.emplace_back(i, im, -t);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end(), [](const double& a, const double& b) { return a + b; });

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("fd_ground_state: factorization failed");

    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        // break symmetry-unfriendly starts: bias toward the potential minimum
        x[i] = std::exp(-(potential[static_cast<std::size_t>(i)] - vmin) / (t + 1.0));
    }
    x.normalize();
    double prev_mu = 0.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd y = lu.solve(x);
        const double mu = y.norm();
        if (!(mu > 0.0)) throw std::runtime_error("fd_ground_state: inverse iteration collapsed");
        y /= mu;
        const double delta = (y - x).norm();
        const double delta_flip = (y + x).norm();
        x = y;
        if (std::min(delta, delta_flip) < 1e-14 && std::abs(mu - prev_mu) < 1e-12 * mu) break;
        prev_mu = mu;
    }
    if (x.sum() < 0.0) x = -x;

    WFMField f;
    f.n.resize(grid.n_cells);
    f.S.assign(grid.n_cells, 0.0);
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double u = x[static_cast<Eigen::Index>(i)];
        f.n[i] = u * u;
    }
    normalize_density(f.n, grid);
    return f;
}

} // namespace sqha
