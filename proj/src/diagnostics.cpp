#include "sqha/diagnostics.hpp"

#include "sqha/quantum_potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sqha {

namespace {

void check_ensemble(const std::vector<std::vector<double>>& fields, const Grid1D& grid,
                    const char* who) {
    if (fields.size() < 100)
        throw std::invalid_argument(std::string(who) + ": need at least 100 ensemble members, got " +
                                    std::to_string(fields.size()));
    for (const auto& f : fields)
        if (f.size() != grid.n_cells)
            throw std::invalid_argument(std::string(who) + ": field size does not match the grid");
}

/// Per-cell ensemble variance of observable(field)[i], averaged over cells.
template <typename Observable>
double mean_cell_variance(const std::vector<std::vector<double>>& fields, const Grid1D& grid,
                          Observable&& observable) {
    const std::size_t n = grid.n_cells;
    const double count = static_cast<double>(fields.size());
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0), row(n);
    for (const auto& f : fields) {
        observable(f, row);
        for (std::size_t i = 0; i < n; ++i) {
            sum[i] += row[i];
            sumsq[i] += row[i] * row[i];
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mean = sum[i] / count;
        acc += (sumsq[i] - count * mean * mean) / (count - 1.0);
    }
    return acc / static_cast<double>(n);
}

void forward_gradient(const std::vector<double>& f, const Grid1D& grid,
                      std::vector<double>& out) {
    const double inv = 1.0 / grid.spacing();
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.n_cells); ++i) {
        const std::size_t ic = static_cast<std::size_t>(i);
        out[ic] = (f[grid.neighbor(i + 1)] - f[ic]) * inv;
    }
}

void forward_second_difference(const std::vector<double>& f, const Grid1D& grid,
                               std::vector<double>& out) {
    const double inv = 1.0 / (grid.spacing() * grid.spacing());
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.n_cells); ++i) {
        const std::size_t ic = static_cast<std::size_t>(i);
        out[ic] = (f[grid.neighbor(i + 2)] - 2.0 * f[grid.neighbor(i + 1)] + f[ic]) * inv;
    }
}

double grad_variance_scale(const FluctuationStats& stats, double spacing) {
    if (stats.G_hat.size() < 3)
        throw std::invalid_argument("fluctuation stats need correlations at lags 0..2");
    return 2.0 * stats.g_hat * (1.0 - stats.G_hat[1]) / (spacing * spacing);
}

}  // namespace

FluctuationStats estimate_correlation(const std::vector<std::vector<double>>& increments,
                                      const std::vector<double>& n0, const Grid1D& grid,
                                      double delta_t, std::size_t max_lag) {
    check_ensemble(increments, grid, "estimate_correlation");
    if (n0.size() != grid.n_cells)
        throw std::invalid_argument("estimate_correlation: reference density size mismatch");
    if (max_lag >= grid.n_cells)
        throw std::invalid_argument("estimate_correlation: max_lag must be below the cell count");

    const std::size_t n = grid.n_cells;
    FluctuationStats stats;
    stats.delta_t = delta_t;

    std::vector<double> acc(max_lag + 1, 0.0);
    for (const auto& e : increments) {
        for (std::size_t r = 0; r <= max_lag; ++r) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += e[i] * e[(i + r) % n];
            acc[r] += s;
        }
    }
    const double samples = static_cast<double>(increments.size() * n);
    stats.g_hat = acc[0] / samples;
    stats.G_hat.assign(max_lag + 1, 0.0);
    if (acc[0] > 0.0)
        for (std::size_t r = 0; r <= max_lag; ++r) stats.G_hat[r] = acc[r] / acc[0];

    const double inv_2l = 1.0 / (2.0 * grid.spacing());
    double a_acc = 0.0;
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double g = (n0[grid.neighbor(i + 1)] - n0[grid.neighbor(i - 1)]) * inv_2l;
        a_acc += g * g;
    }
    stats.A = a_acc / static_cast<double>(n);

    double mass = 0.0, mass2 = 0.0;
    for (double v : n0) {
        mass += v;
        mass2 += v * v;
    }
    if (!(mass > 0.0))
        throw std::invalid_argument("estimate_correlation: reference density has no mass");
    stats.d1 = stats.d2 = mass2 / mass;  // the spacing factors cancel in the ratio
    return stats;
}

VarianceCheck gradsq_variance(const std::vector<std::vector<double>>& fields,
                              const std::vector<double>& n0, const Grid1D& grid,
                              const FluctuationStats& stats) {
    check_ensemble(fields, grid, "gradsq_variance");
    const double c1 = grad_variance_scale(stats, grid.spacing());
    VarianceCheck out;
    out.formula = 2.0 * c1 * c1 + 4.0 * stats.A * c1;

    std::vector<double> grad(grid.n_cells);
    out.direct = mean_cell_variance(fields, grid,
                                    [&](const std::vector<double>& f, std::vector<double>& row) {
                                        forward_gradient(f, grid, grad);
                                        for (std::size_t i = 0; i < grid.n_cells; ++i)
                                            row[i] = grad[i] * grad[i];
                                    });
    (void)n0;  // the reference enters through stats.A
    return out;
}

VarianceCheck laplacian_variance(const std::vector<std::vector<double>>& fields,
                                 const std::vector<double>& n0, const Grid1D& grid,
                                 const FluctuationStats& stats) {
    check_ensemble(fields, grid, "laplacian_variance");
    if (stats.G_hat.size() < 3)
        throw std::invalid_argument("laplacian_variance: stats need correlations at lags 0..2");
    const double l2 = grid.spacing() * grid.spacing();
    VarianceCheck out;
    out.formula = 2.0 * stats.g_hat * (3.0 + stats.G_hat[2] - 4.0 * stats.G_hat[1]) / (l2 * l2);
    out.direct = mean_cell_variance(fields, grid,
                                    [&](const std::vector<double>& f, std::vector<double>& row) {
                                        forward_second_difference(f, grid, row);
                                    });
    (void)n0;
    return out;
}

CrossTermCheck cross_term(const std::vector<std::vector<double>>& fields, const Grid1D& grid) {
    check_ensemble(fields, grid, "cross_term");
    const std::size_t n = grid.n_cells;
    const std::size_t members = fields.size();

    // Per-batch spatially averaged covariance between Lap n and (grad n)^2,
    // then a z-score of the batch mean.
    constexpr std::size_t n_batches = 20;
    const std::size_t batch_size = members / n_batches;
    std::vector<double> batch_values;
    batch_values.reserve(n_batches);

    std::vector<double> lap(n), grad(n);
    for (std::size_t b = 0; b < n_batches; ++b) {
        const std::size_t lo = b * batch_size;
        const std::size_t hi = (b + 1 == n_batches) ? members : lo + batch_size;
        const double count = static_cast<double>(hi - lo);
        std::vector<double> sum_l(n, 0.0), sum_y(n, 0.0), sum_ly(n, 0.0);
        for (std::size_t m = lo; m < hi; ++m) {
            forward_second_difference(fields[m], grid, lap);
            forward_gradient(fields[m], grid, grad);
            for (std::size_t i = 0; i < n; ++i) {
                const double y = grad[i] * grad[i];
                sum_l[i] += lap[i];
                sum_y[i] += y;
                sum_ly[i] += lap[i] * y;
            }
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cov = (sum_ly[i] - sum_l[i] * sum_y[i] / count) / (count - 1.0);
            acc += cov;
        }
        batch_values.push_back(acc / static_cast<double>(n));
    }

    CrossTermCheck out;
    double mean = 0.0;
    for (double v : batch_values) mean += v;
    mean /= static_cast<double>(n_batches);
    double ss = 0.0;
    for (double v : batch_values) ss += (v - mean) * (v - mean);
    const double se =
        std::sqrt(ss / static_cast<double>(n_batches - 1) / static_cast<double>(n_batches));
    out.value = mean;
    out.z_score = se > 0.0 ? mean / se : 0.0;
    return out;
}

QpVarianceCheck qp_variance(const std::vector<std::vector<double>>& fields,
                            const std::vector<double>& n0, const Grid1D& grid,
                            const PhysicalConstants& constants,
                            const FluctuationStats& stats) {
    check_ensemble(fields, grid, "qp_variance");
    if (!(stats.d1 > 0.0) || !(stats.d2 > 0.0))
        throw std::invalid_argument("qp_variance: stats need positive d1, d2");

    const double lap = laplacian_variance(fields, n0, grid, stats).formula;
    const double grd = gradsq_variance(fields, n0, grid, stats).formula;
    const double pref = constants.hbar * constants.hbar / (2.0 * constants.mass);

    QpVarianceCheck out;
    out.formula = pref * pref *
                  (lap / (stats.d1 * stats.d1) -
                   grd / (stats.d2 * stats.d2 * stats.d2 * stats.d2));
    out.formula_negative = out.formula < 0.0;
    out.corrected = pref * pref * lap / (4.0 * stats.d1 * stats.d1);

    // direct: ensemble variance of I* per cell, over cells unmasked in every
    // member
    const std::size_t n = grid.n_cells;
    const double count = static_cast<double>(fields.size());
    QPOptions qpo;
    const QPField ref = qp_sqrt_form(n0, grid, constants, qpo);
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    std::vector<std::uint8_t> ever_masked(ref.masked);
    for (const auto& f : fields) {
        const QPField q = qp_sqrt_form(f, grid, constants, qpo);
        for (std::size_t i = 0; i < n; ++i) {
            if (q.masked[i]) ever_masked[i] = 1;
            const double istar = q.v_qu[i] - ref.v_qu[i];
            sum[i] += istar;
            sumsq[i] += istar * istar;
        }
    }
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ever_masked[i]) continue;
        const double mean = sum[i] / count;
        acc += (sumsq[i] - count * mean * mean) / (count - 1.0);
        ++used;
    }
    if (used == 0)
        throw std::runtime_error("qp_variance: every cell fell below the density floor "
                                 "in at least one member");
    out.direct = acc / static_cast<double>(used);
    return out;
}

ScalingFitResult scaling_fit(const std::vector<double>& thetas,
                             const std::vector<double>& variances) {
    if (thetas.size() != variances.size())
        throw std::invalid_argument("scaling_fit: theta and variance counts differ");
    if (thetas.size() < 4)
        throw std::invalid_argument("scaling_fit: need at least 4 theta values, got " +
                                    std::to_string(thetas.size()));
    double tmin = thetas.front(), tmax = thetas.front();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        if (!(thetas[i] > 0.0))
            throw std::invalid_argument("scaling_fit: theta values must be positive");
        if (!(variances[i] > 0.0))
            throw std::invalid_argument("scaling_fit: nonpositive variance at theta = " +
                                        std::to_string(thetas[i]));
        tmin = std::min(tmin, thetas[i]);
        tmax = std::max(tmax, thetas[i]);
    }
    if (std::log10(tmax / tmin) < 1.5 * (1.0 - 1e-9))
        throw std::invalid_argument("scaling_fit: theta values must span at least 1.5 decades");

    const double n = static_cast<double>(thetas.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double x = std::log(thetas[i]);
        const double y = std::log(variances[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double vxx = sxx - sx * sx / n;
    const double vxy = sxy - sx * sy / n;
    const double vyy = syy - sy * sy / n;

    ScalingFitResult res;
    res.theta_values = thetas;
    res.exponent = vxy / vxx;
    res.intercept = (sy - res.exponent * sx) / n;
    res.r_squared = vyy > 0.0 ? std::min(1.0, (vxy * vxy) / (vxx * vyy)) : 1.0;
    return res;
}

}  // namespace sqha
