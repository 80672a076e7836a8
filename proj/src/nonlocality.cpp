#include "sqha/nonlocality.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sqha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("fit_line: abscissa values are all identical");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

/// Cells with q in [q_lo, q_hi], as (q, |force|/q) pairs in ascending q.
struct TailSamples {
    std::vector<double> q;
    std::vector<double> f;
};

TailSamples collect_integrand(const std::vector<double>& force, const Grid1D& grid,
                              double q_lo, double q_hi) {
    TailSamples s;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double qi = grid.q(i);
        if (qi < q_lo || qi > q_hi) continue;
        s.q.push_back(qi);
        s.f.push_back(std::abs(force[i]) / qi);
    }
    return s;
}

double trapezoid(const TailSamples& s, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i + 1 <= hi; ++i) {
        acc += 0.5 * (s.f[i] + s.f[i + 1]) * (s.q[i + 1] - s.q[i]);
    }
    return acc;
}

}  // namespace

const char* to_string(ConvergenceVerdict v) {
    switch (v) {
        case ConvergenceVerdict::converges: return "converges";
        case ConvergenceVerdict::diverges: return "diverges";
        case ConvergenceVerdict::indeterminate: return "indeterminate";
    }
    return "?";
}

const char* to_string(LambdaLStatus s) {
    switch (s) {
        case LambdaLStatus::finite: return "finite";
        case LambdaLStatus::infinite: return "infinite";
        case LambdaLStatus::undefined_zero_denominator: return "undefined (zero denominator)";
    }
    return "?";
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::non_local_deterministic: return "non_local_deterministic";
        case Regime::local_deterministic: return "local_deterministic";
        case Regime::microscopic_stochastic: return "microscopic_stochastic";
        case Regime::macroscopic_nonlocal_stochastic: return "macroscopic_nonlocal_stochastic";
        case Regime::macroscopic_local_stochastic: return "macroscopic_local_stochastic";
    }
    return "?";
}

TailFit tail_exponent(const WFMField& field, const Grid1D& grid, double window_lo,
                      double window_hi) {
    if (field.n.size() != grid.n_cells) {
        throw std::invalid_argument("tail_exponent: field size does not match the grid");
    }
    if (!(window_lo > 0.0) || !(window_hi > window_lo)) {
        throw std::invalid_argument(
            "tail_exponent: fit window must satisfy 0 < window_lo < window_hi");
    }
    const double max_n = *std::max_element(field.n.begin(), field.n.end());
    if (!(max_n > 0.0)) {
        throw std::invalid_argument("tail_exponent: density has no positive cells");
    }
    const double floor_value = 1e-12 * max_n;
    const double asymptotic_cap = 1e-3 * max_n;

    std::vector<double> x, y;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double aq = std::abs(grid.q(i));
        if (aq < window_lo || aq > window_hi) continue;
        const double n = field.n[i];
        if (!(n > floor_value)) {
            throw std::invalid_argument(
                "tail_exponent: window reaches below the density floor; shrink window_hi");
        }
        if (!(n < asymptotic_cap)) {
            throw std::invalid_argument(
                "tail_exponent: window is not in the asymptotic tail (density above 1e-3 "
                "of the peak); increase window_lo");
        }
        const double minus_log_u = -0.5 * std::log(n);
        if (!(minus_log_u > 0.0)) {
            throw std::invalid_argument("tail_exponent: non-decaying profile in the window");
        }
        x.push_back(std::log(aq));
        y.push_back(std::log(minus_log_u));
    }
    if (x.size() < 10) {
        std::ostringstream msg;
        msg << "tail_exponent: window too small (" << x.size() << " cells, need at least 10)";
        throw std::invalid_argument(msg.str());
    }
    const LineFit fit = fit_line(x, y);
    if (!(fit.slope > 0.0)) {
        throw std::invalid_argument(
            "tail_exponent: non-decaying profile (fitted decay exponent is not positive)");
    }
    TailFit out;
    out.h = fit.slope;
    out.phi = 3.0 - 2.0 * fit.slope;
    out.window_lo = window_lo;
    out.window_hi = window_hi;
    out.residual = fit.rms_residual;
    return out;
}

ForceIntegralResult force_integral(const std::vector<double>& force, const Grid1D& grid,
                                   double q_min, double q_max) {
    if (force.size() != grid.n_cells) {
        throw std::invalid_argument("force_integral: force size does not match the grid");
    }
    if (!(q_min > 0.0)) {
        throw std::invalid_argument("force_integral: q_min must be positive");
    }
    const TailSamples s = collect_integrand(force, grid, q_min, q_max);
    if (s.q.size() < 2) {
        throw std::invalid_argument(
            "force_integral: fewer than two usable cells beyond q_min (mask covers the "
            "integration range)");
    }
    const std::size_t last = s.q.size() - 1;
    const double q_end = s.q[last];

    ForceIntegralResult res;
    res.value = trapezoid(s, 0, last);

    // Partial integrals over doubling windows [q_min 2^k, q_min 2^{k+1}].
    std::vector<double> window_sum;
    {
        double lo = q_min;
        std::size_t idx = 0;
        while (2.0 * lo <= q_end) {
            const double hi = 2.0 * lo;
            while (idx < last && s.q[idx] < lo) ++idx;
            std::size_t jdx = idx;
            while (jdx < last && s.q[jdx + 1] <= hi) ++jdx;
            window_sum.push_back(jdx > idx ? trapezoid(s, idx, jdx) : 0.0);
            idx = jdx;
            lo = hi;
        }
    }
    res.n_windows = window_sum.size();

    // Signal 1a: the tail has effectively stopped contributing.
    bool cauchy_settled = false;
    if (window_sum.size() >= 3) {
        cauchy_settled = true;
        for (std::size_t k = window_sum.size() - 3; k < window_sum.size(); ++k) {
            if (!(window_sum[k] <= 1e-3 * res.value)) cauchy_settled = false;
        }
    }

    // Signal 1b: geometric trend of the window sums (ratio 2^{p+1} for a
    // power-law integrand q^p, so < 1 contracts and > 1 grows).
    int trend_vote = 0;  // -1 converge, +1 diverge, 0 abstain
    {
        double log_ratio_sum = 0.0;
        std::size_t n_ratios = 0;
        const std::size_t first =
            window_sum.size() > 3 ? window_sum.size() - 3 : static_cast<std::size_t>(1);
        for (std::size_t k = first; k < window_sum.size(); ++k) {
            if (window_sum[k - 1] > 0.0 && window_sum[k] > 0.0) {
                log_ratio_sum += std::log(window_sum[k] / window_sum[k - 1]);
                ++n_ratios;
            } else if (window_sum[k - 1] > 0.0 && window_sum[k] == 0.0) {
                // A dead window after a live one is as contracting as it gets.
                log_ratio_sum += std::log(1e-6);
                ++n_ratios;
            }
        }
        if (n_ratios > 0) {
            res.cauchy_ratio = std::exp(log_ratio_sum / static_cast<double>(n_ratios));
            if (res.cauchy_ratio <= 0.90) trend_vote = -1;
            else if (res.cauchy_ratio >= 0.97) trend_vote = +1;
        }
    }

    // Signal 2: fitted power of the integrand over the outer part of the
    // range (q >= q_end / 4, positive samples only).
    int power_vote = 0;
    double amplitude_log = 0.0;
    {
        std::vector<double> x, y;
        for (std::size_t i = 0; i <= last; ++i) {
            if (s.q[i] >= 0.25 * q_end && s.f[i] > 0.0) {
                x.push_back(std::log(s.q[i]));
                y.push_back(std::log(s.f[i]));
            }
        }
        if (x.size() >= 5) {
            const LineFit fit = fit_line(x, y);
            res.fitted_power = fit.slope;
            res.power_fit_ok = true;
            amplitude_log = fit.intercept;
            power_vote = fit.slope < -1.0 ? -1 : +1;
        }
    }

    const bool any_converge = cauchy_settled || trend_vote < 0 || power_vote < 0;
    const bool any_diverge = trend_vote > 0 || power_vote > 0;
    if (any_converge && !any_diverge) {
        res.verdict = ConvergenceVerdict::converges;
    } else if (any_diverge && !any_converge) {
        res.verdict = ConvergenceVerdict::diverges;
    } else {
        res.verdict = ConvergenceVerdict::indeterminate;
    }
    res.diverges = res.verdict != ConvergenceVerdict::converges;

    if (res.verdict == ConvergenceVerdict::converges && res.power_fit_ok &&
        res.fitted_power < -1.0) {
        // Analytic extension of the fitted power law beyond the last sample:
        // integral of f_fit(q_end) (q/q_end)^p from q_end to infinity.
        const double f_end = std::exp(amplitude_log + res.fitted_power * std::log(q_end));
        res.value += f_end * q_end / (-1.0 - res.fitted_power);
    }
    return res;
}

LambdaLResult lambda_L(const std::vector<double>& force, const Grid1D& grid,
                       double lambda_c, double q_max) {
    if (force.size() != grid.n_cells) {
        throw std::invalid_argument("lambda_L: force size does not match the grid");
    }
    if (!(lambda_c > 0.0) || !std::isfinite(lambda_c)) {
        throw std::invalid_argument("lambda_L: lambda_c must be positive and finite");
    }

    // Positive-q samples of the raw force (signed) and their locations.
    std::vector<double> qs, fs;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double qi = grid.q(i);
        if (qi > 0.0 && qi <= q_max) {
            qs.push_back(qi);
            fs.push_back(force[i]);
        }
    }
    if (qs.size() < 4) {
        throw std::invalid_argument("lambda_L: too few positive-q cells below q_max");
    }
    if (lambda_c < qs.front() || lambda_c > qs.back()) {
        throw std::invalid_argument("lambda_L: lambda_c lies outside the sampled range");
    }

    const ForceIntegralResult tail = force_integral(force, grid, qs.front(), q_max);
    if (tail.verdict != ConvergenceVerdict::converges) {
        return LambdaLResult{kInf, LambdaLStatus::infinite};
    }
    // Close the [0, q_first] gap with a rectangle: the integrand q^-1 dV/dq
    // tends to the finite curvature V'' (0) for a smooth even potential.
    const double strip = (std::abs(fs.front()) / qs.front()) * qs.front();
    const double numerator = 2.0 * (strip + tail.value);

    // Force at lambda_c by linear interpolation of the signed samples.
    const auto it = std::lower_bound(qs.begin(), qs.end(), lambda_c);
    double f_at_lc;
    if (it == qs.begin()) {
        f_at_lc = fs.front();
    } else {
        const std::size_t hi = static_cast<std::size_t>(it - qs.begin());
        const std::size_t lo = hi - 1;
        const double w = (lambda_c - qs[lo]) / (qs[hi] - qs[lo]);
        f_at_lc = (1.0 - w) * fs[lo] + w * fs[hi];
    }
    double max_abs_f = 0.0;
    for (const double f : fs) max_abs_f = std::max(max_abs_f, std::abs(f));
    if (std::abs(f_at_lc) <= 1e-14 * max_abs_f) {
        return LambdaLResult{std::numeric_limits<double>::quiet_NaN(),
                             LambdaLStatus::undefined_zero_denominator};
    }
    return LambdaLResult{numerator * lambda_c / std::abs(f_at_lc), LambdaLStatus::finite};
}

bool prefactor_admissible(double m_exp, int p_deg) {
    (void)m_exp;  // any real power only shifts the tail fit's subleading terms
    return p_deg <= 1;
}

Regime classify_regime(double lambda_c, double lambda_l, double delta_omega_q,
                       double delta_omega_c, double theta, double hbar,
                       const RegimeThresholds& thresholds) {
    if (!(delta_omega_q > 0.0) || !(delta_omega_c > 0.0)) {
        throw std::invalid_argument("classify_regime: observation scales must be positive");
    }
    if (delta_omega_q > delta_omega_c) {
        throw std::invalid_argument(
            "classify_regime: resolution scale delta_omega_q exceeds the system size "
            "delta_omega_c");
    }
    if (theta < 0.0 || hbar < 0.0) {
        throw std::invalid_argument("classify_regime: theta and hbar must be non-negative");
    }
    if (theta == 0.0) {
        if (std::isfinite(lambda_c)) {
            throw std::invalid_argument(
                "classify_regime: theta = 0 requires an infinite correlation length "
                "lambda_c (finite lambda_c implies fluctuations)");
        }
        return hbar == 0.0 ? Regime::local_deterministic : Regime::non_local_deterministic;
    }
    if (!(lambda_c > 0.0) || !std::isfinite(lambda_c)) {
        throw std::invalid_argument(
            "classify_regime: theta > 0 requires a finite positive lambda_c");
    }
    if (delta_omega_q < thresholds.macroscopic_ratio * lambda_c) {
        return Regime::microscopic_stochastic;
    }
    if (lambda_l <= thresholds.local_ratio * delta_omega_q) {
        return Regime::macroscopic_local_stochastic;
    }
    return Regime::macroscopic_nonlocal_stochastic;
}

NonlocalityReport analyze_nonlocality(const WFMField& field, const Grid1D& grid,
                                      const PhysicalConstants& constants,
                                      const NonlocalityParams& params) {
    NonlocalityReport report;

    const QPField qp = qp_sqrt_form(field.n, grid, constants);
    const std::vector<double> force = quantum_force(qp, grid);

    // The force is zeroed on masked cells and their stencil neighbors, but
    // the next cell inward still differentiates a v_qu whose own stencil
    // touched the floored density, so the trustworthy outward extent stops a
    // cell and a half before the first dilated-mask cell at positive q.
    double q_valid = kInf;
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const bool dilated = qp.masked[i] != 0 ||
                             qp.masked[grid.neighbor(static_cast<std::ptrdiff_t>(i) - 1)] != 0 ||
                             qp.masked[grid.neighbor(static_cast<std::ptrdiff_t>(i) + 1)] != 0;
        if (dilated && grid.q(i) > 0.0) q_valid = std::min(q_valid, grid.q(i));
    }
    if (std::isfinite(q_valid)) q_valid -= 1.5 * grid.spacing();
    // On clamped grids the one-sided edge stencils distort the last cells;
    // keep the analysis clear of them.
    if (grid.boundary == Boundary::clamped) {
        q_valid = std::min(q_valid, grid.q_max - 3.0 * grid.spacing());
    }

    double window_lo = params.tail_window_lo;
    double window_hi = params.tail_window_hi;
    if (!(window_hi > window_lo)) {
        // Auto-window: the asymptotic band with safety margins on both ends.
        const double max_n = *std::max_element(field.n.begin(), field.n.end());
        double lo = kInf, hi = 0.0;
        for (std::size_t i = 0; i < grid.n_cells; ++i) {
            const double aq = std::abs(grid.q(i));
            if (field.n[i] > 1e-11 * max_n && field.n[i] < 3e-4 * max_n) {
                lo = std::min(lo, aq);
                hi = std::max(hi, aq);
            }
        }
        if (!(hi > lo)) {
            throw std::invalid_argument(
                "analyze_nonlocality: no asymptotic tail band on this grid; supply an "
                "explicit tail window");
        }
        window_lo = lo;
        window_hi = hi;
    }
    report.tail = tail_exponent(field, grid, window_lo, window_hi);
    report.tail.m_exp = params.m_exp;
    report.tail.p_deg = params.p_deg;

    report.force = force_integral(force, grid, params.integral_q_min, q_valid);
    report.lambda_l = lambda_L(force, grid, params.lambda_c, q_valid);
    report.prefactor_ok = prefactor_admissible(params.m_exp, params.p_deg);

    // For the regime label, theta = 0 means the deterministic limit where the
    // correlation length is infinite; params.lambda_c then only served as the
    // evaluation point of the lambda_L denominator.
    const double lambda_c_regime = params.theta == 0.0 ? kInf : params.lambda_c;
    const double lambda_l_value = report.lambda_l.status == LambdaLStatus::finite
                                      ? report.lambda_l.value
                                      : kInf;
    report.regime = classify_regime(lambda_c_regime, lambda_l_value, params.delta_omega_q,
                                    params.delta_omega_c, params.theta, params.hbar,
                                    params.thresholds);
    return report;
}

}  // namespace sqha
