#pragma once

#include "sqha/constants.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/quantum_potential.hpp"

#include <limits>
#include <string>
#include <vector>

namespace sqha {

/// Tail-decay fit of a density profile: models sqrt(n) ~ exp(-|q|^h) and
/// recovers h as the least-squares slope of log(-log sqrt(n)) against
/// log|q| over the fit window.  phi = 3 - 2h is positive exactly when the
/// quantum-force tail integral converges.  The prefactor power m_exp and
/// oscillation degree p_deg refine the admissible profile family; they are
/// metadata supplied by the caller, not fitted from data.
struct TailFit {
    double h = 0.0;
    double phi = 3.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double residual = 0.0;
    double m_exp = 0.0;
    int p_deg = 0;
};

/// Fits the tail exponent over cells with window_lo <= |q| <= window_hi.
/// Preconditions enforced: at least 10 cells in the window, every windowed
/// cell above the relative density floor (1e-12 of the peak) and inside the
/// asymptotic tail (below 1e-3 of the peak), and a decaying profile
/// (positive fitted slope).
TailFit tail_exponent(const WFMField& field, const Grid1D& grid, double window_lo,
                      double window_hi);

enum class ConvergenceVerdict { converges, diverges, indeterminate };

const char* to_string(ConvergenceVerdict v);

/// Result of the improper integral of |q^-1 dV_qu/dq| from q_min outward.
///
/// The verdict combines two independent signals that must agree:
///   - the trend of partial integrals over doubling windows [q, 2q]
///     (geometric ratio <= 0.90 contracting, >= 0.97 growing; windows that
///     fall below 1e-3 of the running total for three doublings in a row
///     count as fully converged), and
///   - the fitted log-log power p of the integrand tail (p < -1 converges,
///     p >= -1 diverges).
/// When they disagree the verdict is `indeterminate` and is reported as
/// such, never guessed.  `value` includes the analytic tail extension
/// f(q_end) q_end / (-1 - p) whenever the fitted power supports it;
/// otherwise it is the partial trapezoid sum.  `diverges` is true for any
/// verdict other than `converges`.
struct ForceIntegralResult {
    double value = 0.0;
    bool diverges = false;
    ConvergenceVerdict verdict = ConvergenceVerdict::indeterminate;
    double fitted_power = 0.0;
    bool power_fit_ok = false;
    double cauchy_ratio = 0.0;
    std::size_t n_windows = 0;
};

/// Integrates |force(q)| / q over cells with q_min <= q <= q_max by
/// trapezoid and classifies convergence of the full improper integral.
/// `force` holds dV_qu/dq per cell; pass the force only where it is
/// trustworthy and cap q_max at the first low-density masked cell.
/// Throws when q_min <= 0 or when no usable cells remain (mask covers the
/// tail).
ForceIntegralResult force_integral(const std::vector<double>& force, const Grid1D& grid,
                                   double q_min,
                                   double q_max = std::numeric_limits<double>::infinity());

enum class LambdaLStatus { finite, infinite, undefined_zero_denominator };

const char* to_string(LambdaLStatus s);

/// Quantum non-locality length
///
///   lambda_L = 2 * integral_0^inf |q^-1 dV_qu/dq| dq
///              / ( lambda_c^-1 |dV_qu/dq| at q = lambda_c ),
///
/// evaluated literally, denominator interpolated from the force samples.
/// status is `infinite` when the numerator integral diverges (or cannot be
/// pinned down), and `undefined_zero_denominator` when the force vanishes
/// at lambda_c; `value` is meaningful only for `finite`.
struct LambdaLResult {
    double value = std::numeric_limits<double>::infinity();
    LambdaLStatus status = LambdaLStatus::infinite;
};

LambdaLResult lambda_L(const std::vector<double>& force, const Grid1D& grid,
                       double lambda_c,
                       double q_max = std::numeric_limits<double>::infinity());

/// True when the tail prefactor family q^m * A_p(q) (polynomial A of degree
/// p, possibly oscillatory) keeps the force integral's convergence governed
/// by h alone: any real m, polynomial degree at most 1.
bool prefactor_admissible(double m_exp, int p_deg);

enum class Regime {
    non_local_deterministic,
    local_deterministic,
    microscopic_stochastic,
    macroscopic_nonlocal_stochastic,
    macroscopic_local_stochastic,
};

const char* to_string(Regime r);

/// The paper-free reading of the thresholds: "much larger" means the ratio
/// exceeds macroscopic_ratio, "much smaller" means it is below local_ratio.
struct RegimeThresholds {
    double macroscopic_ratio = 10.0;
    double local_ratio = 0.1;
};

/// Classifies the dynamical regime from the two quantum lengths and the
/// observation scales.  delta_omega_q is the resolution (coarse-graining)
/// scale, delta_omega_c the system size; delta_omega_q <= delta_omega_c is
/// required.  theta = 0 is the deterministic limit and demands an infinite
/// lambda_c; then hbar = 0 gives local and hbar > 0 non-local determinism.
/// With theta > 0: resolution >= macroscopic_ratio * lambda_c is
/// macroscopic (else microscopic), and a macroscopic regime is local when
/// lambda_L <= local_ratio * delta_omega_q.
Regime classify_regime(double lambda_c, double lambda_l, double delta_omega_q,
                       double delta_omega_c, double theta, double hbar,
                       const RegimeThresholds& thresholds = {});

/// Inputs for the end-to-end profile analysis.
struct NonlocalityParams {
    double tail_window_lo = 0.0;
    double tail_window_hi = 0.0;
    double integral_q_min = 0.5;
    double lambda_c = 1.0;
    double delta_omega_q = 1.0;
    double delta_omega_c = 1.0;
    double theta = 0.0;
    double hbar = 1.0;
    double m_exp = 0.0;
    int p_deg = 0;
    RegimeThresholds thresholds;
};

struct NonlocalityReport {
    TailFit tail;
    ForceIntegralResult force;
    LambdaLResult lambda_l;
    bool prefactor_ok = true;
    Regime regime = Regime::non_local_deterministic;
};

/// Full pipeline: quantum potential and force of the profile, validity
/// extent from the low-density mask, tail fit, force integral, lambda_L,
/// and the regime label.
NonlocalityReport analyze_nonlocality(const WFMField& field, const Grid1D& grid,
                                      const PhysicalConstants& constants,
                                      const NonlocalityParams& params);

}  // namespace sqha
