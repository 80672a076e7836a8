#pragma once

#include "sqha/constants.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"

#include <cstddef>
#include <vector>

namespace sqha {

/// Empirical second-moment summary of an ensemble of density increments,
/// together with the reference-profile weights the variance estimators need.
///
///   g_hat    single-point variance of the increments; for increments
///            accumulated over a window delta_t this estimates g(0) delta_t
///   G_hat    normalized spatial autocorrelation at lags {0, lambda,
///            2 lambda, ...}; G_hat[0] == 1 by construction
///   A        spatial mean of the squared central-difference gradient of the
///            reference density n0
///   d1, d2   density-weighted spatial means of n0, both defined as
///            (integral of n0^2 dq) / (integral of n0 dq); equal to n0 for a
///            uniform profile
struct FluctuationStats {
    double g_hat = 0.0;
    std::vector<double> G_hat;
    double A = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double delta_t = 0.0;
};

/// Builds FluctuationStats from an ensemble of increment fields (or n - n0
/// differences) plus the reference density they fluctuate around.
/// Correlations are uncentered products averaged over cells (periodic wrap)
/// and members, normalized by lag 0.  Requires at least 100 members.
FluctuationStats estimate_correlation(const std::vector<std::vector<double>>& increments,
                                      const std::vector<double>& n0, const Grid1D& grid,
                                      double delta_t, std::size_t max_lag = 16);

/// A formula-based variance prediction next to its direct Monte Carlo
/// counterpart measured from the same ensemble.
struct VarianceCheck {
    double formula = 0.0;
    double direct = 0.0;
};

/// Variance of the squared forward-difference gradient of the fluctuating
/// density.  With C1 = 2 g_hat [1 - G_hat(lambda)] / lambda^2 (the variance
/// of the increment's forward gradient), the prediction for a Gaussian
/// ensemble is
///
///     Var[(grad n)^2] = 2 C1^2 + 4 A C1,
///
/// the chi-squared term plus the term from beating against the reference
/// gradient.  `direct` is the per-cell ensemble variance of the squared
/// forward gradient of n = n0 + e, averaged over cells.
VarianceCheck gradsq_variance(const std::vector<std::vector<double>>& fields,
                              const std::vector<double>& n0, const Grid1D& grid,
                              const FluctuationStats& stats);

/// Variance of the forward second difference of the fluctuating density:
///
///     Var[Lap n] = 2 g_hat [3 + G_hat(2 lambda) - 4 G_hat(lambda)] / lambda^4.
///
/// `direct` is the per-cell ensemble variance of the forward second
/// difference, averaged over cells.
VarianceCheck laplacian_variance(const std::vector<std::vector<double>>& fields,
                                 const std::vector<double>& n0, const Grid1D& grid,
                                 const FluctuationStats& stats);

/// Sample covariance between the second difference of n and the squared
/// forward gradient of n, averaged over cells, with a z-score from batch
/// means over the ensemble.  For Gaussian increments around a uniform
/// reference this covariance involves only third moments and is
/// statistically zero; skewed increments drive it away from zero.
struct CrossTermCheck {
    double value = 0.0;
    double z_score = 0.0;
};

CrossTermCheck cross_term(const std::vector<std::vector<double>>& fields,
                          const Grid1D& grid);

/// Variance of the excess quantum potential I* = v_qu[n] - v_qu[n0].
///
///   formula    (hbar^2/2m)^2 [ laplacian/d1^2 - gradsq/d2^4 ], the
///              difference-of-terms combination of the two formula-based
///              estimators above.  It is not manifestly positive;
///              `formula_negative` flags when it came out below zero at this
///              discretization, and callers should surface that as a warning
///              rather than clamp it.
///   corrected  (hbar^2/2m)^2 laplacian / (4 d1^2), the closure obtained by
///              linearizing v_qu around a slowly varying reference; this is
///              the combination that closes against `direct` at first order.
///   direct     per-cell ensemble variance of I*, averaged over cells that
///              stay above the density floor in every member.
struct QpVarianceCheck {
    double formula = 0.0;
    double corrected = 0.0;
    double direct = 0.0;
    bool formula_negative = false;
};

QpVarianceCheck qp_variance(const std::vector<std::vector<double>>& fields,
                            const std::vector<double>& n0, const Grid1D& grid,
                            const PhysicalConstants& constants,
                            const FluctuationStats& stats);

/// Power-law fit of variance against theta on log-log axes.
struct ScalingFitResult {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> theta_values;
};

/// Least-squares slope of log(variance) vs log(theta).  Requires at least 4
/// theta values spanning at least 1.5 decades, and strictly positive
/// variances.
ScalingFitResult scaling_fit(const std::vector<double>& thetas,
                             const std::vector<double>& variances);

}  // namespace sqha
