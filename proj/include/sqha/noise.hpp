#pragma once

#include "sqha/constants.hpp"
#include "sqha/grid.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sqha {

/// Parameters of the spatially correlated density noise.
///
/// The fluctuation field added to the mass density over a step dt has
/// covariance
///
///     Cov[e(q), e(q')] = g0 * G(|q - q'| / lambda_c) * dt,
///
/// where G is an even correlation kernel with G(0) = 1.  `lambda_c` is the
/// thermal correlation length (pi/2)^{3/2} hbar / sqrt(2 m k theta) and `g0`
/// the noise strength 8 m (k theta)^2 / (pi^3 hbar^3 delta_l^4), with
/// `delta_l` the coarse-graining length of the underlying mobility.
///
/// At theta = 0 the correlation length diverges and the amplitude vanishes:
/// lambda_c is reported as +infinity and g0 as exactly 0, so every sampled
/// increment is identically zero.
struct NoiseModel {
    double theta = 0.0;
    double delta_l = 1.0;
    double lambda_c = std::numeric_limits<double>::infinity();
    double g0 = 0.0;
};

/// Builds a NoiseModel, validating that the combination is representable.
/// theta < 0, delta_l <= 0, or (hbar == 0 with theta > 0) are rejected: the
/// last case would drive lambda_c to zero and the noise to a white-noise
/// limit that has no consistent discretization on any grid.
NoiseModel make_noise_model(const PhysicalConstants& constants, double theta,
                            double delta_l = 1.0);

/// Even correlation kernel G(x), evaluated at |x|, with G(0) = 1.
///
/// `gaussian` is exp(-x^2).  `table` interpolates user-supplied nodes
/// (x >= 0, ascending) linearly and is zero beyond the last node; the first
/// node must sit at x = 0 with value 1.
struct CorrelationKernel {
    enum class Kind { gaussian, table };
    Kind kind = Kind::gaussian;
    std::vector<std::pair<double, double>> table;

    double operator()(double x) const;
};

CorrelationKernel gaussian_kernel();
CorrelationKernel table_kernel(std::vector<std::pair<double, double>> nodes);

/// Local polynomial model of the kernel near the origin:
/// G(x) ~ a[0] + a[1] x + a[2] x^2 + a[3] x^3 + a[4] x^4 for small x >= 0.
/// `fit_residual` is the rms misfit of the model over the fitting window; a
/// kernel that is not smooth at that scale (for example a coarse table)
/// shows up as a large residual rather than as silently wrong coefficients.
struct KernelTaylor {
    std::array<double, 5> a{};
    double fit_residual = 0.0;
};

KernelTaylor kernel_taylor_coeffs(const CorrelationKernel& kernel);

/// A kernel is admissible for the fluctuation model when its small-x
/// expansion is even and concave at the origin: a0 = 1, a1 = a3 = 0,
/// a2 < 0.  Odd terms make the single-cell increment variance scale with
/// the first instead of the second power of the grid spacing, breaking
/// every spacing-independence property the diagnostics rely on.
struct KernelAdmissibility {
    bool admissible = false;
    std::string reason;
};

KernelAdmissibility check_kernel_admissible(const CorrelationKernel& kernel);

/// Small-spacing limits of the three stencil combinations that control the
/// stationary gradient and curvature statistics of the noise field, in
/// units of the correlation length (lambda_c = 1):
///
///   one_minus_g         = lim  [1 - G(l)] / l^2           -> -a2
///   one_minus_g_squared = lim  [1 - G(l)]^2 / l^4         -> a2^2
///   second_difference   = lim  [3 + G(2l) - 4 G(l)] / l^4 -> 12 a4
///
/// For the gaussian kernel these are 1, 1, and 6.  Values are Richardson
/// extrapolated from two spacings and assume a kernel smooth near 0.
struct DiscreteKernelLimits {
    double one_minus_g = 0.0;
    double one_minus_g_squared = 0.0;
    double second_difference = 0.0;
};

DiscreteKernelLimits discrete_kernel_limits(const CorrelationKernel& kernel);

/// Draws periodic noise fields with the exact target covariance by spectral
/// factorization of the circulant covariance matrix.
///
/// The covariance row c_j = g0 dt G(d_j / lambda_c), with d_j the wrapped
/// cell distance, has DFT eigenvalues mu_k.  Eigenvalues in
/// [-tol * max(mu), 0) are clipped to zero (roundoff of a kernel that is
/// positive semi-definite only marginally on this grid); anything more
/// negative is rejected at construction.  Sampling synthesizes a field with
/// spectrum sqrt(mu_k) from hermitian-paired unit normals, so two fields
/// drawn over dt/2 add up to the statistics of one field drawn over dt.
///
/// Instances hold FFT plans and scratch buffers: construction is not
/// thread-safe and a given instance must be used from one thread at a time.
/// Create one sampler per thread (serially) for parallel ensembles.
class NoiseSampler {
  public:
    NoiseSampler(const Grid1D& grid, const NoiseModel& model,
                 const CorrelationKernel& kernel, double dt);
    ~NoiseSampler();
    NoiseSampler(const NoiseSampler&) = delete;
    NoiseSampler& operator=(const NoiseSampler&) = delete;

    /// Fills `out` (resized to the grid) with one realization.
    void sample(std::mt19937_64& rng, std::vector<double>& out);
    std::vector<double> sample(std::mt19937_64& rng);

    std::size_t size() const { return n_; }
    /// Number of circulant eigenvalues zeroed for sitting below the
    /// positivity tolerance (rounding debris of the spectrum's FFT).
    std::size_t n_clipped() const { return n_clipped_; }
    /// Circulant eigenvalues after clipping, in DFT index order.
    const std::vector<double>& eigenvalues() const { return eigs_; }
    /// First row of the target covariance matrix.
    const std::vector<double>& covariance_row() const { return cov_row_; }

  private:
    std::size_t n_ = 0;
    bool zero_amplitude_ = false;
    std::size_t n_clipped_ = 0;
    std::vector<double> cov_row_;
    std::vector<double> eigs_;
    std::vector<double> scale_;  // sqrt(mu_k / N)
    void* buf_ = nullptr;        // fftw_complex[n]
    void* plan_backward_ = nullptr;
};

/// Reference sampler that factorizes the dense covariance matrix with a
/// symmetric eigendecomposition.  O(N^3) setup and O(N^2) per draw; rejected
/// above 256 cells.  Used to cross-check the spectral sampler.
class DenseNoiseSampler {
  public:
    DenseNoiseSampler(const Grid1D& grid, const NoiseModel& model,
                      const CorrelationKernel& kernel, double dt);

    void sample(std::mt19937_64& rng, std::vector<double>& out);

    /// Eigenvalues of the dense covariance matrix, ascending.
    const std::vector<double>& eigenvalues() const { return eigs_; }

  private:
    std::size_t n_ = 0;
    std::vector<double> factor_;  // row-major N x N, out = factor * z
    std::vector<double> eigs_;
};

/// Normalized spatial autocorrelation estimated from sampled fields:
/// result[r] = <e_i e_{i+r}> / <e_i^2>, averaged over cells (periodic) and
/// realizations.  result[0] == 1 whenever the fields are not identically 0.
std::vector<double> estimate_correlation(const std::vector<std::vector<double>>& fields,
                                         std::size_t max_lag);

}  // namespace sqha
