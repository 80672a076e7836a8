#include "sqha/noise.hpp"

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqha {

namespace {

/// Covariance of two cells a wrapped distance `d` apart on a ring of length
/// `domain`.  The kernel is periodized by summing over wrap images so that
/// the circulant covariance stays positive semi-definite even when the
/// correlation length is comparable to the domain; for kernels short
/// relative to the domain the images are negligible.
double periodized_kernel(const CorrelationKernel& kernel, double d, double domain,
                         double lambda_c) {
    double acc = 0.0;
    for (int m = -3; m <= 3; ++m) {
        acc += kernel((d + m * domain) / lambda_c);
    }
    return acc;
}

}  // namespace

NoiseModel make_noise_model(const PhysicalConstants& constants, double theta,
                            double delta_l) {
    if (!(theta >= 0.0))
        throw std::invalid_argument("make_noise_model: theta must be >= 0, got " +
                                    std::to_string(theta));
    if (!(delta_l > 0.0))
        throw std::invalid_argument("make_noise_model: delta_l must be > 0, got " +
                                    std::to_string(delta_l));
    if (!(constants.mass > 0.0) || !(constants.boltzmann > 0.0))
        throw std::invalid_argument("make_noise_model: mass and boltzmann must be > 0");

    NoiseModel model;
    model.theta = theta;
    model.delta_l = delta_l;
    if (theta == 0.0) {
        // Deterministic limit: infinite correlation length, zero amplitude.
        model.lambda_c = std::numeric_limits<double>::infinity();
        model.g0 = 0.0;
        return model;
    }
    if (!(constants.hbar > 0.0))
        throw std::invalid_argument(
            "make_noise_model: theta > 0 with hbar = 0 drives the correlation "
            "length to zero; the white-noise limit is not representable on a grid");

    const double kt = constants.boltzmann * theta;
    model.lambda_c = std::pow(M_PI / 2.0, 1.5) * constants.hbar /
                     std::sqrt(2.0 * constants.mass * kt);
    const double pi3 = M_PI * M_PI * M_PI;
    const double l4 = delta_l * delta_l * delta_l * delta_l;
    model.g0 = 8.0 * constants.mass * kt * kt /
               (pi3 * constants.hbar * constants.hbar * constants.hbar * l4);
    return model;
}

double CorrelationKernel::operator()(double x) const {
    const double ax = std::abs(x);
    if (kind == Kind::gaussian) return std::exp(-ax * ax);
    // table: linear interpolation, zero beyond the last node
    if (ax >= table.back().first) {
        return ax == table.back().first ? table.back().second : 0.0;
    }
    auto hi = std::upper_bound(table.begin(), table.end(), ax,
                               [](double v, const std::pair<double, double>& node) {
                                   return v < node.first;
                               });
    if (hi == table.begin()) return table.front().second;
    const auto lo = std::prev(hi);
    const double t = (ax - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

CorrelationKernel gaussian_kernel() {
    CorrelationKernel k;
    k.kind = CorrelationKernel::Kind::gaussian;
    return k;
}

CorrelationKernel table_kernel(std::vector<std::pair<double, double>> nodes) {
    if (nodes.size() < 2)
        throw std::invalid_argument("table_kernel: need at least two nodes");
    if (nodes.front().first != 0.0 || std::abs(nodes.front().second - 1.0) > 1e-12)
        throw std::invalid_argument("table_kernel: first node must be (0, 1)");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i].first > nodes[i - 1].first))
            throw std::invalid_argument("table_kernel: node positions must be ascending");
        if (!std::isfinite(nodes[i].second))
            throw std::invalid_argument("table_kernel: node values must be finite");
    }
    CorrelationKernel k;
    k.kind = CorrelationKernel::Kind::table;
    k.table = std::move(nodes);
    return k;
}

KernelTaylor kernel_taylor_coeffs(const CorrelationKernel& kernel) {
    // One-sided degree-8 least-squares model over [0, w], read off at the
    // origin.  The window must stay one-sided: a kink at zero (|x|-type
    // kernels) only shows up in the odd coefficients when no negative
    // samples average it away.  Fitting four degrees past the reported
    // coefficients pushes the truncation bias of a0..a4 below 1e-7 for
    // analytic kernels; the solve runs in extended precision because the
    // monomial normal directions are poorly conditioned and a4 divides by
    // w^4 on the way out.
    using Scalar = long double;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    constexpr int degree = 8;
    constexpr int n_samples = 65;
    constexpr double w = 0.1;

    Matrix design(n_samples, degree + 1);
    Vector rhs(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double x = w * static_cast<double>(i + 1) / n_samples;
        const Scalar u = static_cast<Scalar>(x / w);  // scaled to (0, 1]
        Scalar up = 1.0L;
        for (int j = 0; j <= degree; ++j) {
            design(i, j) = up;
            up *= u;
        }
        rhs(i) = static_cast<Scalar>(kernel(x));
    }
    const Vector coeff = design.colPivHouseholderQr().solve(rhs);

    KernelTaylor out;
    Scalar wp = 1.0L;
    for (std::size_t j = 0; j < out.a.size(); ++j) {
        out.a[j] = static_cast<double>(coeff(static_cast<Eigen::Index>(j)) / wp);
        wp *= static_cast<Scalar>(w);
    }
    out.fit_residual = static_cast<double>(
        std::sqrt(static_cast<double>((design * coeff - rhs).squaredNorm()) / n_samples));
    return out;
}

KernelAdmissibility check_kernel_admissible(const CorrelationKernel& kernel) {
    const KernelTaylor t = kernel_taylor_coeffs(kernel);
    KernelAdmissibility res;
    if (std::abs(t.a[0] - 1.0) > 1e-6) {
        res.reason = "kernel is not normalized: G(0) = " + std::to_string(t.a[0]);
        return res;
    }
    if (std::abs(t.a[1]) > 1e-4) {
        res.reason = "kernel has an odd linear term near the origin (a1 = " +
                     std::to_string(t.a[1]) +
                     "); single-cell increment variance would scale with the first "
                     "power of the grid spacing";
        return res;
    }
    if (!(t.a[2] < 0.0)) {
        res.reason = "kernel is not concave at the origin (a2 = " + std::to_string(t.a[2]) +
                     "); gradient statistics of the noise field would not be stationary";
        return res;
    }
    if (std::abs(t.a[3]) > 1e-4) {
        res.reason = "kernel has an odd cubic term near the origin (a3 = " +
                     std::to_string(t.a[3]) + ")";
        return res;
    }
    res.admissible = true;
    res.reason = "kernel expansion is even and concave at the origin";
    return res;
}

DiscreteKernelLimits discrete_kernel_limits(const CorrelationKernel& kernel) {
    // Each quantity has an O(l^2) relative error; one Richardson stage with a
    // factor-2 spacing ratio removes it.
    const auto richardson2 = [](double coarse, double fine) {
        return (4.0 * fine - coarse) / 3.0;
    };
    const double l = 0.02;
    const auto eval = [&](double s) {
        const double g1 = kernel(s);
        const double g2 = kernel(2.0 * s);
        const double s2 = s * s;
        DiscreteKernelLimits v;
        v.one_minus_g = (1.0 - g1) / s2;
        v.one_minus_g_squared = (1.0 - g1) * (1.0 - g1) / (s2 * s2);
        v.second_difference = (3.0 + g2 - 4.0 * g1) / (s2 * s2);
        return v;
    };
    const DiscreteKernelLimits coarse = eval(l);
    const DiscreteKernelLimits fine = eval(l / 2.0);
    DiscreteKernelLimits out;
    out.one_minus_g = richardson2(coarse.one_minus_g, fine.one_minus_g);
    out.one_minus_g_squared = richardson2(coarse.one_minus_g_squared, fine.one_minus_g_squared);
    out.second_difference = richardson2(coarse.second_difference, fine.second_difference);
    return out;
}

NoiseSampler::NoiseSampler(const Grid1D& grid, const NoiseModel& model,
                           const CorrelationKernel& kernel, double dt) {
    if (grid.boundary != Boundary::periodic)
        throw std::invalid_argument("NoiseSampler: spectral sampling requires a periodic grid");
    if (!(dt >= 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("NoiseSampler: dt must be finite and >= 0");
    n_ = grid.n_cells;
    cov_row_.resize(n_);
    eigs_.assign(n_, 0.0);
    scale_.assign(n_, 0.0);

    const double amp = model.g0 * dt;
    const double spacing = grid.spacing();
    const double domain = grid.q_max - grid.q_min;
    for (std::size_t j = 0; j < n_; ++j) {
        const double d = static_cast<double>(std::min(j, n_ - j)) * spacing;
        cov_row_[j] = amp * periodized_kernel(kernel, d, domain, model.lambda_c);
    }
    if (amp == 0.0) {
        zero_amplitude_ = true;
        return;
    }

    buf_ = fftw_malloc(sizeof(fftw_complex) * n_);
    if (buf_ == nullptr) throw std::bad_alloc();
    auto* b = static_cast<fftw_complex*>(buf_);
    const int ni = static_cast<int>(n_);

    fftw_plan forward = fftw_plan_dft_1d(ni, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_backward_ = fftw_plan_dft_1d(ni, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (std::size_t j = 0; j < n_; ++j) {
        b[j][0] = cov_row_[j];
        b[j][1] = 0.0;
    }
    fftw_execute(forward);
    fftw_destroy_plan(forward);

    double max_eig = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
        eigs_[k] = b[k][0];
        max_eig = std::max(max_eig, eigs_[k]);
    }
    if (!(max_eig > 0.0))
        throw std::runtime_error("NoiseSampler: covariance spectrum is not positive");
    const double tol = 1e-12 * max_eig;
    for (std::size_t k = 0; k < n_; ++k) {
        if (eigs_[k] < -tol)
            throw std::runtime_error(
                "NoiseSampler: correlation kernel is not positive semi-definite on "
                "this grid (eigenvalue " + std::to_string(eigs_[k]) + " at mode " +
                std::to_string(k) + ")");
        // The spectrum comes out of an FFT, so entries this small are rounding
        // debris, not signal.  Keeping the positive debris would seed the
        // samples with white cell-scale jitter that curvature stencils then
        // amplify by 1 / spacing^4; zero everything below the tolerance.
        if (eigs_[k] < tol) {
            if (eigs_[k] != 0.0) ++n_clipped_;
            eigs_[k] = 0.0;
        }
    }
    // mu_k = mu_{N-k} analytically; symmetrize so the sampled spectrum is
    // exactly hermitian
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        const double mu = 0.5 * (eigs_[k] + eigs_[(n_ - k) % n_]);
        scale_[k] = std::sqrt(mu * inv_n);
    }
}

NoiseSampler::~NoiseSampler() {
    if (plan_backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
    if (buf_ != nullptr) fftw_free(buf_);
}

void NoiseSampler::sample(std::mt19937_64& rng, std::vector<double>& out) {
    out.assign(n_, 0.0);
    if (zero_amplitude_) return;

    auto* b = static_cast<fftw_complex*>(buf_);
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr double inv_sqrt2 = 0.70710678118654752440;

    b[0][0] = scale_[0] * normal(rng);
    b[0][1] = 0.0;
    if (n_ % 2 == 0) {
        b[n_ / 2][0] = scale_[n_ / 2] * normal(rng);
        b[n_ / 2][1] = 0.0;
    }
    for (std::size_t k = 1; 2 * k < n_; ++k) {
        const double re = normal(rng) * inv_sqrt2;
        const double im = normal(rng) * inv_sqrt2;
        b[k][0] = scale_[k] * re;
        b[k][1] = scale_[k] * im;
        b[n_ - k][0] = scale_[k] * re;
        b[n_ - k][1] = -scale_[k] * im;
    }

    fftw_execute(static_cast<fftw_plan>(plan_backward_));
    for (std::size_t j = 0; j < n_; ++j) out[j] = b[j][0];
}

std::vector<double> NoiseSampler::sample(std::mt19937_64& rng) {
    std::vector<double> out;
    sample(rng, out);
    return out;
}

DenseNoiseSampler::DenseNoiseSampler(const Grid1D& grid, const NoiseModel& model,
                                     const CorrelationKernel& kernel, double dt) {
    if (grid.boundary != Boundary::periodic)
        throw std::invalid_argument("DenseNoiseSampler: requires a periodic grid");
    if (grid.n_cells > 256)
        throw std::invalid_argument(
            "DenseNoiseSampler: reference factorization is limited to 256 cells, got " +
            std::to_string(grid.n_cells));
    n_ = grid.n_cells;
    const double amp = model.g0 * dt;
    const double spacing = grid.spacing();
    const double domain = grid.q_max - grid.q_min;
    const auto ni = static_cast<Eigen::Index>(n_);

    Eigen::MatrixXd cov(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index j = 0; j < ni; ++j) {
            const auto lag = static_cast<std::size_t>(std::abs(i - j));
            const double d = static_cast<double>(std::min(lag, n_ - lag)) * spacing;
            cov(i, j) = amp * periodized_kernel(kernel, d, domain, model.lambda_c);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("DenseNoiseSampler: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    const double max_eig = ev.size() > 0 ? ev.maxCoeff() : 0.0;
    const double tol = 1e-12 * std::max(max_eig, 0.0);
    for (Eigen::Index k = 0; k < ni; ++k) {
        if (ev[k] < -tol && amp > 0.0)
            throw std::runtime_error(
                "DenseNoiseSampler: covariance is not positive semi-definite "
                "(eigenvalue " + std::to_string(ev[k]) + ")");
        if (ev[k] < 0.0) ev[k] = 0.0;
    }
    eigs_.assign(ev.data(), ev.data() + ev.size());

    Eigen::MatrixXd factor = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
    factor_.resize(n_ * n_);
    for (Eigen::Index i = 0; i < ni; ++i)
        for (Eigen::Index j = 0; j < ni; ++j)
            factor_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)] =
                factor(i, j);
}

void DenseNoiseSampler::sample(std::mt19937_64& rng, std::vector<double>& out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(n_);
    for (std::size_t j = 0; j < n_; ++j) z[j] = normal(rng);
    out.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        const double* row = factor_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) acc += row[j] * z[j];
        out[i] = acc;
    }
}

std::vector<double> estimate_correlation(const std::vector<std::vector<double>>& fields,
                                         std::size_t max_lag) {
    if (fields.empty()) throw std::invalid_argument("estimate_correlation: no fields");
    const std::size_t n = fields.front().size();
    if (max_lag >= n)
        throw std::invalid_argument("estimate_correlation: max_lag must be below the field size");
    for (const auto& f : fields)
        if (f.size() != n)
            throw std::invalid_argument("estimate_correlation: fields have mixed sizes");

    std::vector<double> acc(max_lag + 1, 0.0);
    for (const auto& f : fields) {
        for (std::size_t r = 0; r <= max_lag; ++r) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += f[i] * f[(i + r) % n];
            acc[r] += s;
        }
    }
    if (acc[0] <= 0.0) return std::vector<double>(max_lag + 1, 0.0);
    const double inv = 1.0 / acc[0];
    for (double& v : acc) v *= inv;
    return acc;
}

}  // namespace sqha
