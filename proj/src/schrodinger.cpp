#include "sqha/schrodinger.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sqha {

SplitStepOracle::SplitStepOracle(const Grid1D& grid, const PhysicalConstants& constants,
                                 std::vector<double> potential)
    : grid_(grid), constants_(constants), potential_(std::move(potential)) {
    if (grid_.boundary != Boundary::periodic)
        throw std::invalid_argument("SplitStepOracle: requires a periodic grid");
    if (potential_.size() != grid_.n_cells)
        throw std::invalid_argument("SplitStepOracle: potential size mismatch");

    const std::size_t n = grid_.n_cells;
    psi_.assign(n, {0.0, 0.0});
    k2_.resize(n);
    const double dk = 2.0 * std::numbers::pi / grid_.length();
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const auto half = static_cast<std::ptrdiff_t>(n) / 2;
        const double k = dk * static_cast<double>(jj <= half ? jj : jj - static_cast<std::ptrdiff_t>(n));
        k2_[j] = k * k;
    }
    auto* data = reinterpret_cast<fftw_complex*>(psi_.data());
    plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("SplitStepOracle: FFT plan failed");
}

SplitStepOracle::~SplitStepOracle() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void SplitStepOracle::initialize(const WFMField& field) {
    if (field.n.size() != grid_.n_cells || field.S.size() != grid_.n_cells)
        throw std::invalid_argument("SplitStepOracle: field size mismatch");
    for (std::size_t i = 0; i < grid_.n_cells; ++i) {
        const double amp = std::sqrt(std::max(field.n[i], 0.0));
        const double phase = field.S[i] / constants_.hbar;
        psi_[i] = {amp * std::cos(phase), amp * std::sin(phase)};
    }
}

void SplitStepOracle::initialize(const std::vector<std::complex<double>>& psi) {
    if (psi.size() != grid_.n_cells)
        throw std::invalid_argument("SplitStepOracle: psi size mismatch");
    psi_ = psi;
}

void SplitStepOracle::kinetic_phase(double dt, bool imaginary) {
    auto* data = reinterpret_cast<fftw_complex*>(psi_.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), data, data);
    const double scale = 1.0 / static_cast<double>(grid_.n_cells);
    const double c = constants_.hbar * dt / (2.0 * constants_.mass);
    for (std::size_t j = 0; j < grid_.n_cells; ++j) {
        if (imaginary) {
            psi_[j] *= std::exp(-c * k2_[j]) * scale;
        } else {
            const double ph = -c * k2_[j];
            psi_[j] *= std::complex<double>(std::cos(ph), std::sin(ph)) * scale;
        }
    }
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), data, data);
}

void SplitStepOracle::step(double dt) {
    const double half = dt / (2.0 * constants_.hbar);
    for (std::size_t i = 0; i < grid_.n_cells; ++i) {
        const double ph = -potential_[i] * half;
        psi_[i] *= std::complex<double>(std::cos(ph), std::sin(ph));
    }
    kinetic_phase(dt, false);
    for (std::size_t i = 0; i < grid_.n_cells; ++i) {
        const double ph = -potential_[i] * half;
        psi_[i] *= std::complex<double>(std::cos(ph), std::sin(ph));
    }
}

void SplitStepOracle::step_imaginary(double dtau) {
    const double half = dtau / (2.0 * constants_.hbar);
    for (std::size_t i = 0; i < grid_.n_cells; ++i)
        psi_[i] *= std::exp(-potential_[i] * half);
    kinetic_phase(dtau, true);
    for (std::size_t i = 0; i < grid_.n_cells; ++i)
        psi_[i] *= std::exp(-potential_[i] * half);
    const double nrm = norm();
    if (!(nrm > 0.0)) throw std::runtime_error("SplitStepOracle: norm vanished in imaginary time");
    const double s = 1.0 / std::sqrt(nrm);
    for (auto& p : psi_) p *= s;
}

std::size_t SplitStepOracle::relax_ground_state(double dtau, double tol, std::size_t max_steps) {
    std::vector<double> prev(grid_.n_cells);
    for (std::size_t s = 0; s < max_steps; ++s) {
        for (std::size_t i = 0; i < grid_.n_cells; ++i) prev[i] = std::norm(psi_[i]);
        step_imaginary(dtau);
        double dmax = 0.0;
        for (std::size_t i = 0; i < grid_.n_cells; ++i)
            dmax = std::max(dmax, std::abs(std::norm(psi_[i]) - prev[i]));
        if (dmax < tol) return s + 1;
    }
    return max_steps;
}

WFMField SplitStepOracle::field() const {
    WFMField f;
    f.n.resize(grid_.n_cells);
    for (std::size_t i = 0; i < grid_.n_cells; ++i) f.n[i] = std::norm(psi_[i]);
    f.S = unwrap_phase(psi_);
    for (double& s : f.S) s *= constants_.hbar;
    return f;
}

std::vector<std::complex<double>> SplitStepOracle::wavefunction() const { return psi_; }

double SplitStepOracle::norm() const {
    double acc = 0.0;
    for (const auto& p : psi_) acc += std::norm(p);
    return acc * grid_.spacing();
}

std::vector<double> unwrap_phase(const std::vector<std::complex<double>>& psi) {
    std::vector<double> phase(psi.size(), 0.0);
    if (psi.empty()) return phase;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double prev = std::arg(psi[0]);
    phase[0] = prev;
    for (std::size_t i = 1; i < psi.size(); ++i) {
        const double raw = std::arg(psi[i]);
        const double jump = std::round((prev - raw) / two_pi);
        const double unwrapped = raw + two_pi * jump;
        phase[i] = unwrapped;
        prev = unwrapped;
    }
    return phase;
}

} // namespace sqha
