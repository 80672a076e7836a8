#pragma once

#include <complex>
#include <vector>

#include "sqha/constants.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"

namespace sqha {

/// Split-step (Strang) Fourier integrator for the 1D Schrodinger equation on
/// a periodic grid.  Serves as the independent reference for the Madelung
/// solver: exactly norm-conserving, spectrally accurate in space, O(dt^2) in
/// time.  An imaginary-time variant relaxes toward the ground state of the
/// spectral Hamiltonian (renormalizing every step).
class SplitStepOracle {
  public:
    SplitStepOracle(const Grid1D& grid, const PhysicalConstants& constants,
                    std::vector<double> potential);
    ~SplitStepOracle();
    SplitStepOracle(const SplitStepOracle&) = delete;
    SplitStepOracle& operator=(const SplitStepOracle&) = delete;

    /// psi = sqrt(n) exp(i S / hbar).
    void initialize(const WFMField& field);
    void initialize(const std::vector<std::complex<double>>& psi);

    void step(double dt);
    void step_imaginary(double dtau);

    /// Relax to the ground state: imaginary-time evolution until the density
    /// change per step drops below tol (L-inf).  Returns the step count.
    std::size_t relax_ground_state(double dtau, double tol, std::size_t max_steps);

    /// n = |psi|^2 and S = hbar * (phase unwrapped cumulatively from the
    /// left edge, nearest-branch selection).
    WFMField field() const;
    std::vector<std::complex<double>> wavefunction() const;
    double norm() const;  // integral of |psi|^2

  private:
    void kinetic_phase(double dt, bool imaginary);

    Grid1D grid_;
    PhysicalConstants constants_;
    std::vector<double> potential_;
    std::vector<double> k2_;  // squared wavenumbers in FFT layout
    std::vector<std::complex<double>> psi_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

/// Cumulative nearest-branch phase unwrap used by SplitStepOracle::field.
std::vector<double> unwrap_phase(const std::vector<std::complex<double>>& psi);

} // namespace sqha
