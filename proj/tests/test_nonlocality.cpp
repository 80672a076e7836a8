#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/nonlocality.hpp"
#include "sqha/output.hpp"
#include "sqha/quantum_potential.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

using namespace sqha;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Amplitude-one tail family: n = exp(-2 |q|^h), deliberately unnormalized so
// the fitted tail exponent carries no normalization bias.
WFMField tail_profile(const Grid1D& grid, double h) {
    WFMField f;
    f.n.resize(grid.n_cells);
    f.S.assign(grid.n_cells, 0.0);
    for (std::size_t i = 0; i < grid.n_cells; ++i)
        f.n[i] = std::exp(-2.0 * std::pow(std::abs(grid.q(i)), h));
    return f;
}

std::vector<double> synthetic_force(const Grid1D& grid,
                                    const std::function<double(double)>& f_of_q) {
    std::vector<double> force(grid.n_cells, 0.0);
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double q = grid.q(i);
        if (q > 0.0) force[i] = f_of_q(q) * q;  // integrand f = |force| / q
    }
    return force;
}

} // namespace

TEST_CASE("tail exponent is recovered exactly for a clean stretched exponential") {
    const Grid1D grid = make_grid(-10.0, 10.0, 1024, Boundary::clamped);
    const WFMField f = tail_profile(grid, 1.5);
    const TailFit fit = tail_exponent(f, grid, 2.5, 5.0);
    CHECK(fit.h == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fit.phi == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.residual < 1e-12);
    CHECK(fit.window_lo == 2.5);
    CHECK(fit.window_hi == 5.0);

    // Other exponents, same machinery.
    CHECK(tail_exponent(tail_profile(grid, 0.8), grid, 5.0, 8.0).h ==
          doctest::Approx(0.8).epsilon(1e-10));
    CHECK(tail_exponent(tail_profile(grid, 2.0), grid, 2.0, 3.4).h ==
          doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("tail exponent preconditions") {
    const Grid1D coarse = make_grid(-10.0, 10.0, 128, Boundary::clamped);
    const WFMField f = tail_profile(coarse, 1.5);
    // Not enough cells in a sliver window.
    CHECK_THROWS_AS(tail_exponent(f, coarse, 4.9, 5.0), std::invalid_argument);

    const Grid1D grid = make_grid(-10.0, 10.0, 1024, Boundary::clamped);
    const WFMField g = tail_profile(grid, 1.5);
    // Window reaching into the core, where n > 1e-3 of the peak.
    CHECK_THROWS_AS(tail_exponent(g, grid, 0.5, 3.0), std::invalid_argument);
    // Window reaching below the density floor.
    CHECK_THROWS_AS(tail_exponent(g, grid, 2.5, 6.5), std::invalid_argument);

    // A flat pedestal has no decay to fit.
    WFMField flat;
    flat.n.assign(grid.n_cells, 1e-5);
    flat.S.assign(grid.n_cells, 0.0);
    flat.n[grid.nearest_cell(0.0)] = 1.0;
    CHECK_THROWS_AS(tail_exponent(flat, grid, 2.5, 5.0), std::invalid_argument);
}

TEST_CASE("force integral: convergent power tail with analytic extension") {
    const Grid1D grid = make_grid(0.0, 200.0, 8192, Boundary::clamped);
    // force = 1/q, so the integrand |force|/q = q^-2 from q_min = 1.
    const auto force = synthetic_force(grid, [](double q) { return 1.0 / (q * q); });
    const ForceIntegralResult res = force_integral(force, grid, 1.0);
    CHECK(res.verdict == ConvergenceVerdict::converges);
    CHECK_FALSE(res.diverges);
    CHECK(res.value == doctest::Approx(1.0).epsilon(0.01));
    CHECK(res.power_fit_ok);
    CHECK(res.fitted_power == doctest::Approx(-2.0).epsilon(0.025));
    // Doubling windows [1,2], [2,4], ..., [64,128]: seven fit below 200.
    CHECK(res.n_windows == 7);
}

TEST_CASE("force integral: logarithmic growth is flagged as divergent") {
    const Grid1D grid = make_grid(0.0, 200.0, 8192, Boundary::clamped);
    // Constant force: integrand q^-1, every doubling window adds log 2.
    const auto force = synthetic_force(grid, [](double q) { return 1.0 / q; });
    const ForceIntegralResult res = force_integral(force, grid, 1.0);
    CHECK(res.verdict == ConvergenceVerdict::diverges);
    CHECK(res.diverges);
    CHECK(res.fitted_power == doctest::Approx(-1.0).epsilon(0.025));
    CHECK(res.cauchy_ratio > 0.9);
}

TEST_CASE("force integral: exactly dead tail converges by the window rule") {
    const Grid1D grid = make_grid(0.0, 200.0, 8192, Boundary::clamped);
    const auto force = synthetic_force(grid, [](double q) {
        return q < 4.0 ? 1.0 / (q * q) : 0.0;
    });
    const ForceIntegralResult res = force_integral(force, grid, 1.0);
    CHECK(res.verdict == ConvergenceVerdict::converges);
    // integral_1^4 q^-2 = 0.75, nothing beyond.
    CHECK(res.value == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("force integral: conflicting signals yield an honest indeterminate") {
    const Grid1D grid = make_grid(0.0, 200.0, 8192, Boundary::clamped);
    // Convergent q^-2 background plus a localized burst near q = 100: the
    // window trend sees late growth, the tail power fit still reads ~ -2.
    const auto force = synthetic_force(grid, [](double q) {
        const double dq = q - 100.0;
        return 1.0 / (q * q) + 0.2 * std::exp(-0.5 * dq * dq);
    });
    const ForceIntegralResult res = force_integral(force, grid, 1.0);
    CHECK(res.verdict == ConvergenceVerdict::indeterminate);
    CHECK(res.diverges);  // anything but a clean convergence counts divergent
}

TEST_CASE("force integral preconditions") {
    const Grid1D grid = make_grid(0.0, 8.0, 512, Boundary::clamped);
    const auto force = synthetic_force(grid, [](double) { return 1.0; });
    CHECK_THROWS_AS(force_integral(force, grid, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(force_integral(force, grid, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(force_integral(force, grid, 20.0), std::invalid_argument);
    std::vector<double> wrong(10, 1.0);
    CHECK_THROWS_AS(force_integral(wrong, grid, 1.0), std::invalid_argument);
}

TEST_CASE("nonlocality length of a compactly supported force") {
    const Grid1D grid = make_grid(0.0, 8.0, 1024, Boundary::clamped);
    // F = q up to q = 2, zero beyond: integrand f = 1 on (0, 2], so the
    // numerator is 2 * 2 and the denominator |F(1)| / 1 = 1.
    std::vector<double> force(grid.n_cells, 0.0);
    for (std::size_t i = 0; i < grid.n_cells; ++i) {
        const double q = grid.q(i);
        if (q <= 2.0) force[i] = q;
    }
    const LambdaLResult res = lambda_L(force, grid, 1.0);
    CHECK(res.status == LambdaLStatus::finite);
    CHECK(res.value == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("nonlocality length edge cases") {
    const Grid1D grid = make_grid(0.0, 8.0, 1024, Boundary::clamped);
    const std::vector<double> dead(grid.n_cells, 0.0);
    CHECK(lambda_L(dead, grid, 1.0).status == LambdaLStatus::undefined_zero_denominator);

    std::vector<double> alive(grid.n_cells, 1.0);
    CHECK_THROWS_AS(lambda_L(alive, grid, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(lambda_L(alive, grid, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lambda_L(alive, grid, kInf), std::invalid_argument);

    // A flat force never lets go of the tail: the integral diverges and the
    // length is reported infinite rather than number-ized.
    CHECK(lambda_L(alive, grid, 1.0).status == LambdaLStatus::infinite);
}

TEST_CASE("regime classification across the parameter plane") {
    // Deterministic limit: theta = 0 demands an infinite correlation length,
    // then hbar decides locality.
    CHECK(classify_regime(kInf, kInf, 1.0, 10.0, 0.0, 0.0) == Regime::local_deterministic);
    CHECK(classify_regime(kInf, kInf, 1.0, 10.0, 0.0, 1.0) == Regime::non_local_deterministic);

    // Fluctuating, resolution finer than 10 correlation lengths: microscopic.
    CHECK(classify_regime(1.0, 1.0, 5.0, 100.0, 0.5, 1.0) == Regime::microscopic_stochastic);

    // Macroscopic and the nonlocality length well under the resolution: local.
    CHECK(classify_regime(1.0, 1.0, 20.0, 100.0, 0.5, 1.0) ==
          Regime::macroscopic_local_stochastic);

    // Macroscopic but lambda_L comparable to the resolution: non-local.
    CHECK(classify_regime(1.0, 5.0, 20.0, 100.0, 0.5, 1.0) ==
          Regime::macroscopic_nonlocal_stochastic);
    CHECK(classify_regime(1.0, kInf, 20.0, 100.0, 0.5, 1.0) ==
          Regime::macroscopic_nonlocal_stochastic);

    // Threshold edges are inclusive the way the comparisons read:
    // resolution exactly 10 lambda_c is already macroscopic, lambda_L exactly
    // 0.1 resolution is still local.
    CHECK(classify_regime(1.0, 1.0, 10.0, 100.0, 0.5, 1.0) ==
          Regime::macroscopic_local_stochastic);
    CHECK(classify_regime(1.0, 2.0, 20.0, 100.0, 0.5, 1.0) ==
          Regime::macroscopic_local_stochastic);
}

TEST_CASE("regime classification rejects inconsistent inputs") {
    CHECK_THROWS_AS(classify_regime(1.0, 1.0, 5.0, 100.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(kInf, 1.0, 5.0, 100.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(1.0, 1.0, 50.0, 10.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(1.0, 1.0, -5.0, 100.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(classify_regime(1.0, 1.0, 5.0, 100.0, -0.5, 1.0), std::invalid_argument);
}

TEST_CASE("prefactor family admissibility") {
    CHECK(prefactor_admissible(0.0, 0));
    CHECK(prefactor_admissible(2.5, 1));
    CHECK(prefactor_admissible(-3.0, 1));
    CHECK_FALSE(prefactor_admissible(0.0, 2));
}

TEST_CASE("end-to-end analysis of a gaussian profile") {
    // n = exp(-2 q^2): v_qu = 1 - 2 q^2, force 4q, integrand constant 4.
    // The force never decays, the integral diverges, and the nonlocality
    // length is infinite: quantum behavior survives at every scale.
    const Grid1D grid = make_grid(-12.0, 12.0, 1024, Boundary::clamped);
    const WFMField f = tail_profile(grid, 2.0);

    NonlocalityParams params;
    params.tail_window_lo = 0.0;  // auto-window
    params.tail_window_hi = 0.0;
    params.integral_q_min = 0.5;
    params.lambda_c = 1.0;
    params.delta_omega_q = 10.0;
    params.delta_omega_c = 10.0;
    params.theta = 0.0;
    params.hbar = 1.0;

    const NonlocalityReport rep = analyze_nonlocality(f, grid, PhysicalConstants{}, params);
    CHECK(rep.tail.h == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(rep.tail.phi == doctest::Approx(-1.0).epsilon(1e-2));
    CHECK(rep.force.diverges);
    CHECK(rep.lambda_l.status == LambdaLStatus::infinite);
    CHECK(rep.regime == Regime::non_local_deterministic);
    CHECK(rep.prefactor_ok);

    const std::string line = nonlocality_verdict_line(rep);
    CHECK(line.find("force integral diverges") != std::string::npos);
    CHECK(line.find("lambda_L: infinite") != std::string::npos);
    CHECK(line.find("regime candidate: non-local") != std::string::npos);
}

TEST_CASE("end-to-end analysis of a simple-exponential profile") {
    // n = exp(-2 |q|): v_qu is constant away from the cusp, the force
    // vanishes, and nothing non-local survives; the denominator of the
    // length is zero, which the report surfaces as undefined.
    const Grid1D grid = make_grid(-14.0, 14.0, 2048, Boundary::clamped);
    const WFMField f = tail_profile(grid, 1.0);

    NonlocalityParams params;
    params.tail_window_lo = 4.0;
    params.tail_window_hi = 9.0;
    params.integral_q_min = 0.5;
    params.lambda_c = 2.0;
    params.delta_omega_q = 10.0;
    params.delta_omega_c = 10.0;
    params.theta = 0.0;
    params.hbar = 1.0;

    const NonlocalityReport rep = analyze_nonlocality(f, grid, PhysicalConstants{}, params);
    CHECK(rep.tail.h == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.force.verdict == ConvergenceVerdict::converges);
    CHECK(rep.force.value == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(rep.lambda_l.status == LambdaLStatus::undefined_zero_denominator);
}
