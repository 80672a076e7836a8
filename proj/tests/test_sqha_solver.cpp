#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/madelung.hpp"
#include "sqha/sqha.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace sqha;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_CASE("zero temperature reduces to the deterministic stepper, bit for bit") {
    const Grid1D grid = make_grid(-6.4, 6.4, 128);
    const PhysicalConstants pc;
    const auto V = harmonic_potential(grid, pc, 1.0);
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(1.0, 0.3), pc);

    SqhaConfig cfg;
    cfg.theta = 0.0;
    SqhaSolver solver(grid, V, pc, cfg, 5e-4);
    SQHAState state = solver.make_state(init);
    std::mt19937_64 rng(99);
    for (int s = 0; s < 50; ++s) solver.step(state, rng);

    WFMField plain = init;
    for (int s = 0; s < 50; ++s) madelung_step(plain, grid, V, pc, 5e-4, cfg.madelung);

    CHECK(same_bits(state.field.n, plain.n));
    CHECK(same_bits(state.field.S, plain.S));
    // The companion too: with no noise all three trajectories coincide.
    CHECK(same_bits(state.companion.n, plain.n));
    CHECK(state.last_clip_fraction == 0.0);
}

TEST_CASE("companion is the noise-free trajectory of the same stepper") {
    const Grid1D grid = make_grid(-6.4, 6.4, 128);
    const PhysicalConstants pc;
    const auto V = harmonic_potential(grid, pc, 1.0);
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(1.0, 0.0), pc);

    SqhaConfig cfg;
    cfg.theta = 0.3;
    // Clipped tail cells sit at exact zero after a few increments; keep the
    // stepper from treating the masked tail as a failed realization.
    cfg.madelung.mask_abort_fraction = 1.0;
    SqhaSolver solver(grid, V, pc, cfg, 5e-4);
    SQHAState state = solver.make_state(init);
    std::mt19937_64 rng(1234);
    for (int s = 0; s < 10; ++s) solver.step(state, rng);

    WFMField plain = init;
    for (int s = 0; s < 10; ++s) madelung_step(plain, grid, V, pc, 5e-4, cfg.madelung);

    CHECK(same_bits(state.companion.n, plain.n));
    CHECK(same_bits(state.companion.S, plain.S));
    // The realization itself has picked up the increments.
    CHECK_FALSE(same_bits(state.field.n, plain.n));
}

TEST_CASE("identical seeds give identical realizations") {
    const Grid1D grid = make_grid(-6.4, 6.4, 64);
    const PhysicalConstants pc;
    const auto V = zero_potential(grid);
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(1.2, 0.0), pc);

    SqhaConfig cfg;
    cfg.theta = 0.2;
    cfg.madelung.mask_abort_fraction = 1.0;
    SqhaSolver solver(grid, V, pc, cfg, 5e-4);

    SQHAState a = solver.make_state(init);
    SQHAState b = solver.make_state(init);
    SQHAState c = solver.make_state(init);
    std::mt19937_64 ra(7), rb(7), rc(8);
    for (int s = 0; s < 5; ++s) {
        solver.step(a, ra);
        solver.step(b, rb);
        solver.step(c, rc);
    }
    CHECK(same_bits(a.field.n, b.field.n));
    CHECK(same_bits(a.field.S, b.field.S));
    CHECK_FALSE(same_bits(a.field.n, c.field.n));
}

TEST_CASE("positivity policies: renormalize pins the mass, clip-only drifts") {
    const Grid1D grid = make_grid(-6.4, 6.4, 128);
    const PhysicalConstants pc;
    const auto V = zero_potential(grid);
    // Narrow packet: the tail sits at rounding level, so increments clip.
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(0.5, 0.0), pc);

    SqhaConfig cfg;
    cfg.theta = 0.3;
    cfg.madelung.mask_abort_fraction = 1.0;

    // last_clip_fraction covers only the most recent step, and whether any
    // given step clips is up to the increment field, so track the maximum.
    cfg.positivity = Positivity::clip_renormalize;
    SqhaSolver renorm(grid, V, pc, cfg, 5e-4);
    SQHAState sr = renorm.make_state(init);
    std::mt19937_64 r1(31);
    double renorm_clip = 0.0;
    for (int s = 0; s < 10; ++s) {
        renorm.step(sr, r1);
        renorm_clip = std::max(renorm_clip, sr.last_clip_fraction);
    }
    CHECK(renorm_clip > 0.0);
    CHECK(integrate(sr.field.n, grid) == doctest::Approx(sr.anchor_mass).epsilon(1e-12));

    cfg.positivity = Positivity::clip_only;
    SqhaSolver clip(grid, V, pc, cfg, 5e-4);
    SQHAState sc = clip.make_state(init);
    std::mt19937_64 r2(31);
    double clip_clip = 0.0;
    for (int s = 0; s < 10; ++s) {
        clip.step(sc, r2);
        clip_clip = std::max(clip_clip, sc.last_clip_fraction);
    }
    CHECK(clip_clip > 0.0);
    CHECK(std::abs(integrate(sc.field.n, grid) - sc.anchor_mass) > 1e-10);
}

TEST_CASE("excess potential vanishes identically at zero temperature") {
    const Grid1D grid = make_grid(-6.4, 6.4, 128);
    const PhysicalConstants pc;
    const auto V = harmonic_potential(grid, pc, 1.0);
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(1.0, 0.2), pc);

    SqhaConfig cfg;
    cfg.theta = 0.0;
    SqhaSolver solver(grid, V, pc, cfg, 5e-4);
    SQHAState state = solver.make_state(init);
    std::mt19937_64 rng(3);
    for (int s = 0; s < 20; ++s) solver.step(state, rng);

    const QPField ex = solver.istar(state);
    for (double v : ex.v_qu) CHECK(v == 0.0);
}

TEST_CASE("excess potential picks up the fluctuations at finite temperature") {
    const Grid1D grid = make_grid(-6.4, 6.4, 128);
    const PhysicalConstants pc;
    const auto V = zero_potential(grid);
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(1.5, 0.0), pc);

    SqhaConfig cfg;
    cfg.theta = 0.2;
    cfg.madelung.mask_abort_fraction = 1.0;
    SqhaSolver solver(grid, V, pc, cfg, 5e-4);
    SQHAState state = solver.make_state(init);
    std::mt19937_64 rng(17);
    for (int s = 0; s < 3; ++s) solver.step(state, rng);

    const QPField ex = solver.istar(state);
    double worst = 0.0;
    for (std::size_t i = 0; i < ex.v_qu.size(); ++i)
        if (!ex.masked[i]) worst = std::max(worst, std::abs(ex.v_qu[i]));
    CHECK(worst > 1e-8);
}

TEST_CASE("re-anchoring adopts the realization density, keeps the phase") {
    const Grid1D grid = make_grid(-6.4, 6.4, 64);
    const PhysicalConstants pc;
    const auto V = zero_potential(grid);
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(1.2, 0.0), pc);

    SqhaConfig cfg;
    cfg.theta = 0.2;
    SqhaSolver solver(grid, V, pc, cfg, 5e-4);
    SQHAState state = solver.make_state(init);
    std::mt19937_64 rng(11);
    for (int s = 0; s < 4; ++s) solver.step(state, rng);
    CHECK_FALSE(same_bits(state.companion.n, state.field.n));

    const std::vector<double> phase_before = state.companion.S;
    solver.reanchor(state);
    CHECK(same_bits(state.companion.n, state.field.n));
    CHECK(same_bits(state.companion.S, phase_before));
    CHECK(state.anchor_mass == doctest::Approx(integrate(state.field.n, grid)).epsilon(1e-15));
}

TEST_CASE("periodic re-anchoring fires on the configured stride") {
    const Grid1D grid = make_grid(-6.4, 6.4, 64);
    const PhysicalConstants pc;
    const auto V = zero_potential(grid);
    const WFMField init = init_profile(grid, ProfileSpec::gaussian_profile(1.2, 0.0), pc);

    SqhaConfig cfg;
    cfg.theta = 0.2;
    cfg.reanchor_interval = 2;
    SqhaSolver solver(grid, V, pc, cfg, 5e-4);
    SQHAState state = solver.make_state(init);
    std::mt19937_64 rng(23);

    solver.step(state, rng);  // step 1: no re-anchor yet
    CHECK_FALSE(same_bits(state.companion.n, state.field.n));
    solver.step(state, rng);  // step 2: re-anchored
    CHECK(same_bits(state.companion.n, state.field.n));
    solver.step(state, rng);  // step 3: drifted apart again
    CHECK_FALSE(same_bits(state.companion.n, state.field.n));
}

TEST_CASE("classical companion exposes the quantum-potential feedback") {
    const Grid1D grid = make_grid(-6.4, 6.4, 128);
    const PhysicalConstants pc;
    const auto V = harmonic_potential(grid, pc, 1.0);
    const WFMField gs = fd_ground_state(grid, V, pc);

    SqhaConfig cfg;
    cfg.theta = 0.0;
    cfg.classical_companion = true;
    SqhaSolver solver(grid, V, pc, cfg, 1e-4);
    SQHAState state = solver.make_state(gs);
    std::mt19937_64 rng(1);
    for (int s = 0; s < 100; ++s) solver.step(state, rng);

    // The full dynamics holds the discrete ground state still while the
    // pressureless companion contracts; the excess potential sees the gap.
    const FieldDistance moved = field_distance(state.field, state.companion, grid);
    CHECK(moved.linf > 1e-7);
    const QPField ex = solver.istar(state);
    double worst = 0.0;
    for (std::size_t i = 0; i < ex.v_qu.size(); ++i)
        if (!ex.masked[i]) worst = std::max(worst, std::abs(ex.v_qu[i]));
    CHECK(worst > 1e-7);
}

TEST_CASE("classical state integrates the bypassed quantum action") {
    const Grid1D grid = make_grid(-6.4, 6.4, 128);
    const PhysicalConstants pc;

    SUBCASE("uniform density accumulates none") {
        const auto V = zero_potential(grid);
        SqhaConfig cfg;
        cfg.theta = 0.0;
        SqhaSolver solver(grid, V, pc, cfg, 1e-4);
        WFMField flat;
        flat.n.assign(128, 1.0 / grid.length());
        flat.S.assign(128, 0.0);
        ClassicalState state = solver.make_classical_state(flat);
        std::mt19937_64 rng(2);
        for (int s = 0; s < 5; ++s) solver.classical_step(state, rng);
        for (double s : state.s_qu) CHECK(s == 0.0);
    }

    SUBCASE("curved density accumulates -v_qu dt") {
        const auto V = harmonic_potential(grid, pc, 1.0);
        SqhaConfig cfg;
        cfg.theta = 0.0;
        const double dt = 1e-4;
        SqhaSolver solver(grid, V, pc, cfg, dt);
        const WFMField init = init_profile(grid, ProfileSpec::harmonic_ground_profile(1.0), pc);
        ClassicalState state = solver.make_classical_state(init);

        const QPField qp0 = qp_sqrt_form(init.n, grid, pc);
        const std::size_t i0 = grid.nearest_cell(0.0);

        std::mt19937_64 rng(2);
        solver.classical_step(state, rng);
        CHECK(state.s_qu[i0] == doctest::Approx(-dt * qp0.v_qu[i0]).epsilon(1e-3));
    }
}

TEST_CASE("coarse-graining length enters the noise strength as the fourth power") {
    const Grid1D grid = make_grid(-6.4, 6.4, 64);
    const PhysicalConstants pc;
    const auto V = zero_potential(grid);

    SqhaConfig cfg;
    cfg.theta = 1.0;
    cfg.delta_l = 1.0;
    SqhaSolver base(grid, V, pc, cfg, 1e-4);
    cfg.delta_l = 2.0;
    SqhaSolver coarse(grid, V, pc, cfg, 1e-4);
    CHECK(coarse.noise_model().g0 ==
          doctest::Approx(base.noise_model().g0 / 16.0).epsilon(1e-14));
    CHECK(coarse.noise_model().lambda_c ==
          doctest::Approx(base.noise_model().lambda_c).epsilon(1e-14));
}
