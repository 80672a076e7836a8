#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqha/field.hpp"
#include "sqha/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

using namespace sqha;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string thrown_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("grid geometry: spacing, centers, coordinates") {
    const Grid1D grid = make_grid(-8.0, 8.0, 128);
    CHECK(grid.spacing() == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(grid.length() == doctest::Approx(16.0).epsilon(1e-15));
    // Cell centers are offset half a spacing from the left edge.
    CHECK(grid.q(0) == doctest::Approx(-7.9375).epsilon(1e-15));
    CHECK(grid.q(127) == doctest::Approx(7.9375).epsilon(1e-15));

    const auto qs = grid.coordinates();
    REQUIRE(qs.size() == 128);
    CHECK(qs[0] == grid.q(0));
    CHECK(qs[64] == grid.q(64));

    // Spacing is boundary-independent: n_cells intervals either way.
    const Grid1D clamped = make_grid(-2.5, 2.5, 128, Boundary::clamped);
    CHECK(clamped.spacing() == doctest::Approx(0.0390625).epsilon(1e-15));
}

TEST_CASE("grid neighbor indexing wraps or clamps by boundary kind") {
    const Grid1D per = make_grid(0.0, 1.0, 16, Boundary::periodic);
    CHECK(per.neighbor(-1) == 15);
    CHECK(per.neighbor(-2) == 14);
    CHECK(per.neighbor(16) == 0);
    CHECK(per.neighbor(17) == 1);
    CHECK(per.neighbor(5) == 5);

    const Grid1D cl = make_grid(0.0, 1.0, 16, Boundary::clamped);
    CHECK(cl.neighbor(-1) == 0);
    CHECK(cl.neighbor(-2) == 0);
    CHECK(cl.neighbor(16) == 15);
    CHECK(cl.neighbor(17) == 15);
    CHECK(cl.neighbor(5) == 5);
}

TEST_CASE("grid nearest_cell clamps out-of-range queries") {
    const Grid1D grid = make_grid(-8.0, 8.0, 128);
    CHECK(grid.nearest_cell(grid.q(0)) == 0);
    CHECK(grid.nearest_cell(grid.q(77)) == 77);
    CHECK(grid.nearest_cell(-100.0) == 0);
    CHECK(grid.nearest_cell(100.0) == 127);
}

TEST_CASE("make_grid rejects bad domains and lists every violation") {
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(2.0, 1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 4), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(make_grid(0.0, inf, 64), std::invalid_argument);

    // Two problems at once: both must appear in the message.
    const std::string msg = thrown_message([] { (void)make_grid(2.0, 1.0, 4); });
    CHECK(msg.find("q_max must exceed q_min") != std::string::npos);
    CHECK(msg.find("n_cells must be at least 8") != std::string::npos);
}

TEST_CASE("integrate on a periodic grid is the plain Riemann sum") {
    const Grid1D grid = make_grid(0.0, 1.0, 16);
    const std::vector<double> f(16, 2.0);
    CHECK(integrate(f, grid) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("gaussian profile is normalized with zero action") {
    const Grid1D grid = make_grid(-8.0, 8.0, 256);
    const PhysicalConstants pc;
    const WFMField f = init_profile(grid, ProfileSpec::gaussian_profile(1.0, 0.5), pc);
    REQUIRE(f.n.size() == 256);
    REQUIRE(f.S.size() == 256);
    CHECK(integrate(f.n, grid) == doctest::Approx(1.0).epsilon(1e-13));
    for (double s : f.S) CHECK(s == 0.0);
    // Peak sits at the cell nearest the displaced center.
    const std::size_t imax =
        static_cast<std::size_t>(std::max_element(f.n.begin(), f.n.end()) - f.n.begin());
    CHECK(grid.q(imax) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("harmonic ground profile matches the analytic density") {
    // n(q) = sqrt(m w / (pi hbar)) exp(-m w q^2 / hbar); on a wide periodic
    // grid the Riemann sum of the gaussian equals its integral to far below
    // double rounding, so normalization leaves the analytic values intact.
    const Grid1D grid = make_grid(-8.0, 8.0, 1024);
    const PhysicalConstants pc;
    const WFMField f = init_profile(grid, ProfileSpec::harmonic_ground_profile(1.0), pc);
    CHECK(integrate(f.n, grid) == doctest::Approx(1.0).epsilon(1e-14));
    const std::size_t i0 = grid.nearest_cell(0.0);
    const double qc = grid.q(i0);
    const double expected = std::exp(-qc * qc) / std::sqrt(kPi);
    CHECK(f.n[i0] == doctest::Approx(expected).epsilon(1e-12));
    // And a point on the flank.
    const std::size_t i1 = grid.nearest_cell(1.3);
    const double q1 = grid.q(i1);
    CHECK(f.n[i1] == doctest::Approx(std::exp(-q1 * q1) / std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("stretched-exponential profile decays as exp(-2 |q/scale|^h)") {
    const Grid1D grid = make_grid(-10.0, 10.0, 512);
    const PhysicalConstants pc;
    const WFMField f = init_profile(grid, ProfileSpec::stretched_exp_profile(1.5, 2.0), pc);
    CHECK(integrate(f.n, grid) == doctest::Approx(1.0).epsilon(1e-13));
    // Density ratios are normalization-free: n(q)/n(q') = exp(-2(|q/s|^h - |q'/s|^h)).
    const std::size_t ia = grid.nearest_cell(2.0);
    const std::size_t ib = grid.nearest_cell(4.0);
    const double qa = grid.q(ia), qb = grid.q(ib);
    const double expected =
        std::exp(-2.0 * (std::pow(qb / 2.0, 1.5) - std::pow(qa / 2.0, 1.5)));
    CHECK(f.n[ib] / f.n[ia] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("table profile interpolates and normalizes") {
    const Grid1D grid = make_grid(-1.0, 1.0, 64, Boundary::clamped);
    const PhysicalConstants pc;
    ProfileSpec spec = ProfileSpec::table_profile({{-1.0, 0.0}, {0.0, 2.0}, {1.0, 0.0}});
    const WFMField f = init_profile(grid, spec, pc);
    CHECK(integrate(f.n, grid) == doctest::Approx(1.0).epsilon(1e-12));
    // Tent shape: value half way up the flank is half the peak.
    const double peak = *std::max_element(f.n.begin(), f.n.end());
    const std::size_t ih = grid.nearest_cell(0.5);
    CHECK(f.n[ih] / peak == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("normalize_density rejects non-positive mass") {
    const Grid1D grid = make_grid(0.0, 1.0, 16);
    std::vector<double> zero(16, 0.0);
    CHECK_THROWS_AS(normalize_density(zero, grid), std::exception);
}

TEST_CASE("field_distance on constant offset fields") {
    const Grid1D grid = make_grid(0.0, 1.0, 64);
    WFMField a, b;
    a.n.assign(64, 1.0);
    a.S.assign(64, 0.0);
    b.n.assign(64, 1.1);
    b.S.assign(64, 0.0);
    const FieldDistance d = field_distance(a, b, grid);
    // l2 = sqrt(sum dn^2 spacing) = sqrt(0.01 * 1) on a unit-length grid.
    CHECK(d.l2 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.linf == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("potential factories") {
    const Grid1D grid = make_grid(-2.0, 2.0, 64);
    const PhysicalConstants pc;
    const auto zero = zero_potential(grid);
    REQUIRE(zero.size() == 64);
    for (double v : zero) CHECK(v == 0.0);

    const auto harm = harmonic_potential(grid, pc, 2.0);
    REQUIRE(harm.size() == 64);
    const std::size_t i = grid.nearest_cell(1.0);
    const double q = grid.q(i);
    // V = m w^2 q^2 / 2 with m = 1, w = 2.
    CHECK(harm[i] == doctest::Approx(2.0 * q * q).epsilon(1e-14));
}
