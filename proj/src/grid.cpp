#include "sqha/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqha {

std::vector<double> Grid1D::coordinates() const {
    std::vector<double> qs(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) qs[i] = q(i);
    return qs;
}

std::size_t Grid1D::nearest_cell(double qq) const {
    const double x = (qq - q_min) / spacing() - 0.5;
    const auto i = static_cast<std::ptrdiff_t>(std::llround(x));
    const auto hi = static_cast<std::ptrdiff_t>(n_cells) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, hi));
}

std::size_t Grid1D::neighbor(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(n_cells);
    if (boundary == Boundary::periodic) {
        std::ptrdiff_t m = i % n;
        if (m < 0) m += n;
        return static_cast<std::size_t>(m);
    }
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1));
}

Grid1D make_grid(double q_min, double q_max, std::size_t n_cells, Boundary boundary) {
    std::string errors;
    auto add = [&errors](const std::string& msg) {
        if (!errors.empty()) errors += "; ";
        errors += msg;
    };
    if (!std::isfinite(q_min) || !std::isfinite(q_max)) add("grid bounds must be finite");
    if (!(q_max > q_min)) add("q_max must exceed q_min");
    if (n_cells < 8) add("n_cells must be at least 8");
    if (!errors.empty()) throw std::invalid_argument("make_grid: " + errors);
    return Grid1D{q_min, q_max, n_cells, boundary};
}

} // namespace sqha
