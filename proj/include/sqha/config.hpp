#pragma once

#include "sqha/constants.hpp"
#include "sqha/ensemble.hpp"
#include "sqha/field.hpp"
#include "sqha/grid.hpp"
#include "sqha/noise.hpp"
#include "sqha/nonlocality.hpp"
#include "sqha/sqha.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqha {

/// Thrown by parse_config with the complete list of problems found, not just
/// the first: what() joins them, errors() keeps them separate.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

  private:
    std::vector<std::string> errors_;
};

enum class PotentialKind { none, harmonic, table };

/// Full run description, parsed from a sectioned key = value file.  Every
/// field has a default; whatever the file does not mention is filled in and
/// echoed into the output metadata so a run is self-describing.
struct RunConfig {
    // [constants]
    PhysicalConstants constants;

    // [grid]
    double grid_q_min = -6.4;
    double grid_q_max = 6.4;
    std::size_t grid_n_cells = 256;
    Boundary grid_boundary = Boundary::periodic;

    // [profile]
    ProfileSpec profile;

    // [potential]
    PotentialKind potential_kind = PotentialKind::none;
    double potential_omega = 1.0;
    std::string potential_table;

    // [noise]
    double theta = 0.0;
    double delta_l = 1.0;
    std::string kernel_spec = "gaussian";

    // [evolve]
    double dt = 1e-3;
    std::size_t n_steps = 100;
    double c_cfl = 0.1;
    Positivity positivity = Positivity::clip_renormalize;
    std::size_t reanchor_interval = 0;
    bool classical_companion = false;
    double mask_abort_fraction = 0.5;
    std::size_t snapshot_stride = 0;  // 0 = pick ~10 snapshots automatically

    // [ensemble]
    std::size_t n_realizations = 100;
    std::uint64_t base_seed = 12345;
    double window_lo = 0.0;
    double window_hi = std::numeric_limits<double>::infinity();

    // [scan]
    std::vector<double> scan_thetas;
    bool scan_synthetic = false;

    // [analyze]
    double tail_window_lo = 0.0;
    double tail_window_hi = 0.0;  // lo >= hi means auto-window
    double integral_q_min = 0.5;
    double analyze_lambda_c = 0.0;  // 0 = derive from theta (or 1.0 when theta = 0)
    double delta_omega_q = 1.0;
    double delta_omega_c = 1.0;
    double analyze_m_exp = 0.0;
    int analyze_p_deg = 0;
    RegimeThresholds thresholds;

    // [output]
    std::string output_dir = "out";
    bool emit_timestamp = true;

    // -- factories wiring the parsed values into the solver types --
    Grid1D make_run_grid() const;
    std::vector<double> make_run_potential(const Grid1D& grid) const;
    CorrelationKernel make_kernel() const;
    SqhaConfig make_sqha_config() const;
    EnsembleConfig make_ensemble_config(Exec exec) const;
    NonlocalityParams make_nonlocality_params(const PhysicalConstants& c) const;
};

/// Parses and validates a config file.  Strict: unknown sections or keys,
/// duplicates, malformed values, and domain violations are all collected and
/// reported together in one ConfigError.
RunConfig parse_config(const std::string& path);

/// Same, from an in-memory string (used by tests and by `--config -`).
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Loads a two-column (x, G) kernel table; accepts comma or whitespace
/// separators and '#' comment lines.
std::vector<std::pair<double, double>> load_kernel_table(const std::string& path);

}  // namespace sqha
