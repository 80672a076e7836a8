#pragma once

#include "sqha/config.hpp"
#include "sqha/diagnostics.hpp"
#include "sqha/ensemble.hpp"
#include "sqha/nonlocality.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace sqha {

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal representation that round-trips to the same double.
/// Locale-free and deterministic, so artifacts built from it are
/// byte-reproducible.  Non-finite values come out as "inf", "-inf", "nan".
std::string format_double(double x);

/// Creates the directory (and parents) if missing; throws on failure.
void ensure_directory(const std::string& dir);

/// RFC-4180 style table: comma separators, CRLF row endings, fields quoted
/// when they contain a comma, quote, or newline.  The schema identifier is
/// written as a '#' comment line above the header row.
struct CsvTable {
    std::string schema;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool scatter = false;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 860;
    int height = 540;
};

/// Self-contained SVG 1.1 line/scatter plot; no external assets, no
/// timestamps, fixed formatting, so identical inputs give identical bytes.
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const PlotOptions& opt);

/// The full configuration, defaults included, as a JSON object mirroring the
/// config file sections.  Embedded in every report so runs are
/// self-describing.
ordered_json config_echo(const RunConfig& cfg);

/// The pinned diagnostics report block.
ordered_json diagnostics_json(const FluctuationStats& stats, const VarianceCheck& gradsq,
                              const VarianceCheck& laplacian, const CrossTermCheck& cross,
                              const QpVarianceCheck& qp);

ordered_json scaling_json(const ScalingFitResult& fit);

ordered_json nonlocality_json(const NonlocalityReport& report);

/// One-line human-readable summary of a nonlocality analysis.
std::string nonlocality_verdict_line(const NonlocalityReport& report);

/// Accumulates a run report and writes it as UTF-8 JSON.
///
/// The report always carries a schema version and the config echo.  The
/// timestamp and the wall-clock runtime are recorded only when the config
/// asks for timestamps: they are the only non-deterministic fields, so
/// suppressing them makes reruns byte-identical.
class ReportBuilder {
  public:
    explicit ReportBuilder(const RunConfig& cfg);

    void add_time_series(const std::string& name, const std::vector<double>& t,
                         const std::vector<double>& values);
    void set(const std::string& key, ordered_json value);
    void add_runtime(double wall_seconds, std::size_t total_steps);
    void write(const std::string& path) const;

    const ordered_json& root() const { return root_; }

  private:
    ordered_json root_;
    bool emit_timestamp_;
};

}  // namespace sqha
