#pragma once

// CSV is the source of truth for every result; SVG plots are derived from
// the same in-memory tables. Numbers are written in shortest round-trip
// form, so reading a file back reproduces the doubles exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "geepc/experiment.hpp"

namespace geepc {

inline constexpr std::string_view kExperimentHeader =
    "algorithm,target_sinr_db,mean_gee,mean_throughput,mean_total_power_w,mean_iterations,"
    "snapshots_used,snapshots_skipped";
inline constexpr std::string_view kConvergenceHeader =
    "algorithm,iteration,gee,total_throughput,total_power_w";
inline constexpr std::string_view kSnapshotHeader =
    "target_sinr_db,snapshot,seed,algorithm,gee,total_throughput,total_power_w,iterations,converged";

void write_experiment_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_snapshot_csv(std::ostream& out, const std::vector<SnapshotRow>& rows);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& points);

/// Readers throw IoError on a wrong header or a malformed line.
std::vector<ReportRow> read_experiment_csv(std::istream& in);
std::vector<SnapshotRow> read_snapshot_csv(std::istream& in);
std::vector<ConvergencePoint> read_convergence_csv(std::istream& in);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal standalone SVG line chart, one polyline per series plus legend.
std::string render_line_plot(std::string_view title, std::string_view x_label,
                             std::string_view y_label, const std::vector<PlotSeries>& series);

/// GEE against target SINR, one series per algorithm in the report.
std::vector<PlotSeries> gee_vs_target_series(const std::vector<ReportRow>& rows);
/// GEE against iteration, one series per algorithm.
std::vector<PlotSeries> gee_vs_iteration_series(const std::vector<ConvergencePoint>& points);

enum class OutputFormat { csv, csv_svg };

/// Throws ConfigError for anything but "csv" or "csv+svg".
OutputFormat parse_output_format(std::string_view s);

/// Writes experiment.csv and snapshots.csv (and gee_vs_target.svg) into
/// `dir`, creating it if needed. Throws IoError when a file cannot be written.
void emit_report(const ExperimentReport& report, OutputFormat format,
                 const std::filesystem::path& dir);

/// Writes convergence.csv (and gee_vs_iteration.svg) into `dir`.
void emit_convergence(const ConvergenceReport& report, OutputFormat format,
                      const std::filesystem::path& dir);

}  // namespace geepc
