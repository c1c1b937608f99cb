#include "geepc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "geepc/errors.hpp"

namespace geepc {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(fmt::format("line {}: '{}' is not a number", line_no, s));
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::size_t line_no) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(fmt::format("line {}: '{}' is not an integer", line_no, s));
  }
  return v;
}

// Calls row(fields, line_no) for every data line after checking the header.
template <typename RowFn>
void read_table(std::istream& in, std::string_view header, std::size_t columns, RowFn&& row) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw IoError(fmt::format("unexpected CSV header '{}'", line));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != columns) {
      throw IoError(fmt::format("line {}: expected {} fields, got {}", line_no, columns, fields.size()));
    }
    row(fields, line_no);
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_experiment_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kExperimentHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.algorithm, r.target_sinr_db, r.mean_gee,
                       r.mean_throughput, r.mean_total_power_w, r.mean_iterations,
                       r.snapshots_used, r.snapshots_skipped);
  }
}

void write_snapshot_csv(std::ostream& out, const std::vector<SnapshotRow>& rows) {
  out << kSnapshotHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.target_sinr_db, r.snapshot, r.seed,
                       r.algorithm, r.gee, r.total_throughput, r.total_power_w, r.iterations,
                       r.converged ? 1 : 0);
  }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& points) {
  out << kConvergenceHeader << '\n';
  for (const auto& p : points) {
    out << fmt::format("{},{},{},{},{}\n", p.algorithm, p.iteration, p.gee, p.total_throughput,
                       p.total_power_w);
  }
}

std::vector<ReportRow> read_experiment_csv(std::istream& in) {
  std::vector<ReportRow> rows;
  read_table(in, kExperimentHeader, 8, [&](const auto& f, std::size_t n) {
    rows.push_back({std::string(f[0]), parse_double(f[1], n), parse_double(f[2], n),
                    parse_double(f[3], n), parse_double(f[4], n), parse_double(f[5], n),
                    parse_int<std::size_t>(f[6], n), parse_int<std::size_t>(f[7], n)});
  });
  return rows;
}

std::vector<SnapshotRow> read_snapshot_csv(std::istream& in) {
  std::vector<SnapshotRow> rows;
  read_table(in, kSnapshotHeader, 9, [&](const auto& f, std::size_t n) {
    rows.push_back({parse_double(f[0], n), parse_int<std::size_t>(f[1], n),
                    parse_int<std::uint64_t>(f[2], n), std::string(f[3]), parse_double(f[4], n),
                    parse_double(f[5], n), parse_double(f[6], n), parse_int<std::size_t>(f[7], n),
                    parse_int<int>(f[8], n) != 0});
  });
  return rows;
}

std::vector<ConvergencePoint> read_convergence_csv(std::istream& in) {
  std::vector<ConvergencePoint> points;
  read_table(in, kConvergenceHeader, 5, [&](const auto& f, std::size_t n) {
    points.push_back({std::string(f[0]), parse_int<std::size_t>(f[1], n), parse_double(f[2], n),
                      parse_double(f[3], n), parse_double(f[4], n)});
  });
  return points;
}

std::string render_line_plot(std::string_view title, std::string_view x_label,
                             std::string_view y_label, const std::vector<PlotSeries>& series) {
  constexpr double width = 640, height = 420;
  constexpr double left = 70, right = 150, top = 40, bottom = 55;
  constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto sy = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      width, height, left + plot_w / 2, escape_xml(title), left, top, plot_w, plot_h);

  for (int t = 0; t <= 4; ++t) {
    const double xv = x_min + (x_max - x_min) * t / 4.0;
    const double yv = y_min + (y_max - y_min) * t / 4.0;
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n"
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n",
        sx(xv), top + plot_h + 18, xv, left - 6, sy(yv) + 4, yv);
  }
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     left + plot_w / 2, height - 12, escape_xml(x_label));
  svg += fmt::format(
      "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
      top + plot_h / 2, top + plot_h / 2, escape_xml(y_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % std::size(palette)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), sy(s.y[i]));
    }
    svg += fmt::format(
        "<polyline class=\"series\" data-name=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
        "points=\"{}\"/>\n",
        escape_xml(s.name), color, pts);
    const double ly = top + 16 + 18.0 * static_cast<double>(k);
    svg += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n"
        "<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
        width - right + 10, ly, width - right + 30, ly, color, width - right + 36, ly + 4,
        escape_xml(s.name));
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<PlotSeries> gee_vs_target_series(const std::vector<ReportRow>& rows) {
  std::vector<PlotSeries> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.name == r.algorithm; });
    if (it == out.end()) {
      out.push_back({r.algorithm, {}, {}});
      it = std::prev(out.end());
    }
    it->x.push_back(r.target_sinr_db);
    it->y.push_back(r.mean_gee);
  }
  return out;
}

std::vector<PlotSeries> gee_vs_iteration_series(const std::vector<ConvergencePoint>& points) {
  std::vector<PlotSeries> out;
  for (const auto& p : points) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.name == p.algorithm; });
    if (it == out.end()) {
      out.push_back({p.algorithm, {}, {}});
      it = std::prev(out.end());
    }
    it->x.push_back(static_cast<double>(p.iteration));
    it->y.push_back(p.gee);
  }
  return out;
}

OutputFormat parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "csv+svg") return OutputFormat::csv_svg;
  throw ConfigError(fmt::format("unknown output format '{}' (expected csv or csv+svg)", s));
}

void emit_report(const ExperimentReport& report, OutputFormat format,
                 const std::filesystem::path& dir) {
  ensure_dir(dir);
  {
    const auto path = dir / "experiment.csv";
    auto out = open_output(path);
    write_experiment_csv(out, report.rows);
    finish(out, path);
  }
  {
    const auto path = dir / "snapshots.csv";
    auto out = open_output(path);
    write_snapshot_csv(out, report.snapshot_rows);
    finish(out, path);
  }
  if (format == OutputFormat::csv_svg) {
    const auto path = dir / "gee_vs_target.svg";
    auto out = open_output(path);
    out << render_line_plot("Average GEE vs. target SINR", "target SINR (dB)",
                            "GEE (bits/J/Hz)", gee_vs_target_series(report.rows));
    finish(out, path);
  }
}

void emit_convergence(const ConvergenceReport& report, OutputFormat format,
                      const std::filesystem::path& dir) {
  ensure_dir(dir);
  {
    const auto path = dir / "convergence.csv";
    auto out = open_output(path);
    write_convergence_csv(out, report.points);
    finish(out, path);
  }
  if (format == OutputFormat::csv_svg) {
    const auto path = dir / "gee_vs_iteration.svg";
    auto out = open_output(path);
    out << render_line_plot(fmt::format("Average GEE vs. iteration ({} dB)", report.target_sinr_db),
                            "iteration", "GEE (bits/J/Hz)",
                            gee_vs_iteration_series(report.points));
    finish(out, path);
  }
}

}  // namespace geepc
