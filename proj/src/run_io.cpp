#include "attrdesc/run_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "attrdesc/config.hpp"
#include "attrdesc/stats_io.hpp"

namespace attrdesc {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_trace_csv(const OptimizationTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace.records) {
    out += std::to_string(r.eval) + ',' + std::to_string(r.epoch) + ',' + std::to_string(r.coordinate) + ',' +
           format_double(r.candidate) + ',' + format_double(r.fid) + ',' + format_double(r.best_fid) + ',' +
           fixed(r.millis, 3) + '\n';
  }
  return out;
}

OptimizationTrace parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  OptimizationTrace trace;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (trim(line) != kTraceHeader) throw FormatError("line " + std::to_string(line_no) + ": unexpected header");
      header_seen = true;
      continue;
    }
    const auto fields = parse_string_list(line);
    if (fields.size() != 7)
      throw FormatError("line " + std::to_string(line_no) + ": expected 7 fields, found " +
                        std::to_string(fields.size()));
    try {
      TraceRecord r;
      r.eval = parse_unsigned(fields[0], "eval");
      r.epoch = parse_unsigned(fields[1], "epoch");
      r.coordinate = static_cast<std::int64_t>(parse_number(fields[2], "coordinate"));
      r.candidate = parse_number(fields[3], "candidate");
      r.fid = parse_number(fields[4], "fid");
      r.best_fid = parse_number(fields[5], "best_fid");
      r.millis = parse_number(fields[6], "millis");
      trace.records.push_back(r);
    } catch (const ConfigError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (trace.records.empty()) throw FormatError("no records");
  return trace;
}

void write_trace_csv(const OptimizationTrace& trace, const std::filesystem::path& path) {
  write_file_bytes(path, format_trace_csv(trace));
}

OptimizationTrace read_trace_csv(const std::filesystem::path& path) {
  return parse_trace_csv(read_file_bytes(path));
}

std::string format_result(const AttributeSchema& schema, const OptimResult& result, const ResultInfo& info) {
  std::string out;
  out += "schema = " + info.schema_ref + "\n";
  out += "target = " + info.target_ref + "\n";
  out += "method = " + result.method + "\n";
  out += "seed = " + std::to_string(info.seed) + "\n";
  out += "budget = " + std::to_string(info.budget) + "\n";
  out += "evaluations = " + std::to_string(result.trace.total_evaluations()) + "\n";
  out += "final_fid = " + format_double(result.final_fid) + "\n";
  out += "best_fid = " + format_double(result.best_fid) + "\n";
  const auto coords = coordinate_list(schema);
  const auto write_means = [&](const char* section, const DistributionParams& params) {
    out += std::string("\n[") + section + "]\n";
    if (params.means.size() != coords.size()) return;
    for (std::size_t i = 0; i < coords.size(); ++i)
      out += coordinate_label(schema, coords[i]) + " = " + format_double(params.means[i]) + "\n";
  };
  write_means("final_means", result.final_params);
  write_means("best_means", result.best_params);
  return out;
}

std::string render_svg_plot(const std::vector<PlotSeries>& series) {
  constexpr double width = 720, height = 440;
  constexpr double left = 70, right = 180, top = 30, bottom = 60;
  constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::size_t max_len = 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    max_len = std::max(max_len, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const auto x_of = [&](std::size_t i) {
    return left + (max_len > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(max_len - 1) : 0.0);
  };
  const auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h << "\"/>\n"
      << "</g>\n";
  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(y_of(v) + 4, 2) << "\" text-anchor=\"end\">"
        << fixed(v, 4) << "</text>\n";
    const std::size_t i = static_cast<std::size_t>(std::lround((max_len - 1) * t / 4.0));
    svg << "<text x=\"" << fixed(x_of(i), 2) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">" << i
        << "</text>\n";
  }
  svg << "</g>\n"
      << "<text class=\"xlabel\" x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">evaluation</text>\n"
      << "<text class=\"ylabel\" x=\"18\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 18 "
      << top + plot_h / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">best FID so far</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % std::size(palette)];
    svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      if (i) svg << ' ';
      svg << fixed(x_of(i), 2) << ',' << fixed(y_of(series[s].values[i]), 2);
    }
    svg << "\"/>\n";
  }
  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = top + 10 + 18.0 * static_cast<double>(s);
    svg << "<g class=\"legend-entry\"><line x1=\"" << left + plot_w + 15 << "\" y1=\"" << y << "\" x2=\""
        << left + plot_w + 35 << "\" y2=\"" << y << "\" stroke=\"" << palette[s % std::size(palette)]
        << "\" stroke-width=\"2\"/><text x=\"" << left + plot_w + 40 << "\" y=\"" << y + 4 << "\">"
        << xml_escape(series[s].label) << "</text></g>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace attrdesc
