#pragma once

// Trace CSV, result documents, and SVG convergence plots.

#include <filesystem>
#include <string>
#include <vector>

#include "attrdesc/optimizer.hpp"

namespace attrdesc {

inline constexpr std::string_view kTraceHeader = "eval,epoch,coordinate,candidate,fid,best_fid,millis";

std::string format_trace_csv(const OptimizationTrace& trace);
/// Throws FormatError("line N: ...") on malformed rows and FormatError("no records") when empty.
OptimizationTrace parse_trace_csv(const std::string& text);
void write_trace_csv(const OptimizationTrace& trace, const std::filesystem::path& path);
OptimizationTrace read_trace_csv(const std::filesystem::path& path);

struct ResultInfo {
  std::string schema_ref;
  std::string target_ref;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
};

/// Key/value text in the configuration grammar; contains no timing, so it is
/// byte-identical across repeat runs.
std::string format_result(const AttributeSchema& schema, const OptimResult& result, const ResultInfo& info);

struct PlotSeries {
  std::string label;
  std::vector<double> values;  // best fid so far per evaluation
};

/// Standalone SVG with one polyline per series, axis labels, and a legend.
std::string render_svg_plot(const std::vector<PlotSeries>& series);

}  // namespace attrdesc
