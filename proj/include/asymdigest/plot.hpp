// Copyright 2026 The asymdigest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// -----------------------------------------------------------------------------
// File: plot.hpp
// -----------------------------------------------------------------------------
//
// Reads bench report CSVs back and renders them as a standalone SVG: one
// box-and-whisker panel per error kind (whiskers p5..p95, box p25..p75,
// median line) positioned by axis_transform(q), plus an optional histogram of
// centroid counts. Output bytes depend only on the input rows.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymdigest/bench.hpp"

namespace asymdigest {

class csv_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw csv_error("row " + std::to_string(row) + ": column '" + column +
                    "' is not a number: '" + cell + "'");
  }
  return value;
}

// Reads a header plus numeric rows; returns, per row, the values of
// `required` columns in that order. Row numbers in messages count the header
// as row 1.
inline std::vector<std::vector<double>> read_numeric_csv(
    std::istream& in, const std::vector<std::string>& required) {
  std::string line;
  if (!std::getline(in, line)) throw csv_error("empty CSV");
  const auto header = split_csv_line(line);
  std::vector<std::size_t> index;
  for (const auto& name : required) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw csv_error("missing column '" + name + "'");
    index.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::vector<double>> rows;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw csv_error("row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < required.size(); ++i) {
      values.push_back(parse_cell(cells[index[i]], row, required[i]));
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

}  // namespace detail

inline std::vector<QuantileStats> read_quantile_csv(std::istream& in) {
  std::vector<QuantileStats> out;
  for (const auto& v : detail::read_numeric_csv(in, quantile_csv_columns())) {
    out.push_back({v[0], v[1], {v[2], v[3], v[4], v[5], v[6]}, {v[7], v[8], v[9], v[10], v[11]}});
  }
  return out;
}

inline std::vector<std::size_t> read_trials_csv(std::istream& in) {
  std::vector<std::size_t> counts;
  for (const auto& v : detail::read_numeric_csv(in, {"trial", "centroid_count"})) {
    if (v[1] < 0.0 || v[1] != std::floor(v[1])) {
      throw csv_error("centroid_count must be a non-negative integer");
    }
    counts.push_back(static_cast<std::size_t>(v[1]));
  }
  return counts;
}

enum class PlotPanels { Error, NormalizedError, Both };

namespace detail {

inline std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

struct PanelFrame {
  double left, top, width, height;
};

inline constexpr double kPanelWidth = 420.0;
inline constexpr double kPanelHeight = 300.0;
inline constexpr double kMargin = 50.0;

// Symmetric axis domain [-A, A] with A the larger of 3 and the widest probe,
// so q = 0.5 always sits in the middle.
inline double axis_extent(const std::vector<QuantileStats>& rows) {
  double extent = 3.0;
  for (const auto& r : rows) extent = std::max(extent, std::ceil(std::abs(r.axis)));
  return extent;
}

inline void render_box_panel(std::ostringstream& svg, const PanelFrame& frame,
                             const std::vector<QuantileStats>& rows, bool normalized) {
  const char* label = normalized ? "normalized error" : "error";
  const double extent = axis_extent(rows);
  double ymax = 0.0;
  for (const auto& r : rows) {
    ymax = std::max(ymax, normalized ? r.normalized_error.p95 : r.error.p95);
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.05;

  auto sx = [&](double axis) {
    return frame.left + (axis + extent) / (2.0 * extent) * frame.width;
  };
  auto sy = [&](double v) { return frame.top + frame.height * (1.0 - v / ymax); };

  svg << "<g class=\"panel\" data-panel=\"" << (normalized ? "nerr" : "err")
      << "\" data-axis-extent=\"" << format_number(extent) << "\" data-ymax=\""
      << format_number(ymax) << "\">\n";
  svg << "<rect x=\"" << fixed(frame.left) << "\" y=\"" << fixed(frame.top) << "\" width=\""
      << fixed(frame.width) << "\" height=\"" << fixed(frame.height)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << fixed(frame.left + frame.width / 2) << "\" y=\""
      << fixed(frame.top - 12) << "\" text-anchor=\"middle\">" << label << "</text>\n";
  for (int tick = -static_cast<int>(extent); tick <= static_cast<int>(extent); ++tick) {
    const double x = sx(tick);
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(frame.top + frame.height)
        << "\" x2=\"" << fixed(x) << "\" y2=\"" << fixed(frame.top + frame.height + 5)
        << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(frame.top + frame.height + 18)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << tick << "</text>\n";
  }
  svg << "<text x=\"" << fixed(frame.left - 6) << "\" y=\"" << fixed(frame.top + 4)
      << "\" text-anchor=\"end\" font-size=\"10\">" << format_number(ymax) << "</text>\n";

  const double half = std::min(12.0, frame.width / (4.0 * extent) * 0.6);
  for (const auto& r : rows) {
    const Percentiles& p = normalized ? r.normalized_error : r.error;
    const double x = sx(r.axis);
    svg << "<g class=\"box\" data-q=\"" << format_number(r.q) << "\" data-axis=\""
        << format_number(r.axis) << "\" data-p5=\"" << format_number(p.p5)
        << "\" data-p25=\"" << format_number(p.p25) << "\" data-p50=\""
        << format_number(p.p50) << "\" data-p75=\"" << format_number(p.p75)
        << "\" data-p95=\"" << format_number(p.p95) << "\">\n";
    svg << "<line class=\"whisker\" x1=\"" << fixed(x) << "\" y1=\"" << fixed(sy(p.p5))
        << "\" x2=\"" << fixed(x) << "\" y2=\"" << fixed(sy(p.p95)) << "\" stroke=\"#000\"/>\n";
    svg << "<rect class=\"iqr\" x=\"" << fixed(x - half) << "\" y=\"" << fixed(sy(p.p75))
        << "\" width=\"" << fixed(2 * half) << "\" height=\"" << fixed(sy(p.p25) - sy(p.p75))
        << "\" fill=\"#9ecae1\" stroke=\"#000\"/>\n";
    svg << "<line class=\"median\" x1=\"" << fixed(x - half) << "\" y1=\"" << fixed(sy(p.p50))
        << "\" x2=\"" << fixed(x + half) << "\" y2=\"" << fixed(sy(p.p50))
        << "\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
    svg << "</g>\n";
  }
  svg << "</g>\n";
}

inline void render_histogram(std::ostringstream& svg, const PanelFrame& frame,
                             const std::vector<std::size_t>& counts) {
  svg << "<g class=\"panel\" data-panel=\"centroids\">\n";
  svg << "<rect x=\"" << fixed(frame.left) << "\" y=\"" << fixed(frame.top) << "\" width=\""
      << fixed(frame.width) << "\" height=\"" << fixed(frame.height)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << fixed(frame.left + frame.width / 2) << "\" y=\""
      << fixed(frame.top - 12) << "\" text-anchor=\"middle\">centroid count</text>\n";
  if (!counts.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(counts.begin(), counts.end());
    const std::size_t lo = *lo_it;
    const std::size_t hi = *hi_it;
    const std::size_t bin_width = std::max<std::size_t>(1, (hi - lo + 30) / 30);
    const std::size_t bins = (hi - lo) / bin_width + 1;
    std::vector<std::size_t> freq(bins, 0);
    for (auto c : counts) ++freq[(c - lo) / bin_width];
    const double peak = static_cast<double>(*std::max_element(freq.begin(), freq.end()));
    const double bar = frame.width / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      const double h = frame.height * static_cast<double>(freq[b]) / peak;
      svg << "<rect class=\"bin\" data-from=\"" << lo + b * bin_width << "\" data-count=\""
          << freq[b] << "\" x=\"" << fixed(frame.left + b * bar) << "\" y=\""
          << fixed(frame.top + frame.height - h) << "\" width=\"" << fixed(bar)
          << "\" height=\"" << fixed(h) << "\" fill=\"#74c476\" stroke=\"#000\"/>\n";
    }
    svg << "<text x=\"" << fixed(frame.left) << "\" y=\"" << fixed(frame.top + frame.height + 18)
        << "\" font-size=\"10\">" << lo << "</text>\n";
    svg << "<text x=\"" << fixed(frame.left + frame.width) << "\" y=\""
        << fixed(frame.top + frame.height + 18) << "\" text-anchor=\"end\" font-size=\"10\">"
        << hi << "</text>\n";
  }
  svg << "</g>\n";
}

}  // namespace detail

/// Renders the report rows (and, when given, the centroid-count histogram).
inline std::string render_svg(const std::vector<QuantileStats>& rows,
                              const std::vector<std::size_t>* centroid_counts,
                              PlotPanels panels = PlotPanels::Both) {
  std::vector<bool> which;
  if (panels != PlotPanels::NormalizedError) which.push_back(false);
  if (panels != PlotPanels::Error) which.push_back(true);
  const std::size_t n_panels = which.size() + (centroid_counts ? 1 : 0);
  const double width = detail::kMargin + n_panels * (detail::kPanelWidth + detail::kMargin);
  const double height = detail::kPanelHeight + 2 * detail::kMargin;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fixed(width)
      << "\" height=\"" << detail::fixed(height) << "\" viewBox=\"0 0 " << detail::fixed(width)
      << ' ' << detail::fixed(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  double left = detail::kMargin;
  for (bool normalized : which) {
    detail::render_box_panel(
        svg, {left, detail::kMargin, detail::kPanelWidth, detail::kPanelHeight}, rows, normalized);
    left += detail::kPanelWidth + detail::kMargin;
  }
  if (centroid_counts) {
    detail::render_histogram(
        svg, {left, detail::kMargin, detail::kPanelWidth, detail::kPanelHeight}, *centroid_counts);
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace asymdigest
