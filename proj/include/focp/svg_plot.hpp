#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "focp/csv.hpp"

namespace focp {

namespace detail {

// 1-2-5 tick ladder covering [lo, hi] with about `want` divisions.
inline std::vector<double> nice_ticks(double lo, double hi, int want = 6) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw = (hi - lo) / want;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 0.5 * step; v += step)
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return ticks;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

/// Renders selected CSV columns against the time column as a self-contained
/// SVG line chart and writes it atomically. The input must carry a `t`
/// column; every requested channel must be present. An empty channel list is
/// rejected before anything is written.
inline void emit_plot(const std::filesystem::path& csv_path,
                      const std::vector<std::string>& channels,
                      const std::filesystem::path& out_path) {
  if (channels.empty())
    throw std::invalid_argument("emit_plot: channel list must not be empty");

  const CsvTable table = read_csv(csv_path);
  const int tcol = table.column("t");
  if (tcol < 0) throw std::runtime_error(csv_path.string() + ": no `t` column");

  std::vector<int> cols;
  for (const auto& ch : channels) {
    const int c = table.column(ch);
    if (c < 0) {
      std::string have;
      for (const auto& h : table.header) have += (have.empty() ? "" : ", ") + h;
      throw std::runtime_error("emit_plot: channel `" + ch + "` not in " + csv_path.string() +
                               " (columns: " + have + ")");
    }
    cols.push_back(c);
  }
  if (table.rows.empty()) throw std::runtime_error(csv_path.string() + ": no data rows");

  double tmin = table.rows.front()[tcol], tmax = tmin;
  double vmin = table.rows.front()[cols[0]], vmax = vmin;
  for (const auto& row : table.rows) {
    tmin = std::min(tmin, row[tcol]);
    tmax = std::max(tmax, row[tcol]);
    for (int c : cols) {
      vmin = std::min(vmin, row[c]);
      vmax = std::max(vmax, row[c]);
    }
  }
  if (vmax == vmin) {
    vmax += 1.0;
    vmin -= 1.0;
  }

  const double width = 860, height = 520;
  const double ml = 80, mr = 170, mt = 30, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double t) { return ml + pw * (t - tmin) / (tmax - tmin); };
  auto sy = [&](double v) { return mt + ph * (1.0 - (v - vmin) / (vmax - vmin)); };

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#17becf", "#e377c2"};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::tick_label(width) +
         "\" height=\"" + detail::tick_label(height) + "\" viewBox=\"0 0 " +
         detail::tick_label(width) + " " + detail::tick_label(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes and grid
  for (double tv : detail::nice_ticks(tmin, tmax)) {
    const double x = sx(tv);
    svg += "<line x1=\"" + detail::tick_label(x) + "\" y1=\"" + detail::tick_label(mt) +
           "\" x2=\"" + detail::tick_label(x) + "\" y2=\"" + detail::tick_label(mt + ph) +
           "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + detail::tick_label(x) + "\" y=\"" + detail::tick_label(mt + ph + 18) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + detail::tick_label(tv) + "</text>\n";
  }
  for (double vv : detail::nice_ticks(vmin, vmax)) {
    const double y = sy(vv);
    svg += "<line x1=\"" + detail::tick_label(ml) + "\" y1=\"" + detail::tick_label(y) +
           "\" x2=\"" + detail::tick_label(ml + pw) + "\" y2=\"" + detail::tick_label(y) +
           "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + detail::tick_label(ml - 8) + "\" y=\"" + detail::tick_label(y + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + detail::tick_label(vv) + "</text>\n";
  }
  svg += "<rect x=\"" + detail::tick_label(ml) + "\" y=\"" + detail::tick_label(mt) +
         "\" width=\"" + detail::tick_label(pw) + "\" height=\"" + detail::tick_label(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + detail::tick_label(ml + pw / 2) + "\" y=\"" +
         detail::tick_label(height - 12) +
         "\" font-size=\"14\" text-anchor=\"middle\">time (days)</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::tick_label(mt + ph / 2) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         detail::tick_label(mt + ph / 2) + ")\">value</text>\n";

  // series
  for (std::size_t s = 0; s < cols.size(); ++s) {
    std::string pts;
    for (const auto& row : table.rows) {
      pts += detail::tick_label(sx(row[tcol])) + "," + detail::tick_label(sy(row[cols[s]])) + " ";
    }
    const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
    const double ly = mt + 16 + 20 * static_cast<double>(s);
    svg += "<line x1=\"" + detail::tick_label(ml + pw + 14) + "\" y1=\"" + detail::tick_label(ly) +
           "\" x2=\"" + detail::tick_label(ml + pw + 42) + "\" y2=\"" + detail::tick_label(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::tick_label(ml + pw + 48) + "\" y=\"" +
           detail::tick_label(ly + 4) + "\" font-size=\"13\">" + channels[s] + "</text>\n";
  }
  svg += "</svg>\n";

  write_file_atomic(out_path, svg);
}

}  // namespace focp
