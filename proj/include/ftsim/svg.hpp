#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ftsim/common.hpp"

namespace ftsim {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<Real, Real>> points;
};

/// Minimal self-contained SVG line chart (no plotting dependency).
inline std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                                  const std::string& x_label, const std::string& y_label,
                                  int width = 800, int height = 450) {
  const Real ml = 60, mr = 20, mt = 40, mb = 45;
  Real x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  y0 = std::min(y0, 0.0);
  const Real pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](Real x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](Real y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" << title << "</text>\n";

  // Axes with a handful of ticks.
  out << "<g stroke=\"#333\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const Real xv = x0 + (x1 - x0) * k / 5;
    const Real yv = y0 + (y1 - y0) * k / 5;
    out << "<line x1=\"" << sx(xv) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(xv) << "\" y2=\""
        << mt + ph + 4 << "\"/>\n";
    out << "<text x=\"" << sx(xv) << "\" y=\"" << mt + ph + 16
        << "\" text-anchor=\"middle\" stroke=\"none\">" << std::round(xv * 1000) / 1000
        << "</text>\n";
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml << "\" y2=\""
        << sy(yv) << "\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" stroke=\"none\">" << std::round(yv * 1000) / 1000
        << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" stroke=\"none\">" << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 14 " << mt + ph / 2
      << ")\">" << y_label << "</text>\n";
  out << "</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].points) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << ml + pw - 6 << "\" y=\"" << mt + 16 + 16 * s
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << color
        << "\">" << series[s].name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ftsim
