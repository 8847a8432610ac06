#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace subrec::chart {

using nlohmann::json;

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

// Figure-1-style bar chart from a summary JSON: one bar per strategy, or
// one group per graph order when by_order is set. Self-contained SVG,
// y axis fixed to [0, 1] and labeled "Recovery Probability".
inline std::string render_svg(const json& summary, bool by_order = false) {
  if (!summary.contains("strategies") || summary.at("strategies").empty())
    throw std::invalid_argument("chart: summary has no strategies");

  struct Series {
    std::string name;
    std::vector<std::pair<std::string, double>> bars;  // label -> probability
  };
  std::vector<Series> series;
  for (const auto& [name, js] : summary.at("strategies").items()) {
    Series s{name, {}};
    if (by_order) {
      if (!js.contains("per_order") || js.at("per_order").empty())
        throw std::invalid_argument("chart: summary has no per-order breakdown");
      for (const auto& [order, jo] : js.at("per_order").items())
        s.bars.push_back({order, jo.at("probability").get<double>()});
    } else {
      s.bars.push_back({"mean", js.at("mean").get<double>()});
    }
    series.push_back(std::move(s));
  }

  std::size_t groups = series.front().bars.size();
  const double plot_w = std::max<std::size_t>(groups, 1) * 90.0 + 40.0;
  const double plot_h = 240.0;
  const double left = 70.0, top = 30.0, bottom = 60.0;
  const double width = left + plot_w + 20.0;
  const double height = top + plot_h + bottom;

  static const char* fills[] = {"#4878a8", "#d08a42", "#6aa56a", "#a06ab0"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
      << "Recovery Probability of Replacement Strategies</text>\n";

  // axes and gridlines at 0, 0.25, ..., 1
  for (int i = 0; i <= 4; ++i) {
    double v = i * 0.25;
    double y = top + plot_h * (1.0 - v);
    svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt(v) << "</text>\n";
  }
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\">Recovery Probability</text>\n";

  double group_w = plot_w / static_cast<double>(groups);
  double bar_w = std::min(40.0, group_w / static_cast<double>(series.size() + 1));
  for (std::size_t g = 0; g < groups; ++g) {
    double gx = left + group_w * (static_cast<double>(g) + 0.5);
    double total = bar_w * static_cast<double>(series.size());
    for (std::size_t si = 0; si < series.size(); ++si) {
      double v = std::clamp(series[si].bars[g].second, 0.0, 1.0);
      double x = gx - total / 2.0 + bar_w * static_cast<double>(si);
      double h = plot_h * v;
      svg << "<rect x=\"" << x << "\" y=\"" << top + plot_h - h << "\" width=\"" << bar_w
          << "\" height=\"" << h << "\" fill=\"" << fills[si % 4] << "\"/>\n";
      svg << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << top + plot_h - h - 4
          << "\" text-anchor=\"middle\" font-size=\"10\">" << detail::fmt(v) << "</text>\n";
    }
    std::string label = by_order ? "order " + series.front().bars[g].first : "";
    if (!label.empty())
      svg << "<text x=\"" << gx << "\" y=\"" << top + plot_h + 16
          << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
  }

  // legend
  double lx = left, ly = top + plot_h + 34;
  for (std::size_t si = 0; si < series.size(); ++si) {
    svg << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\""
        << fills[si % 4] << "\"/>\n";
    svg << "<text x=\"" << lx + 18 << "\" y=\"" << ly
        << "\" font-size=\"12\">" << series[si].name << "</text>\n";
    lx += 120.0;
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace subrec::chart
