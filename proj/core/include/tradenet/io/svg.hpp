#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tradenet::io {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Optional band drawn behind the line (same length as x when present).
  std::vector<double> lo;
  std::vector<double> hi;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
  std::optional<double> y_min;
  std::optional<double> y_max;
  int width = 640;
  int height = 400;
};

// Self-contained SVG line chart with axes, ticks and a legend.
std::string RenderLineChart(const ChartSpec& spec);

}  // namespace tradenet::io
