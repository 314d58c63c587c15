#pragma once

#include <string>
#include <vector>

namespace cscope {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  int width = 760;
  int height = 460;
};

/// Minimal SVG line chart: frame, ticks, polylines and a legend. Points with
/// non-finite coordinates (or x <= 0 on a log axis) are skipped.
std::string line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace cscope
