#pragma once

#include <string>
#include <vector>

#include "audbandit/simlab.hpp"

namespace audbandit::cli {

struct BoxSeries {
  std::string label;
  MetricSummary stats;
};

// A standalone SVG document with one box (q1..q3, median line, min/max
// whiskers, mean marker) per series, left to right.
std::string render_box_plot(const std::string& title, const std::string& y_label,
                            const std::vector<BoxSeries>& series);

}  // namespace audbandit::cli
