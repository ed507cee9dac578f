#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace audbandit::cli {
namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
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

std::string render_box_plot(const std::string& title, const std::string& y_label,
                            const std::vector<BoxSeries>& series) {
  double lo = 0.0, hi = 1.0;
  if (!series.empty()) {
    lo = series.front().stats.min;
    hi = series.front().stats.max;
    for (const auto& s : series) {
      lo = std::min(lo, s.stats.min);
      hi = std::max(hi, s.stats.max);
    }
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double plot_h = kHeight - kTop - kBottom;
  const double plot_w = kWidth - kLeft - kRight;
  auto y = [&](double v) { return kTop + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
  svg << "<text transform=\"translate(16," << fmt(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << fmt(kTop + plot_h)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(kLeft + plot_w)
      << "\" y2=\"" << fmt(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt(y(v)) << "\" x2=\"" << kLeft << "\" y2=\"" << fmt(y(v))
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(y(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
        << "</text>\n";
  }

  const double slot = series.empty() ? plot_w : plot_w / static_cast<double>(series.size());
  const double box_w = std::min(60.0, slot * 0.5);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const MetricSummary& s = series[i].stats;
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double x0 = cx - box_w / 2, x1 = cx + box_w / 2;
    svg << "<g>\n";
    svg << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y(s.max)) << "\" x2=\"" << fmt(cx) << "\" y2=\""
        << fmt(y(s.q3)) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y(s.q1)) << "\" x2=\"" << fmt(cx) << "\" y2=\""
        << fmt(y(s.min)) << "\" stroke=\"black\"/>\n";
    for (double v : {s.min, s.max}) {
      svg << "<line x1=\"" << fmt(cx - box_w / 4) << "\" y1=\"" << fmt(y(v)) << "\" x2=\"" << fmt(cx + box_w / 4)
          << "\" y2=\"" << fmt(y(v)) << "\" stroke=\"black\"/>\n";
    }
    svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y(s.q3)) << "\" width=\"" << fmt(box_w) << "\" height=\""
        << fmt(std::max(0.0, y(s.q1) - y(s.q3))) << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y(s.median)) << "\" x2=\"" << fmt(x1) << "\" y2=\""
        << fmt(y(s.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    svg << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(y(s.mean)) << "\" r=\"3\" fill=\"#d62728\"/>\n";
    svg << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(kTop + plot_h + 18) << "\" text-anchor=\"middle\">"
        << escape(series[i].label) << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace audbandit::cli
