#include "tunnelswarm/boxplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tunnelswarm {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 70.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  p = std::clamp(p, 0.0, 1.0);
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("box statistics of empty data");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.n = values.size();
  s.q1 = quantile_type7(values, 0.25);
  s.median = quantile_type7(values, 0.5);
  s.q3 = quantile_type7(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
    } else {
      s.whisker_low = std::min(s.whisker_low, v);
      s.whisker_high = std::max(s.whisker_high, v);
    }
  }
  return s;
}

std::string render_boxplot_svg(const std::vector<BoxGroup>& groups, const std::string& title,
                               const std::string& y_label) {
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         escape_xml(title) + "</text>\n";

  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& g : groups) {
    for (double v : g.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  if (!std::isfinite(lo)) {
    svg += "<text class=\"no-data\" x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight / 2) +
           "\" text-anchor=\"middle\" font-size=\"16\" fill=\"#666\">no data</text>\n";
    svg += "</svg>\n";
    return svg;
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double step = nice_step(hi - lo);
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  // Axes, grid and tick labels.
  svg += "<g stroke=\"#ccc\">\n";
  for (double t = lo; t <= hi + step * 1e-9; t += step) {
    svg += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + plot_w) + "\" y1=\"" +
           num(y_of(t)) + "\" y2=\"" + num(y_of(t)) + "\"/>\n";
  }
  svg += "</g>\n<g text-anchor=\"end\">\n";
  for (double t = lo; t <= hi + step * 1e-9; t += step) {
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y_of(t) + 4) + "\">" + tick_label(t) +
           "</text>\n";
  }
  svg += "</g>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft) + "\" y1=\"" + num(kTop) +
         "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + plot_w) + "\" y1=\"" +
         num(kTop + plot_h) + "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"18\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(kTop + plot_h / 2) + ")\">" + escape_xml(y_label) + "</text>\n";

  const double slot = plot_w / static_cast<double>(groups.size());
  const double box_w = std::min(60.0, slot * 0.5);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    svg += "<text x=\"" + num(cx) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + escape_xml(g.label) + "</text>\n";
    if (g.values.empty()) {
      svg += "<text class=\"no-data\" x=\"" + num(cx) + "\" y=\"" + num(kTop + plot_h / 2) +
             "\" text-anchor=\"middle\" fill=\"#666\">no data</text>\n";
      continue;
    }
    const BoxStats s = box_stats(g.values);
    const double x0 = cx - box_w / 2;
    svg += "<g class=\"box\" stroke=\"black\" fill=\"none\">\n";
    svg += "<line class=\"whisker\" x1=\"" + num(cx) + "\" x2=\"" + num(cx) + "\" y1=\"" +
           num(y_of(s.whisker_low)) + "\" y2=\"" + num(y_of(s.q1)) + "\"/>\n";
    svg += "<line class=\"whisker\" x1=\"" + num(cx) + "\" x2=\"" + num(cx) + "\" y1=\"" +
           num(y_of(s.q3)) + "\" y2=\"" + num(y_of(s.whisker_high)) + "\"/>\n";
    for (double w : {s.whisker_low, s.whisker_high}) {
      svg += "<line x1=\"" + num(cx - box_w / 4) + "\" x2=\"" + num(cx + box_w / 4) + "\" y1=\"" +
             num(y_of(w)) + "\" y2=\"" + num(y_of(w)) + "\"/>\n";
    }
    svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y_of(s.q3)) + "\" width=\"" + num(box_w) +
           "\" height=\"" + num(y_of(s.q1) - y_of(s.q3)) + "\" fill=\"#cfe2f3\"/>\n";
    svg += "<line class=\"median\" x1=\"" + num(x0) + "\" x2=\"" + num(x0 + box_w) + "\" y1=\"" +
           num(y_of(s.median)) + "\" y2=\"" + num(y_of(s.median)) + "\" stroke-width=\"2\"/>\n";
    for (double o : s.outliers) {
      svg += "<circle class=\"outlier\" cx=\"" + num(cx) + "\" cy=\"" + num(y_of(o)) + "\" r=\"3\"/>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace tunnelswarm
