#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tunnelswarm {

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
/// `sorted` must be non-empty and ascending; p is clamped to [0, 1].
double quantile_type7(const std::vector<double>& sorted, double p);

struct BoxStats {
  std::size_t n = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  /// Most extreme data points within 1.5 IQR of the box.
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

/// Throws std::invalid_argument on empty input.
BoxStats box_stats(std::vector<double> values);

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

/// Self-contained SVG 1.1 document with one box per group. Groups without
/// values are labelled "no data"; so is the whole plot when every group is
/// empty or there are no groups.
std::string render_boxplot_svg(const std::vector<BoxGroup>& groups, const std::string& title,
                               const std::string& y_label);

}  // namespace tunnelswarm
