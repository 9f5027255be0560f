#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace decaylab {

// Self-contained log-log scatter with one fitted line, written atomically.
struct LogLogPlot {
  std::string title;
  std::vector<double> x;       // positive
  std::vector<double> y;       // positive
  double fit_slope = 0.0;      // line through the data in log-log space
  double fit_intercept = 0.0;  // log y = intercept + slope log x
  bool has_fit = false;
};

void write_svg(const LogLogPlot& plot, const std::filesystem::path& path);

}  // namespace decaylab
