#include "decaylab/svg.hpp"

#include <algorithm>
#include <cmath>

#include "decaylab/csv.hpp"

namespace decaylab {

void write_svg(const LogLogPlot& plot, const std::filesystem::path& path) {
  const int width = 640, height = 440;
  const int ml = 70, mr = 20, mt = 40, mb = 50;

  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (size_t i = 0; i < plot.x.size(); ++i) {
    if (plot.x[i] <= 0.0 || plot.y[i] <= 0.0) continue;
    xlo = std::min(xlo, std::log10(plot.x[i]));
    xhi = std::max(xhi, std::log10(plot.x[i]));
    ylo = std::min(ylo, std::log10(plot.y[i]));
    yhi = std::max(yhi, std::log10(plot.y[i]));
  }
  if (xlo > xhi) {
    xlo = 0.0;
    xhi = 1.0;
  }
  if (ylo > yhi) {
    ylo = -1.0;
    yhi = 0.0;
  }
  if (xhi - xlo < 1e-9) xhi = xlo + 1.0;
  if (yhi - ylo < 1e-9) yhi = ylo + 1.0;

  auto px = [&](double lx) { return ml + (lx - xlo) / (xhi - xlo) * (width - ml - mr); };
  auto py = [&](double ly) { return height - mb - (ly - ylo) / (yhi - ylo) * (height - mt - mb); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
       " " + std::to_string(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"monospace\" font-size=\"15\">" + plot.title + "</text>\n";

  // axes
  s += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(height - mb) +
       "\" x2=\"" + std::to_string(width - mr) + "\" y2=\"" + std::to_string(height - mb) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(mt) + "\" x2=\"" +
       std::to_string(ml) + "\" y2=\"" + std::to_string(height - mb) + "\" stroke=\"black\"/>\n";

  // decade ticks
  for (int d = static_cast<int>(std::ceil(xlo)); d <= static_cast<int>(std::floor(xhi)); ++d) {
    double x = px(d);
    s += "<line x1=\"" + CsvWriter::format(x) + "\" y1=\"" + std::to_string(height - mb) +
         "\" x2=\"" + CsvWriter::format(x) + "\" y2=\"" + std::to_string(height - mb + 6) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + CsvWriter::format(x) + "\" y=\"" + std::to_string(height - mb + 22) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">1e" +
         std::to_string(d) + "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ylo)); d <= static_cast<int>(std::floor(yhi)); ++d) {
    double y = py(d);
    s += "<line x1=\"" + std::to_string(ml - 6) + "\" y1=\"" + CsvWriter::format(y) + "\" x2=\"" +
         std::to_string(ml) + "\" y2=\"" + CsvWriter::format(y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + std::to_string(ml - 10) + "\" y=\"" + CsvWriter::format(y + 4) +
         "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">1e" +
         std::to_string(d) + "</text>\n";
  }

  // fitted line behind the points
  if (plot.has_fit) {
    double lx0 = xlo, lx1 = xhi;
    double ly0 = plot.fit_intercept + plot.fit_slope * lx0 * std::log(10.0);
    double ly1 = plot.fit_intercept + plot.fit_slope * lx1 * std::log(10.0);
    ly0 /= std::log(10.0);
    ly1 /= std::log(10.0);
    s += "<line x1=\"" + CsvWriter::format(px(lx0)) + "\" y1=\"" + CsvWriter::format(py(ly0)) +
         "\" x2=\"" + CsvWriter::format(px(lx1)) + "\" y2=\"" + CsvWriter::format(py(ly1)) +
         "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
  }

  for (size_t i = 0; i < plot.x.size(); ++i) {
    if (plot.x[i] <= 0.0 || plot.y[i] <= 0.0) continue;
    s += "<circle cx=\"" + CsvWriter::format(px(std::log10(plot.x[i]))) + "\" cy=\"" +
         CsvWriter::format(py(std::log10(plot.y[i]))) + "\" r=\"3\" fill=\"#2c3e50\"/>\n";
  }
  s += "</svg>\n";
  atomic_write(path, s);
}

}  // namespace decaylab
