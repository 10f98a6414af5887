#pragma once

#include <string>
#include <vector>

namespace vcch {

// %.17g, with inf and nan spelled out
std::string format_number(double v);

// Comma separated table, numbers printed with format_number.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

// Line plot of one or more series with axes and a legend.
std::string svg_lines(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, int width = 640, int height = 400);

// Grayscale heatmap of values[it][ix] over the grid (dark = large).
std::string svg_heatmap(const std::string& title, const std::vector<double>& xs, const std::vector<double>& ts,
                        const std::vector<std::vector<double>>& values, int width = 640, int height = 400);

}  // namespace vcch
