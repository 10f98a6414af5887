#include "vcch/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vcch {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_number(r[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("error while writing " + path);
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

// short form for axis labels and coordinates
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  int width, height;
  int left = 70, right = 20, top = 40, bottom = 50;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

void axes(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xl,
          const std::string& yl) {
  os << "<text x=\"" << f.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
  os << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.width - f.left - f.right
     << "\" height=\"" << f.height - f.top - f.bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double x = f.x0 + (f.x1 - f.x0) * i / 4, y = f.y0 + (f.y1 - f.y0) * i / 4;
    os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << f.height - f.bottom + 16
       << "\" text-anchor=\"middle\" font-size=\"11\">" << num(x) << "</text>\n";
    os << "<text x=\"" << f.left - 6 << "\" y=\"" << num(f.py(y) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << num(y) << "</text>\n";
  }
  os << "<text x=\"" << f.width / 2 << "\" y=\"" << f.height - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << escape(xl) << "</text>\n";
  os << "<text x=\"16\" y=\"" << f.height / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << f.height / 2 << ")\">" << escape(yl) << "</text>\n";
}

void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    double m = std::max(1.0, std::fabs(lo));
    lo -= 0.5 * m;
    hi += 0.5 * m;
  }
}

}  // namespace

std::string svg_lines(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series, int width, int height) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  widen(x0, x1);
  widen(y0, y1);
  double pad = 0.05 * (y1 - y0);
  Frame f{x0, x1, y0 - pad, y1 + pad, width, height};
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  axes(os, f, title, xlabel, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* col = colours[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
    os << "\"/>\n";
    if (!s.label.empty())
      os << "<text x=\"" << width - f.right - 8 << "\" y=\"" << f.top + 16 + 16 * k
         << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << col << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const std::string& title, const std::vector<double>& xs, const std::vector<double>& ts,
                        const std::vector<std::vector<double>>& values, int width, int height) {
  if (xs.size() < 2 || ts.size() < 2 || values.size() != ts.size())
    throw std::invalid_argument("heatmap needs at least a 2x2 grid matching the values");
  for (const auto& row : values)
    if (row.size() != xs.size()) throw std::invalid_argument("heatmap needs at least a 2x2 grid matching the values");
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& row : values)
    for (double v : row)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  widen(lo, hi);
  Frame f{xs.front(), xs.back(), ts.front(), ts.back(), width, height};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t it = 0; it < ts.size(); ++it) {
    double ta = it == 0 ? ts[0] : 0.5 * (ts[it - 1] + ts[it]);
    double tb = it + 1 == ts.size() ? ts[it] : 0.5 * (ts[it] + ts[it + 1]);
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      double xa = ix == 0 ? xs[0] : 0.5 * (xs[ix - 1] + xs[ix]);
      double xb = ix + 1 == xs.size() ? xs[ix] : 0.5 * (xs[ix] + xs[ix + 1]);
      double v = values[it][ix];
      int g = std::isfinite(v) ? static_cast<int>(std::lround(255 * (1 - (v - lo) / (hi - lo)))) : 255;
      os << "<rect x=\"" << num(f.px(xa)) << "\" y=\"" << num(f.py(tb)) << "\" width=\""
         << num(f.px(xb) - f.px(xa) + 0.5) << "\" height=\"" << num(f.py(ta) - f.py(tb) + 0.5) << "\" fill=\"rgb("
         << g << ',' << g << ',' << g << ")\"/>\n";
    }
  }
  axes(os, f, title, "x", "t");
  os << "<text x=\"" << width - f.right << "\" y=\"" << f.top - 6 << "\" text-anchor=\"end\" font-size=\"11\">range "
     << num(lo) << " .. " << num(hi) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace vcch
