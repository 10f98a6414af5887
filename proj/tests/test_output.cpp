#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vcch/output.hpp"

using namespace vcch;

namespace {

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (std::size_t p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("numbers round trip with 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1e-17, 0.0}) {
    std::string s = format_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
}

TEST_CASE("csv tables") {
  std::string csv = csv_table({"eps", "sup"}, {{0.5, 2.0}, {0.25, INFINITY}});
  CHECK(csv == "eps,sup\n0.5,2\n0.25,inf\n");
  CHECK(csv_table({"a"}, {}) == "a\n");
}

TEST_CASE("files are written byte for byte") {
  auto dir = std::filesystem::temp_directory_path() / "vcch_test_output";
  std::filesystem::create_directories(dir);
  std::string path = (dir / "t.csv").string();
  std::string text = csv_table({"x", "u"}, {{1.0 / 7.0, -3.0}, {2.0, 1e-300}});
  write_text_file(path, text);
  write_text_file(path, text);
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == text);
  CHECK_THROWS(write_text_file((dir / "missing" / "deeper" / "t.csv").string(), text));
}

TEST_CASE("line plots are well formed and deterministic") {
  Series a{"t = 0 & <1>", {0, 1, 2, 3}, {0, 1, 4, 9}};
  Series b{"t = 1", {0, 1, 2, 3}, {1, 0, 1, 0}};
  std::string svg = svg_lines("title", "x", "u", {a, b});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find("t = 0 &amp; &lt;1&gt;") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg == svg_lines("title", "x", "u", {a, b}));
  // a constant series still gets a non-degenerate frame
  std::string flat = svg_lines("flat", "x", "u", {Series{"c", {0, 1}, {2, 2}}});
  CHECK(flat.find("nan") == std::string::npos);
  CHECK(flat.find("inf") == std::string::npos);
}

TEST_CASE("heatmaps") {
  std::vector<double> xs{0, 1, 2}, ts{0, 1};
  std::vector<std::vector<double>> v{{0, 1, 2}, {3, 4, 5}};
  std::string svg = svg_heatmap("h", xs, ts, v);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<rect") >= 6);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK_THROWS_AS(svg_heatmap("h", {0}, ts, v), std::invalid_argument);
  CHECK_THROWS_AS(svg_heatmap("h", xs, ts, {{0, 1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(svg_heatmap("h", xs, ts, {{0, 1}, {3, 4}}), std::invalid_argument);
}
