#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vcch/peakon1.hpp"
#include "vcch/residual.hpp"
#include "vcch/soliton1.hpp"

using namespace vcch;

namespace {

CoefficientModel constant_model(const char* a, const char* b) {
  CoefficientModel m;
  m.a = {expression_field(parse_expression(a))};
  m.b = {expression_field(parse_expression(b))};
  return m;
}

class Constant : public CandidateSolution {
 public:
  Constant() : m_(constant_model("1 + x^2", "3")) {}
  const CoefficientModel& model() const override { return m_; }
  double value(double, double, double) const override { return 2.5; }
  Jet jet(double, double, double) const override { return Jet{2.5}; }
  std::vector<double> centers(double) const override { return {0.0}; }
  double decay_rate(double) const override { return 1; }
  Interval time_window() const override { return {0, 1}; }
  std::string kind() const override { return "constant"; }
  int order() const override { return 0; }

 private:
  CoefficientModel m_;
};

// u = eps^2 t sin x with a = 1, b = 3: R = eps^2 sin x + O(eps^4)
class Planted : public CandidateSolution {
 public:
  Planted() : m_(constant_model("1", "3")) {}
  const CoefficientModel& model() const override { return m_; }
  double value(double x, double t, double eps) const override { return eps * eps * t * std::sin(x); }
  Jet jet(double x, double t, double eps) const override {
    double e2 = eps * eps, s = std::sin(x), c = std::cos(x);
    return {e2 * t * s, e2 * s, e2 * t * c, -e2 * t * s, -e2 * t * c, -e2 * s};
  }
  std::vector<double> centers(double) const override { return {}; }
  double decay_rate(double) const override { return 1; }
  Interval time_window() const override { return {0, 1}; }
  std::string kind() const override { return "planted"; }
  int order() const override { return 2; }

 private:
  CoefficientModel m_;
};

// excludes everything
class Blocked : public Constant {
 public:
  std::vector<Interval> excluded(double, double) const override { return {{-1e9, 1e9}}; }
};

const char* kExample1 = R"(
[coefficients]
a0 = 1
a1 = x^2 + 1
b0 = 1
[regular]
u0 = 1
u1 = 1
[phase]
phi = explicit: 5*t/4
[domain]
x_min = -2
x_max = 4
t_min = 0
t_max = 1
)";

}  // namespace

TEST_CASE("constant state has zero residual") {
  Constant c;
  for (double x : {-1.0, 0.0, 3.0})
    for (double eps : {1.0, 0.1}) CHECK(eval_residual(c, x, 0.5, eps) == 0.0);
}

TEST_CASE("classical peakon cancels off the crest") {
  ClassicalPeakon p(1.7, {0, 2});
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> X(-3, 6), T(0, 2);
  double worst = 0;
  int n = 0;
  while (n < 1000) {
    double x = X(gen), t = T(gen), eps = 0.05 + 0.3 * T(gen);
    if (std::fabs(x - 1.7 * t) <= 1e-3 * eps) continue;
    worst = std::max(worst, std::fabs(eval_residual(p, x, t, eps)));
    ++n;
  }
  CHECK(worst < 1e-10);
  CHECK_THROWS_AS(eval_residual(p, 1.7, 1.0, 0.1), BandViolation);
  CHECK(jet_consistency(p, 0.3, 0.1, 0.2) < 1e-4);
}

TEST_CASE("dispersive block scales with eps^2 at frozen derivatives") {
  CoefficientModel m = constant_model("2", "3");
  Jet j{0.7, -1.1, 0.4, 2.3, -5.0, 0.9};
  double x = 0.3, t = 0.2, eps = 0.17;
  ResidualTerms r1 = residual_terms(m, j, x, t, eps), r2 = residual_terms(m, j, x, t, 2 * eps);
  CHECK(r1.transport == r2.transport);
  double block1 = r1.transport - r1.value(), block2 = r2.transport - r2.value();
  CHECK(block2 == doctest::Approx(4 * block1).epsilon(1e-14));
  CHECK(r1.transport == doctest::Approx(2 * -1.1 + 3 * 0.7 * 0.4));
  CHECK(r1.dispersive == doctest::Approx(0.9 + 2 * 0.4 * 2.3 + 0.7 * -5.0));
  // eps-dependent coefficients are summed at the given eps
  CoefficientModel m2 = constant_model("2", "3");
  m2.a.push_back(expression_field(parse_expression("x")));
  CHECK(residual_terms(m2, j, x, t, eps).a == doctest::Approx(2 + eps * x));
}

TEST_CASE("planted order") {
  Planted c;
  ScanOptions opt;
  opt.nx = 101;
  opt.nt = 6;
  opt.target = 2;
  auto rep = scan_orders(c, {0.2, 0.1, 0.05, 0.025}, {-3, 3, 0, 1}, opt);
  CHECK(rep.fit.slope == doctest::Approx(2).epsilon(0.025));
  CHECK(rep.pass);
  for (const auto& n : rep.norms) {
    CHECK(n.points == 606);
    CHECK(n.l2 > 0);
  }
  opt.target = 3;
  CHECK_FALSE(scan_orders(c, {0.2, 0.1, 0.05}, {-3, 3, 0, 1}, opt).pass);
}

TEST_CASE("exact peakon reports infinite order") {
  ClassicalPeakon p(2.0);
  ScanOptions opt;
  opt.nt = 5;
  auto rep = scan_orders(p, {0.2, 0.1, 0.05}, {-2, 4, 0, 1}, opt);
  CHECK(rep.fit.exact);
  CHECK(std::isinf(rep.fit.slope));
  CHECK(rep.pass);
  for (const auto& n : rep.norms) CHECK(n.sup < 1e-10);
}

TEST_CASE("scan nodes") {
  ClassicalPeakon p(2.0);
  ScanOptions opt;
  opt.nx = 11;
  double eps = 0.1, t = 0.5;
  auto xs = scan_nodes(p, {-2, 4, 0, 1}, t, eps, opt);
  CHECK(std::is_sorted(xs.begin(), xs.end()));
  CHECK(xs.front() == -2.0);
  CHECK(xs.back() == 4.0);
  double worst_gap = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    CHECK_FALSE(std::fabs(xs[i] - 1.0) <= 1e-3 * eps);
    bool near = std::fabs(xs[i] - 1.0) < 40 * eps && std::fabs(xs[i + 1] - 1.0) < 40 * eps;
    bool across = xs[i] < 1.0 && xs[i + 1] > 1.0;
    if (near && !across) worst_gap = std::max(worst_gap, xs[i + 1] - xs[i]);
  }
  CHECK(worst_gap <= eps / 10 * (1 + 1e-12));
}

TEST_CASE("scan errors") {
  Constant c;
  ScanOptions opt;
  CHECK_THROWS_AS(scan_orders(c, {0.1, 0.05}, {-1, 1, 0, 1}, opt), ScanError);
  CHECK_THROWS_AS(scan_orders(c, {0.1, 0.05, 0.0}, {-1, 1, 0, 1}, opt), ScanError);
  CHECK_THROWS_AS(scan_orders(c, {0.1, 0.05, 0.02}, {-1, 1, 2, 3}, opt), ScanError);
  Blocked b;
  CHECK_THROWS_AS(scan_orders(b, {0.1, 0.05, 0.02}, {-1, 1, 0, 1}, opt), ScanError);
}

TEST_CASE("report serialisation") {
  Planted c;
  ScanOptions opt;
  opt.nx = 21;
  opt.nt = 3;
  opt.target = 2;
  auto rep = scan_orders(c, {0.2, 0.1, 0.05}, {-1, 1, 0, 1}, opt);
  std::string txt = report_text(rep);
  CHECK(txt.find("kind = planted\n") != std::string::npos);
  CHECK(txt.find("pass = true\n") != std::string::npos);
  CHECK(txt.find("eps.2 = 0.050000000000000003\n") != std::string::npos);
  std::string csv = report_csv(rep);
  CHECK(csv.rfind("eps,sup_norm,l2_norm,points\n0.20000000000000001,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(report_text(scan_orders(c, {0.2, 0.1, 0.05}, {-1, 1, 0, 1}, opt)) == txt);
}

TEST_CASE("far field of a one-phase soliton") {
  auto y = assemble_one_phase(parse_model(kExample1), 1);
  double t = 0.4, eps = 0.05, phi = 0.5;
  for (double tau : {-80.0, -65.0, 65.0, 80.0}) CHECK(std::fabs(eval_residual(*y, phi + eps * tau, t, eps)) < 1e-8);
}

TEST_CASE("grid refinement is stable for a smooth candidate") {
  auto y = assemble_one_phase(parse_model(kExample1), 0);
  ScanOptions coarse;
  coarse.nt = 5;
  coarse.target = 0;
  ScanOptions fine = coarse;
  fine.nx = 2 * coarse.nx - 1;
  fine.per_eps = 2 * coarse.per_eps;
  std::vector<double> eps{0.2, 0.1, 0.05};
  auto a = scan_orders(*y, eps, {-2, 4, 0, 1}, coarse), b = scan_orders(*y, eps, {-2, 4, 0, 1}, fine);
  for (std::size_t i = 0; i < eps.size(); ++i)
    CHECK(std::fabs(a.norms[i].sup - b.norms[i].sup) < 0.05 * b.norms[i].sup);
}
