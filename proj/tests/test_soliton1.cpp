#include <doctest.h>

#include <cmath>

#include "vcch/soliton1.hpp"

using namespace vcch;

namespace {

const char* kExample = R"(
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

SolitonProfileParams example_params() { return make_soliton_params(0.5, 0.625, 1.25, 1, 1, 1); }

std::shared_ptr<SolitonMainTerm> example_main() {
  ModelFile mf = parse_model(kExample);
  auto m = build_coefficients(mf);
  auto r = build_regular(mf, m);
  auto p = build_phase(mf, m, r, "phi");
  return std::make_shared<SolitonMainTerm>(m, r, p, Interval{0, 1});
}

// closed form of the first correction for the source (1 + phi^2) phi' v0_tau
double printed_v1(double t, double th) {
  double c2 = std::cosh(th) * std::cosh(th), s2 = std::sinh(th) * std::sinh(th);
  return 75.0 / 64.0 * (16 + 25 * t * t) / std::pow(3 + 2 * c2, 3) *
         (25 - 60 * th * std::tanh(th) - (35 + 6 * c2) * s2 + 2 * th * (3 + c2) * std::sinh(2 * th));
}

}  // namespace

TEST_CASE("profile parameters of the constant background example") {
  auto p = example_params();
  CHECK(p.amp == doctest::Approx(0.75));
  CHECK(p.ratio == doctest::Approx(0.6));
  CHECK(p.theta0 == doctest::Approx(std::atanh(std::sqrt(0.6))));
  CHECK(p.stretch == doctest::Approx(2 * std::sqrt(5.0)));
  CHECK(p.log_coef == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(make_soliton_params(0, 0, 1, 1, 1, 1), ModelError);  // amp = 0
  CHECK_THROWS_AS(make_soliton_params(0, 0, 1, 1, 1, -1), ModelError);  // ratio = 6
}

TEST_CASE("theta to tau map") {
  auto p = example_params();
  CHECK(theta_to_tau(p, 0.0) == 0.0);
  CHECK(theta_to_tau(p, 1e4) / 1e4 == doctest::Approx(2 * std::sqrt(5.0)).epsilon(1e-3));
  CHECK(theta_to_tau(p, -1e4) / -1e4 == doctest::Approx(2 * std::sqrt(5.0)).epsilon(1e-3));
  long double th0 = std::atanh(std::sqrt(0.6L));
  long double ref = 2 * std::sqrt(5.0L) + std::sqrt(3.0L) * std::log(std::cosh(1 - th0) / std::cosh(1 + th0));
  CHECK(std::fabs(theta_to_tau(p, 1.0) - static_cast<double>(ref)) < 1e-13);
  for (double th = -5; th < 5; th += 0.01) CHECK(dtau_dtheta(p, th) > 0);
}

TEST_CASE("tau to theta inversion") {
  auto p = example_params();
  CHECK(tau_to_theta(p, 0.0) == doctest::Approx(0.0));
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    double tau = -30 + 60.0 * i / 49;
    worst = std::max(worst, std::fabs(theta_to_tau(p, tau_to_theta(p, tau)) - tau));
  }
  CHECK(worst < 1e-10);
  // tau = stretch theta - 2 log_coef theta0 sign(theta) + exponentially small terms
  double shift = 2 * p.log_coef * p.theta0;
  CHECK(std::fabs(tau_to_theta(p, 100) - (100 + shift) / p.stretch) < 1e-10);
  CHECK(tau_to_theta(p, 1000) == doctest::Approx(1000 / p.stretch).epsilon(0.02));
}

TEST_CASE("main term profile") {
  auto p = example_params();
  ProfileJet j = eval_v0(p, 0.0);
  CHECK(j.v == doctest::Approx(0.75));
  CHECK(std::fabs(j.d1) < 1e-14);
  double worst_ode = 0, worst_h = 0;
  for (double tau = -20; tau <= 20; tau += 0.4) {
    ProfileJet k = eval_v0(p, tau);
    CHECK(k.v > 0);
    if (tau > 0.1) CHECK(k.d1 < 0);
    if (tau < -0.1) CHECK(k.d1 > 0);
    double ode = 3 * (k.v - p.dphi) * k.d1 * k.d1 - p.b0 * k.v * k.v * k.v + 3 * p.D * k.v * k.v;
    worst_ode = std::max(worst_ode, std::fabs(ode) / (1 + k.v * k.v * k.v));
    worst_h = std::max(worst_h, std::fabs(first_integral(p, k.v, k.d1)));
    // second and third derivatives against differences of the first
    auto d1 = [&](double s) { return eval_v0(p, s).d1; };
    CHECK(std::fabs(fd_derivative(d1, tau, 1e-3, 1) - k.d2) < 1e-8);
    CHECK(std::fabs(fd_derivative(d1, tau, 1e-3, 2) - k.d3) < 1e-6);
    // evenness in tau
    CHECK(std::fabs(eval_v0(p, -tau).v - k.v) < 1e-15);
  }
  CHECK(worst_ode < 1e-9);
  CHECK(worst_h < 1e-9);
  // decay rate of the tail
  double rate = std::log(eval_v0(p, 40).v / eval_v0(p, 60).v) / 20;
  CHECK(rate == doctest::Approx(p.decay).epsilon(0.05));
}

TEST_CASE("first integral") {
  auto p = example_params();
  CHECK(first_integral(p, 0, 0) == 0.0);
  CHECK(first_integral(p, p.dphi, 0) ==
        doctest::Approx(p.b0 * std::pow(p.dphi, 3) - 3 * p.D * p.dphi * p.dphi));
}

TEST_CASE("F1 for the constant background example") {
  auto main = example_main();
  auto tau = linspace(-80, 80, 3201);
  for (double t : {0.0, 0.4, 1.0}) {
    GridFunction F = compute_F1(*main, t, tau);
    double phi = 1.25 * t, c = (1 + phi * phi) * 1.25 - 1.0;  // b0 u1 = 1
    auto p = main->params(t);
    double worst = 0;
    for (std::size_t i = 0; i < tau.size(); ++i)
      worst = std::max(worst, std::fabs(F.values[i] - c * eval_v0(p, tau[i]).d1));
    CHECK(worst < 1e-9);
    auto rep = check_orthogonality(F, *main, t);
    CHECK(rep.defect_v0 < 1e-8);
    CHECK(rep.defect_v0t < 1e-8);
    auto ph = compute_Phi(F);
    CHECK(std::fabs(ph.left_limit) < 1e-10);
    CHECK(std::fabs(ph.Phi(1.3) - c * eval_v0(p, 1.3).v) < 1e-6);
  }
}

TEST_CASE("F1 vanishes for a frozen autonomous model") {
  CoefficientModel m;
  m.a = {expression_field(parse_expression("1"))};
  m.b = {expression_field(parse_expression("1"))};
  RegularPart r;
  r.u = {expression_field(parse_expression("1"))};
  auto main = SolitonMainTerm(m, r, explicit_phase(parse_expression("5*t/4"), {0, 1}), {0, 1});
  GridFunction F = compute_F1(main, 0.5, linspace(-20, 20, 101));
  for (double v : F.values) CHECK(std::fabs(v) < 1e-10);
}

TEST_CASE("orthogonality and Phi edge cases") {
  auto main = example_main();
  auto p = main->params(0.5);
  GridFunction even, zero;
  even.nodes = zero.nodes = linspace(-60, 60, 1201);
  for (double s : even.nodes) {
    even.values.push_back(eval_v0(p, s).v);
    zero.values.push_back(0.0);
  }
  CHECK(check_orthogonality(even, *main, 0.5).defect_v0 == doctest::Approx(1.0));
  CHECK(check_orthogonality(zero, *main, 0.5).defect_v0 == 0.0);
  auto z = compute_Phi(zero);
  CHECK(z.left_limit == 0.0);
  GridFunction bump;
  bump.nodes = linspace(-20, 20, 8001);
  for (double s : bump.nodes) bump.values.push_back(-2 * s * std::exp(-s * s));
  auto b = compute_Phi(bump);
  CHECK(std::fabs(b.left_limit) < 1e-12);
  CHECK(std::fabs(b.Phi(0.7) - std::exp(-0.49)) < 1e-8);
}

TEST_CASE("switch function") {
  auto e = switch_eta(0.3);
  double h = 1e-3;
  CHECK(switch_eta(-50)[0] == doctest::Approx(1.0));
  CHECK(switch_eta(50)[0] == doctest::Approx(0.0));
  CHECK(e[1] == doctest::Approx((switch_eta(0.3 + h)[0] - switch_eta(0.3 - h)[0]) / (2 * h)).epsilon(1e-5));
  CHECK(e[2] == doctest::Approx((switch_eta(0.3 + h)[1] - switch_eta(0.3 - h)[1]) / (2 * h)).epsilon(1e-5));
  CHECK(e[3] == doctest::Approx((switch_eta(0.3 + h)[2] - switch_eta(0.3 - h)[2]) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("first correction solves its integrated equation") {
  auto main = example_main();
  double t = 0.5;
  CorrectionTerm c = solve_correction(*main, t);
  CHECK(c.nu == 0.0);
  auto p = c.params;
  double worst = 0;
  auto v = [&](double s) { return c.eval(s, eval_v0(p, s)).v; };
  for (double s = -15; s <= 15; s += 0.37) {
    ProfileJet j = eval_v0(p, s);
    double d1 = fd_derivative(v, s, 1e-2, 1), d2 = fd_derivative(v, s, 1e-2, 2);
    double res = (p.dphi - j.v) * d2 - d1 * j.d1 + (p.b0 * (j.v + p.u0) - p.a0 * p.dphi - j.d2) * v(s) -
                 c.Phi(s);
    worst = std::max(worst, std::fabs(res));
    CorrectionJet cj = c.eval(s, j);
    CHECK(std::fabs(cj.d1 - d1) < 1e-6);
    CHECK(std::fabs(cj.d2 - d2) < 1e-6);
  }
  CHECK(worst < 1e-6);
  CHECK(std::fabs(c.eval(0.99 * c.half_width, eval_v0(p, 0.99 * c.half_width)).v) < 1e-6);
  CHECK(std::fabs(c.eval(-0.99 * c.half_width, eval_v0(p, -0.99 * c.half_width)).v) < 1e-6);
}

TEST_CASE("zero source gives zero correction") {
  auto main = example_main();
  CorrectionTerm c = solve_correction(*main, 0.5, {}, [](double) { return 0.0; });
  for (double s : {-3.0, 0.0, 2.0}) CHECK(c.eval(s, eval_v0(c.params, s)).v == 0.0);
}

TEST_CASE("violated orthogonality refuses construction") {
  auto main = example_main();
  auto p = main->params(0.5);
  CHECK_THROWS_AS(solve_correction(*main, 0.5, {}, [&](double s) { return eval_v0(p, s).v; }),
                  ConstructionError);
}

TEST_CASE("comparison with the printed closed form of the correction") {
  auto main = example_main();
  double t = 0.4, phi = 1.25 * t;
  auto p = main->params(t);
  double c = (1 + phi * phi) * 1.25;
  CorrectionTerm corr = solve_correction(*main, t, {}, [&](double s) { return c * eval_v0(p, s).d1; });
  MESSAGE("theta, numeric v1, printed v1");
  double worst = 0;
  for (double th : {0.0, 0.5, -0.5, 1.0, -1.0}) {
    double s = theta_to_tau(p, th);
    double num = corr.eval(s, eval_v0(p, s)).v, pr = printed_v1(t, th);
    MESSAGE(th << ", " << num << ", " << pr);
    worst = std::max(worst, std::fabs(num - pr));
  }
  // the numerical solution is the reference; the printed form is only reported
  MESSAGE("max deviation from the printed closed form: " << worst);
  CHECK(std::isfinite(worst));
}

TEST_CASE("assembled one-phase approximation") {
  auto y0 = assemble_one_phase(parse_model(kExample), 0);
  double t = 0.5, phi = 0.625, eps = 0.1;
  CHECK(y0->value(phi, t, eps) == doctest::Approx(1.75));
  auto p = y0->main().params(t);
  CHECK(y0->value(phi + 0.13, t, eps) == doctest::Approx(1 + eval_v0(p, 1.3).v));
  auto y1 = assemble_one_phase(parse_model(kExample), 1);
  CHECK_FALSE(y1->has_left_limit());
  double v10 = y1->correction(t)->eval(0.0, eval_v0(p, 0.0)).v;
  CHECK(y1->value(phi, t, 0.5) == doctest::Approx(1 + 0.75 + 0.5 * (1 + v10)));
  // chain rule: derivatives of Y against differences in x and t
  double x = phi + 0.03;
  Jet j = y1->jet(x, t, eps);
  auto fx = [&](double s) { return y1->value(s, t, eps); };
  auto ft = [&](double s) { return y1->value(x, s, eps); };
  CHECK(j.ux == doctest::Approx(fd_derivative(fx, x, 1e-4, 1)).epsilon(1e-5));
  CHECK(j.uxx == doctest::Approx(fd_derivative(fx, x, 1e-3, 2)).epsilon(1e-4));
  CHECK(j.ut == doctest::Approx(fd_derivative(ft, t, 1e-4, 1)).epsilon(1e-4));
}
