#include <doctest.h>

#include <cmath>

#include "vcch/peakon1.hpp"

using namespace vcch;

namespace {

const char* kExample = R"(
[coefficients]
a0 = 5/4*(x^2 + 4)
b0 = 6*(t^2 + 1)
[regular]
u0 = 1
u1 = 1
[phase]
phi = peakon-ode: phi0=0
[domain]
x_min = -1
x_max = 5
t_min = 0
t_max = 2
)";

std::shared_ptr<PeakonMainTerm> example_main() {
  ModelFile mf = parse_model(kExample);
  auto m = build_coefficients(mf);
  auto r = build_regular(mf, m);
  auto p = build_phase(mf, m, r, "phi");
  return std::make_shared<PeakonMainTerm>(make_peakon_main(m, r, p));
}

double printed_v1(double t, double tau) {
  double a = std::sqrt(2 * (t * t + 1)), s = std::fabs(tau), sg = tau >= 0 ? 1.0 : -1.0;
  double e1 = std::exp(-a * s), e2 = e1 * e1, e3 = e2 * e1, l2 = std::log(2.0);
  double lg = std::log(std::fabs(std::exp(a * s) - 0.5));
  auto integrand = [&](double z) {
    double az = std::fabs(z), sz = z >= 0 ? 1.0 : -1.0;
    return (10 * t * z / a - 3 * t + (10 * t / (a * a) - 4 * t / a) * sz) * std::exp(-2 * a * az) *
           std::log(std::fabs(std::exp(a * az) - 0.5));
  };
  double integral = tau >= 0 ? integrate_interval(integrand, 0, tau).value : -integrate_interval(integrand, tau, 0).value;
  return 5 * t / (4 * a * a * a) * tau * e2 - 3 * t / (8 * a * a) * e2 +
         (25 * t / (8 * std::pow(a, 4)) - t / (2 * a * a * a)) * e2 * sg -
         5 * t / (4 * a * a) * tau * tau * e1 * sg - (15 * t / (4 * a * a * a) - t / (a * a)) * tau * e1 +
         3 * t / (4 * a) * tau * e1 * sg + (15 * t / (8 * a * a) - 3 * t * l2 / (16 * a * a)) * e1 +
         (-25 * t / (8 * std::pow(a, 4)) + t / (2 * a * a * a) - 5 * t * l2 / (4 * std::pow(a, 8)) +
          t * l2 / (4 * a * a * a)) * e1 * sg -
         1 / (8 * a) * e1 * sg * integral + (-5 * t * tau / (8 * a * a * a) + 3 * t / (16 * a * a)) * e3 * lg +
         (-5 * t / (4 * std::pow(a, 8)) + t / (4 * a * a * a)) * e3 * sg * lg;
}

}  // namespace

TEST_CASE("peakon main term") {
  auto main = example_main();
  for (double t : {0.0, 0.7, 2.0}) {
    CHECK(main->alpha(t) == doctest::Approx(std::sqrt(2 * (t * t + 1))));
    CHECK(main->jet(t, 0.0).v == 1.0);
    CHECK(main->dalpha(t) == doctest::Approx(2 * t / main->alpha(t)));
  }
  CoefficientModel m;
  m.a = {expression_field(parse_expression("1"))};
  m.b = {expression_field(parse_expression("3"))};
  RegularPart r;
  r.u = {zero_field()};
  PeakonMainTerm classical(m, r, explicit_phase(parse_expression("2*t"), {0, 1}));
  CHECK(classical.alpha(0.3) == doctest::Approx(1.0));
  CHECK(classical.jet(0.3, 1.5).v == doctest::Approx(std::exp(-1.5)));
  m.b = {expression_field(parse_expression("-1"))};
  PeakonMainTerm bad(m, r, explicit_phase(parse_expression("2*t"), {0, 1}));
  CHECK_THROWS_AS(bad.alpha(0.5), ModelError);
  // time derivative at fixed tau against differences
  double t = 0.6, tau = 0.8, h = 1e-5;
  SingularJet j = main->jet(t, tau);
  CHECK(j.vt == doctest::Approx((main->jet(t + h, tau).v - main->jet(t - h, tau).v) / (2 * h)).epsilon(1e-6));
  CHECK(j.vtau2t ==
        doctest::Approx((main->jet(t + h, tau).vtau2 - main->jet(t - h, tau).vtau2) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("A coefficients of the peakon example") {
  auto main = example_main();
  for (double t : {0.0, 0.5, 1.5}) {
    ACoefficients A = compute_A_coeffs(*main, t);
    double a = main->alpha(t);
    CHECK(A.A2[0] == doctest::Approx(-10 * t).epsilon(1e-7));
    CHECK(A.A2[1] == -A.A2[0]);
    CHECK(A.A3[0] == 0.0);
    CHECK(A.A4[0] == 0.0);
    CHECK(A.A1[0] == doctest::Approx(4 * t + 3 * a * t).epsilon(1e-7));
    // printed Phi_1^+ and Phi_1^-
    PeakonSource src = compute_Phi1_pm(A, a);
    for (double s : {0.0, 1.0, 2.0}) {
      double pp = (10 * t * s / a + 10 * t / (a * a) - 4 * t / a - 3 * t) * std::exp(-a * s);
      double pm = (-10 * t * s / a - 10 * t / (a * a) + 4 * t / a - 3 * t) * std::exp(-a * s);
      CHECK(std::fabs(src.Phi(s) - pp) < 1e-7 * (1 + t));
      if (s > 0) CHECK(std::fabs(src.Phi(-s) - pm) < 1e-7 * (1 + t));
    }
    // F is the derivative of Phi on each side
    for (double s : {-1.3, -0.4, 0.4, 1.3}) {
      auto phi = [&](double z) { return src.Phi(z); };
      CHECK(src.F(s) == doctest::Approx(fd_derivative(phi, s, 1e-3, 1)).epsilon(1e-7));
    }
    CHECK(std::fabs(src.Phi(60)) < 1e-20);
    CHECK(std::fabs(src.Phi(-60)) < 1e-20);
  }
  CoefficientModel m;
  m.a = {expression_field(parse_expression("1"))};
  m.b = {expression_field(parse_expression("3"))};
  RegularPart r;
  r.u = {zero_field()};
  PeakonMainTerm frozen(m, r, explicit_phase(parse_expression("2*t"), {0, 1}));
  ACoefficients z = compute_A_coeffs(frozen, 0.4);
  for (int k = 0; k < 2; ++k) {
    CHECK(z.A1[k] == 0.0);
    CHECK(z.A2[k] == 0.0);
    CHECK(z.A3[k] == 0.0);
    CHECK(z.A4[k] == 0.0);
  }
}

TEST_CASE("fundamental system") {
  for (double alpha : {1.0, 1.7}) {
    double dphi = 2.0;
    for (int side : {1, -1}) {
      FundamentalValues f0 = fundamental_system(alpha, dphi, side, 0.0);
      CHECK(f0.y1 == 1.0);
      for (double s = 0.05; s < 20; s += 0.37) {
        double tau = side * s;
        FundamentalValues f = fundamental_system(alpha, dphi, side, tau);
        double v0 = std::exp(-alpha * s);
        double p = dphi - v0, q = side * alpha * v0, r = alpha * alpha * (2 * v0 - dphi);
        CHECK(p * (f.y1 * f.dy2 - f.dy1 * f.y2) == doctest::Approx(1.0).epsilon(1e-10));
        auto y1 = [&](double z) { return fundamental_system(alpha, dphi, side, z).y1; };
        double E = std::exp(alpha * s), k = 1 / dphi;
        double Y2ss = alpha * (dphi * dphi * E / 2 + std::log(E - k) / E - 1 / (E - k) - E / ((E - k) * (E - k))) /
                      (dphi * dphi * dphi);
        double r2 = p * side * Y2ss + q * f.dy2 + r * f.y2;
        double r1 = p * fd_derivative(y1, tau, 1e-3, 2) + q * f.dy1 + r * f.y1;
        CHECK(std::fabs(r2) < 1e-10 * (1 + std::fabs(f.y2)));
        CHECK(std::fabs(r1) < 1e-8);
      }
    }
  }
  CHECK_THROWS_AS(fundamental_system(1.0, 1.0, 1, 0.5), ConstructionError);
}

TEST_CASE("peakon correction for the example") {
  auto main = example_main();
  for (double t : {0.5, 1.2}) {
    PiecewiseCorrection c = solve_correction_peakon(*main, t);
    CHECK(c.pW == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(c.value(0.0) - c.value(-1e-300)) < 1e-12);
    auto v = [&](double z) { return c.value(z); };
    double worst = 0;
    for (double s = 0.02; s < 40 / c.alpha; s += 0.173) {
      for (double sg : {1.0, -1.0}) {
        double tau = sg * s;
        double h = std::min(1e-2, s / 3);
        PeakonCorrectionJet j = c.eval(tau);
        double d1 = fd_derivative(v, tau, h, 1), d2 = fd_derivative(v, tau, h, 2);
        double v0 = std::exp(-c.alpha * s);
        double res = (c.dphi - v0) * d2 - (-sg * c.alpha * v0) * d1 +
                     (c.b0 * (v0 + c.u0) - c.a0 * c.dphi - c.alpha * c.alpha * v0) * j.v - c.source.Phi(tau);
        worst = std::max(worst, std::fabs(res));
        CHECK(std::fabs(j.d1 - d1) < 1e-6);
        auto d2f = [&](double z) { return c.eval(z).d2; };
        INFO("tau = " << tau);
        CHECK(std::fabs(j.d3 - fd_derivative(d2f, tau, std::min(1e-3, s / 3), 1)) < 1e-5);
      }
    }
    CHECK(worst < 1e-6);
    CHECK(std::fabs(c.value(0.95 * c.cutoff)) < 1e-10);
    CHECK(std::fabs(c.value(-0.95 * c.cutoff)) < 1e-10);
    double C = envelope_constant(c);
    CHECK(std::isfinite(C));
    CHECK(C < 100);
    MESSAGE("t = " << t << ": tau, numeric v1, printed v1");
    for (double tau : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0})
      MESSAGE(tau << ", " << c.value(tau) << ", " << printed_v1(t, tau));
  }
}

TEST_CASE("peakon correction next to the crest on both sides") {
  auto main = example_main();
  PiecewiseCorrection c = solve_correction_peakon(*main, 0.5);
  auto d1 = [&](double z) { return c.eval(z).d1; };
  for (double s : {1e-4, 5e-4, 1e-3, 2e-3, 4e-3}) {
    for (double sg : {1.0, -1.0}) {
      double tau = sg * s;
      INFO("tau = " << tau);
      // the analytic d2 comes from the equation itself; compare with differences of d1
      CHECK(std::fabs(c.eval(tau).d2 - fd_derivative(d1, tau, s / 3, 1)) < 1e-5);
    }
  }
  CHECK(c.source.Phi_side(1, 0.0) == doctest::Approx(c.source.Phi(-1e-300)));
  CHECK(c.source.Phi_side(0, 0.0) == c.source.Phi(0.0));
}

TEST_CASE("zero source gives zero correction") {
  auto main = example_main();
  PeakonSource zero{ACoefficients{}, main->alpha(0.5)};
  PiecewiseCorrection c = solve_correction_peakon(*main, 0.5, zero);
  for (double s : {-2.0, 0.0, 0.7}) CHECK(c.value(s) == 0.0);
}

TEST_CASE("assembled peakon approximation") {
  auto y0 = assemble_peakon(parse_model(kExample), 0);
  double t = 0.75, eps = 0.1;
  CHECK(y0->value(2 * t, t, eps) == doctest::Approx(2.0));
  double x = 2 * t + 0.037;
  CHECK(y0->value(x, t, eps) ==
        doctest::Approx(1 + std::exp(-std::sqrt(2 * (t * t + 1)) * std::fabs(x - 2 * t) / eps)));
  CHECK_THROWS_AS(y0->jet(2 * t + 1e-5, t, eps), BandViolation);
  // derivative jump at the crest scales like 1/eps
  double a = std::sqrt(2 * (t * t + 1));
  double j1 = y0->jet(2 * t + 2e-3 * 0.2, t, 0.2).ux, j2 = y0->jet(2 * t + 2e-3 * 0.1, t, 0.1).ux;
  CHECK(j2 / j1 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(j1 == doctest::Approx(-a / 0.2 * std::exp(-a * 2e-3)));
  auto y1 = assemble_peakon(parse_model(kExample), 1);
  double v10 = y1->correction(t)->value(0.0);
  CHECK(y1->value(2 * t, t, eps) == doctest::Approx(2.0 + eps * (1 + v10)));
  Jet j = y1->jet(x, t, eps);
  auto fx = [&](double s) { return y1->value(s, t, eps); };
  auto ft = [&](double s) { return y1->value(x, s, eps); };
  CHECK(j.ux == doctest::Approx(fd_derivative(fx, x, 1e-4, 1)).epsilon(1e-5));
  CHECK(j.uxx == doctest::Approx(fd_derivative(fx, x, 1e-3, 2)).epsilon(1e-4));
  CHECK(j.ut == doctest::Approx(fd_derivative(ft, t, 1e-5, 1)).epsilon(1e-4));
}
