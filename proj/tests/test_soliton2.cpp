#include <doctest.h>

#include <cmath>
#include <random>

#include "vcch/soliton2.hpp"

using namespace vcch;

namespace {

const char* kExample = R"(
[coefficients]
a0 = exp(x^2 - 36*x*t + 288*t^2)
b0 = 3
b1 = t^2
[regular]
u0 = 1
[phase]
phi1 = explicit: 12*t
phi2 = explicit: 24*t
[domain]
x_min = -2
x_max = 26
t_min = 0
t_max = 1
)";

TwoPhaseParams example_params(TwoPhaseForm form = TwoPhaseForm::Printed) {
  return two_phase_params(0.5, 1.0, 12.0, 24.0, form);
}

// leading-order equation on the curves; with full set the u0 V_xxx term is kept
double leading_residual(const TwoPhaseParams& p, double tau1, double tau2, bool full) {
  auto D = eval_V0_derivs(p, tau1, tau2).d;
  double V = D[0][0];
  double Vx = D[1][0] + D[0][1];
  double Vxx = D[2][0] + 2 * D[1][1] + D[0][2];
  double Vxxx = D[3][0] + 3 * D[2][1] + 3 * D[1][2] + D[0][3];
  double R = -p.c1 * D[1][0] - p.c2 * D[0][1] + 3 * p.u0 * Vx +
             (p.c1 * D[3][0] + (2 * p.c1 + p.c2) * D[2][1] + (p.c1 + 2 * p.c2) * D[1][2] + p.c2 * D[0][3]) +
             3 * V * Vx - 2 * Vx * Vxx - V * Vxxx;
  return full ? R - p.u0 * Vxxx : R;
}

}  // namespace

TEST_CASE("two-phase parameters of the example") {
  TwoPhaseParams p = example_params();
  CHECK(p.mu1 == doctest::Approx(std::sqrt(4 - std::sqrt(6.0)) / 2).epsilon(1e-14));
  CHECK(p.mu2 == doctest::Approx(std::sqrt(8 - std::sqrt(6.0)) / (2 * std::sqrt(2.0))).epsilon(1e-14));
  CHECK(p.gamma == doctest::Approx(std::sqrt(6.0) / 3));
  TwoPhaseParams q = example_params(TwoPhaseForm::Consistent);
  CHECK(q.mu1 == doctest::Approx(std::sqrt(1 - 2.0 / 11)).epsilon(1e-14));
  CHECK(q.mu2 == doctest::Approx(std::sqrt(1 - 2.0 / 23)).epsilon(1e-14));
  CHECK(q.gamma == 1.0);
  CHECK_THROWS_AS(two_phase_params(0, 1.0, 7.0, 24.0), ModelError);  // u0^(3/2)/c above 1/(3 sqrt 6)
  CHECK_THROWS_AS(two_phase_params(0, -1.0, 12.0, 24.0), ModelError);
  CHECK_THROWS_AS(two_phase_params(0, 1.0, 12.0, 12.0), ModelError);
  CHECK_THROWS_AS(two_phase_params(0, 1.0, 2.5, 24.0, TwoPhaseForm::Consistent), ModelError);
}

TEST_CASE("curve normalisation") {
  ModelFile mf = parse_model(kExample);
  auto m = build_coefficients(mf);
  auto r = build_regular(mf, m);
  auto p1 = build_phase(mf, m, r, "phi1"), p2 = build_phase(mf, m, r, "phi2");
  for (double t : {0.0, 0.3, 1.0}) {
    CHECK(std::fabs(m.a_k(0).value(12 * t, t) - 1) < 1e-12);
    CHECK(std::fabs(m.a_k(0).value(24 * t, t) - 1) < 1e-12);
    TwoPhaseParams p = make_two_phase_params(m, r, p1, p2, t);
    CHECK(p.c1 == doctest::Approx(12));
    CHECK(p.c2 == doctest::Approx(24));
  }
  std::string bad = kExample;
  bad.replace(bad.find("b0 = 3"), 6, "b0 = 4");
  ModelFile mb = parse_model(bad);
  auto mm = build_coefficients(mb);
  CHECK_THROWS_AS(make_two_phase_params(mm, r, p1, p2, 0.5), ModelError);
  CHECK_THROWS_AS(assemble_two_phase(mb), ModelError);
}

TEST_CASE("delta system") {
  TwoPhaseParams p = example_params();
  double worst = 0, worst_trip = 0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      double t1 = -20 + i, t2 = -20 + j;
      TwoPhaseState s = solve_deltas(p, t1, t2);
      worst = std::max(worst, s.defect);
      auto back = taus_from_state(p, s);
      worst_trip = std::max({worst_trip, std::fabs(back[0] - t1), std::fabs(back[1] - t2)});
    }
  CHECK(worst < 1e-10);
  CHECK(worst_trip < 1e-8);

  // E1 follows exp(-gamma mu1 (tau1 - L)); with the printed mu1 it reaches 1e-15 only past tau1 = 60
  TwoPhaseState far = solve_deltas(p, 60, 0);
  CHECK(far.E(1) == doctest::Approx(std::exp(-p.gamma * p.mu1 * (60 - far.L()))).epsilon(1e-12));
  CHECK(far.E(1) < 1e-13);
  CHECK(solve_deltas(p, 70, 0).E(1) < 1e-15);
  TwoPhaseState mid = solve_deltas(p, 0, 0);
  double m1 = p.mu1, m2 = p.mu2;
  double bound = std::log((1 + m1) * (1 + m2) / ((1 - m1) * (1 - m2)));
  CHECK(std::fabs(mid.L()) <= bound);
  // huge phase variables stay finite
  TwoPhaseState huge = solve_deltas(p, -500, 400);
  CHECK(std::isfinite(eval_V0_two_phase(p, huge)));
}

TEST_CASE("two-soliton value and limits") {
  for (TwoPhaseForm form : {TwoPhaseForm::Printed, TwoPhaseForm::Consistent}) {
    TwoPhaseParams p = example_params(form);
    CHECK(std::fabs(eval_V0_two_phase(p, 80, 80)) < 1e-15);
    for (double other = -20; other <= 20; other += 0.5) {
      CHECK(std::fabs(eval_V0_two_phase(p, other, 60) - limit_profile(p, 2, 1, other)) < 1e-6);
      CHECK(std::fabs(eval_V0_two_phase(p, other, -60) - limit_profile(p, 2, -1, other)) < 1e-6);
      CHECK(std::fabs(eval_V0_two_phase(p, 60, other) - limit_profile(p, 1, 1, other)) < 1e-6);
      CHECK(std::fabs(eval_V0_two_phase(p, -60, other) - limit_profile(p, 1, -1, other)) < 1e-6);
    }
    double peak = 0;
    for (double s = -20; s <= 20; s += 0.01) peak = std::max(peak, limit_profile(p, 2, 1, s));
    CHECK(peak > 0);
    CHECK(std::isfinite(peak));
    CHECK(limit_profile(p, 1, 1, 200) < 1e-30);
  }
  // the one-soliton limit is the one-phase crest 3 u0 mu^2/(1 - mu^2)
  TwoPhaseParams p = example_params();
  double s1 = p.mu1 * p.mu1, top = 0;
  for (double s = -5; s <= 5; s += 1e-3) top = std::max(top, limit_profile(p, 2, 1, s));
  CHECK(top == doctest::Approx(3 * p.u0 * s1 / (1 - s1)).epsilon(1e-6));
}

TEST_CASE("printed closed form of the minus limit") {
  // the printed middle coefficient lacks the factor 1/(1 - mu_s^2)
  TwoPhaseParams p = example_params();
  double m1 = p.mu1, m2 = p.mu2, s = m1 * m1;
  double D = (m1 * m1 - m2 * m2) * (m1 * m1 - m2 * m2);
  TwoPhaseState st = solve_deltas(p, 0.0, -60);
  double E = st.E(1);
  double printed =
      12 * p.u0 * D * s * E / ((1 - s) * (1 - s)) /
      (std::pow(m1 + m2, 4) + 2 * D * (1 + s) * E + std::pow(m1 - m2, 4) * E * E);
  double v = eval_V0_two_phase(p, st);
  MESSAGE("tau1 = 0, tau2 = -60: V0 = " << v << ", derived limit = " << limit_profile(p, 2, -1, 0.0)
                                         << ", printed limit = " << printed);
  CHECK(std::fabs(v - limit_profile(p, 2, -1, 0.0)) < 1e-6);
}

TEST_CASE("symmetry under exchange of the phases") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> U(-15, 15);
  for (TwoPhaseForm form : {TwoPhaseForm::Printed, TwoPhaseForm::Consistent}) {
    TwoPhaseParams p = two_phase_params(0, 1.0, 12, 24, form), q = two_phase_params(0, 1.0, 24, 12, form);
    for (int n = 0; n < 100; ++n) {
      double a = U(gen), b = U(gen);
      CHECK(std::fabs(eval_V0_two_phase(p, a, b) - eval_V0_two_phase(q, b, a)) < 1e-10);
    }
  }
}

TEST_CASE("derivatives of the implicit two-soliton") {
  TwoPhaseParams p = example_params();
  for (auto [a, b] : {std::pair{0.0, 0.0}, {1.3, -0.7}, {-4.0, 2.5}, {6.0, 6.5}, {-2.0, -9.0}}) {
    auto D = eval_V0_derivs(p, a, b).d;
    CHECK(D[0][0] == doctest::Approx(eval_V0_two_phase(p, a, b)).epsilon(1e-13));
    auto along = [&](int k, int i, int j) {
      return [&, k, i, j](double s) {
        auto d = eval_V0_derivs(p, k == 1 ? s : a, k == 2 ? s : b).d;
        return d[i][j];
      };
    };
    double h = 1e-3;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; i + j < 3; ++j) {
        double s = 1 + std::fabs(D[i + 1][j]);
        INFO("(" << a << ", " << b << ") order " << i << "," << j);
        CHECK(std::fabs(D[i + 1][j] - fd_derivative(along(1, i, j), a, h, 1)) < 1e-8 * s);
        CHECK(std::fabs(D[i][j + 1] - fd_derivative(along(2, i, j), b, h, 1)) < 1e-8 * s);
      }
  }
}

TEST_CASE("which leading equation the two-soliton solves") {
  TwoPhaseParams pr = example_params(), co = example_params(TwoPhaseForm::Consistent);
  double worst_co = 0, least_pr_full = INFINITY, least_pr = INFINITY;
  for (auto [a, b] : {std::pair{0.0, 0.0}, {0.5, -0.3}, {2.0, 1.0}, {-1.0, 1.5}, {0.0, 40.0}}) {
    worst_co = std::max(worst_co, std::fabs(leading_residual(co, a, b, true)));
    least_pr_full = std::min(least_pr_full, std::fabs(leading_residual(pr, a, b, true)));
    least_pr = std::min(least_pr, std::fabs(leading_residual(pr, a, b, false)));
  }
  CHECK(worst_co < 1e-8);
  MESSAGE("printed parameters: smallest leading residual " << least_pr << " (without u0 V_xxx), " << least_pr_full
                                                           << " (with it)");
  CHECK(least_pr_full > 0.1);
  CHECK(least_pr > 0.1);
}

TEST_CASE("assembled two-phase candidate") {
  auto c = assemble_two_phase(parse_model(kExample));
  CHECK(c->kind() == "soliton2");
  double eps = 0.1;
  // far from both curves the regular part remains
  CHECK(std::fabs(c->value(-1.9, 0.5, eps) - 1.0) < 1e-6);
  CHECK(std::isfinite(c->value(0.0, 0.0, eps)));
  for (auto [x, t] : {std::pair{6.1, 0.5}, {11.95, 0.5}, {0.05, 0.01}, {3.0, 0.2}}) {
    Jet j = c->jet(x, t, eps);
    CHECK(j.u == doctest::Approx(c->value(x, t, eps)).epsilon(1e-12));
    auto vx = [&](double s) { return c->value(s, t, eps); };
    auto vt = [&](double s) { return c->value(x, s, eps); };
    double hx = eps * 1e-2;
    INFO("x = " << x << ", t = " << t);
    CHECK(std::fabs(j.ux - fd_derivative(vx, x, hx, 1)) < 1e-5 * (1 + std::fabs(j.ux)));
    CHECK(std::fabs(j.uxx - fd_derivative(vx, x, hx, 2)) < 1e-4 * (1 + std::fabs(j.uxx)));
    CHECK(std::fabs(j.ut - fd_derivative(vt, t, 1e-5, 1)) < 1e-4 * (1 + std::fabs(j.ut)));
  }
  // crests separate: at t = 1 the fast soliton sits near x = 24
  double best = 0, arg = 0;
  for (double x = 18; x <= 26; x += 1e-3) {
    double v = c->value(x, 1.0, eps);
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  CHECK(std::fabs(arg - 24) < 1.0);
}
