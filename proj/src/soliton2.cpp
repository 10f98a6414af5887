#include "vcch/soliton2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace vcch {

namespace {

// Truncated Taylor polynomial of degree three in two variables; c[i][j] is the
// coefficient of h1^i h2^j.
struct T2 {
  std::array<std::array<double, 4>, 4> c{};

  static T2 constant(double v) {
    T2 r;
    r.c[0][0] = v;
    return r;
  }
  static T2 var(int k) {
    T2 r;
    (k == 1 ? r.c[1][0] : r.c[0][1]) = 1.0;
    return r;
  }
  double value() const { return c[0][0]; }
};

T2 operator+(const T2& a, const T2& b) {
  T2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i][j] = a.c[i][j] + b.c[i][j];
  return r;
}

T2 operator-(const T2& a, const T2& b) {
  T2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i][j] = a.c[i][j] - b.c[i][j];
  return r;
}

T2 operator*(double s, const T2& a) {
  T2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r.c[i][j] = s * a.c[i][j];
  return r;
}

T2 operator*(const T2& a, const T2& b) {
  T2 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) {
      double s = 0.0;
      for (int p = 0; p <= i; ++p)
        for (int q = 0; q <= j; ++q) s += a.c[p][q] * b.c[i - p][j - q];
      r.c[i][j] = s;
    }
  return r;
}

// f(a0 + h) = f0 + f1 h + f2 h^2 + f3 h^3
T2 apply_series(const T2& a, double f0, double f1, double f2, double f3) {
  T2 h = a;
  h.c[0][0] = 0.0;
  T2 h2 = h * h, h3 = h2 * h;
  return T2::constant(f0) + f1 * h + f2 * h2 + f3 * h3;
}

T2 exp(const T2& a) {
  double e = std::exp(a.value());
  return apply_series(a, e, e, e / 2, e / 6);
}

T2 log(const T2& a) {
  double v = a.value(), i = 1.0 / v;
  return apply_series(a, std::log(v), i, -i * i / 2, i * i * i / 3);
}

T2 recip(const T2& a) {
  double i = 1.0 / a.value();
  return apply_series(a, i, -i * i, i * i * i, -i * i * i * i);
}

struct Mono {
  double log_coef;
  int i, j;  // E1^i E2^j
};

struct Coefs {
  std::vector<Mono> d1, d2, num, den;
  std::array<double, 2> L_bounds;
};

Coefs coefficients(const TwoPhaseParams& p) {
  double m1 = p.mu1, m2 = p.mu2;
  double s1 = m1 * m1, s2 = m2 * m2;
  double r = (m1 - m2) * (m1 - m2) / ((m1 + m2) * (m1 + m2));
  double k1 = s1 / ((1 - s1) * (1 - s1)), k2 = s2 / ((1 - s2) * (1 - s2));
  double a1 = 2 * (1 + s1) / (1 - s1), a2 = 2 * (1 + s2) / (1 - s2);
  double c12 = 2 * (m1 - m2) * (m1 - m2) * (1 - s1 * s2) / ((1 - s1) * (1 - s1) * (1 - s2) * (1 - s2));
  double b12 = 4 * ((s1 + s2) * (1 + s1 * s2) + (s1 - s2) * (s1 - s2) - 4 * s1 * s2) /
               ((1 - s1) * (1 - s2) * (m1 + m2) * (m1 + m2));
  auto mono = [](double c, int i, int j) { return Mono{std::log(c), i, j}; };
  Coefs out;
  double A0 = (1 - m1) * (1 - m2), A1 = (1 + m1) * (1 - m2), A2 = (1 - m1) * (1 + m2), A12 = (1 + m1) * (1 + m2) * r;
  double B0 = (1 + m1) * (1 + m2), B1 = (1 - m1) * (1 + m2), B2 = (1 + m1) * (1 - m2), B12 = (1 - m1) * (1 - m2) * r;
  out.d1 = {mono(A0, 0, 0), mono(A1, 1, 0), mono(A2, 0, 1), mono(A12, 1, 1)};
  out.d2 = {mono(B0, 0, 0), mono(B1, 1, 0), mono(B2, 0, 1), mono(B12, 1, 1)};
  out.num = {mono(k1, 1, 0), mono(k2, 0, 1), mono(c12, 1, 1), mono(r * k2, 2, 1), mono(r * k1, 1, 2)};
  out.den = {mono(1.0, 0, 0), mono(a1, 1, 0),         mono(a2, 0, 1),         mono(1.0, 2, 0),
             mono(1.0, 0, 2), mono(r * a2, 2, 1),     mono(r * a1, 1, 2),     mono(r * r, 2, 2)};
  if (b12 > 0) out.den.push_back(mono(b12, 1, 1));
  std::array<double, 4> ratios{std::log(A0 / B0), std::log(A1 / B1), std::log(A2 / B2), std::log(A12 / B12)};
  out.L_bounds = {*std::min_element(ratios.begin(), ratios.end()), *std::max_element(ratios.begin(), ratios.end())};
  return out;
}

double exponent(const Mono& m, double d1, double d2) { return m.log_coef + m.i * d1 + m.j * d2; }

double max_exponent(const std::vector<Mono>& ms, double d1, double d2) {
  double M = -INFINITY;
  for (const Mono& m : ms) M = std::max(M, exponent(m, d1, d2));
  return M;
}

// ln sum_m exp(exponent) and its gradient in (delta1, delta2)
struct LogSum {
  double value, g1, g2;
};

LogSum log_sum(const std::vector<Mono>& ms, double d1, double d2) {
  double M = max_exponent(ms, d1, d2);
  double s = 0, s1 = 0, s2 = 0;
  for (const Mono& m : ms) {
    double w = std::exp(exponent(m, d1, d2) - M);
    s += w;
    s1 += m.i * w;
    s2 += m.j * w;
  }
  return {M + std::log(s), s1 / s, s2 / s};
}

// sum_m exp(exponent(delta* + d) - M) as a jet
T2 sum_jet(const std::vector<Mono>& ms, double d1, double d2, const T2& h1, const T2& h2, double M) {
  T2 s;
  for (const Mono& m : ms) {
    T2 e = exp(static_cast<double>(m.i) * h1 + static_cast<double>(m.j) * h2);
    s = s + std::exp(exponent(m, d1, d2) - M) * e;
  }
  return s;
}

T2 log_jet(const std::vector<Mono>& ms, double d1, double d2, const T2& h1, const T2& h2) {
  double M = max_exponent(ms, d1, d2);
  return T2::constant(M) + log(sum_jet(ms, d1, d2, h1, h2, M));
}

double gm(const TwoPhaseParams& p, int k) { return p.gamma * p.mu(k); }

}  // namespace

TwoPhaseParams two_phase_params(double t, double u0, double c1, double c2, TwoPhaseForm form) {
  std::ostringstream why;
  if (!(u0 > 0)) throw ModelError("two-phase soliton needs a positive background u0");
  TwoPhaseParams p;
  p.t = t;
  p.u0 = u0;
  p.c1 = c1;
  p.c2 = c2;
  p.form = form;
  auto mu_of = [&](double c, int k) {
    double q;
    if (form == TwoPhaseForm::Printed) {
      q = u0 * std::sqrt(u0) / c;
      if (!(q > 0 && q < 1 / (3 * std::sqrt(6.0)))) {
        why << "two-phase inequality 0 < u0^(3/2)/phi" << k << "' < 1/(3 sqrt 6) fails at t = " << t
            << " (value " << q << ")";
        throw ModelError(why.str());
      }
      return std::sqrt(1 - 3 * std::sqrt(6.0) * q);
    }
    double w = 2 * u0 / 3, ct = c - u0;
    if (!(ct > 3 * w)) {
      why << "two-phase inequality phi" << k << "' > 3 u0 fails at t = " << t;
      throw ModelError(why.str());
    }
    return std::sqrt(1 - 3 * w / ct);
  };
  p.mu1 = mu_of(c1, 1);
  p.mu2 = mu_of(c2, 2);
  if (std::fabs(p.mu1 - p.mu2) < 1e-12) throw ModelError("two-phase soliton needs distinct phase speeds");
  if (form == TwoPhaseForm::Printed) {
    p.gamma = std::sqrt(6.0) / (3 * std::sqrt(u0));
    p.scale = 12 * u0;
  } else {
    p.gamma = 1.0;
    p.scale = 8 * u0;
  }
  return p;
}

TwoPhaseParams make_two_phase_params(const CoefficientModel& m, const RegularPart& r, const PhaseFunction& p1,
                                     const PhaseFunction& p2, double t, TwoPhaseForm form) {
  double x1 = p1.phi(t), x2 = p2.phi(t);
  std::ostringstream why;
  for (auto [k, x] : {std::pair{1, x1}, std::pair{2, x2}}) {
    double a0 = m.a_k(0).value(x, t), b0 = m.b_k(0).value(x, t);
    if (std::fabs(a0 - 1) > 1e-8 || std::fabs(b0 - 3) > 1e-8) {
      why << "two-phase soliton needs a0 = 1 and b0 = 3 on phase curve " << k << "; at t = " << t << " a0 = " << a0
          << ", b0 = " << b0;
      throw ModelError(why.str());
    }
  }
  double u1 = r.u_j(0).value(x1, t), u2 = r.u_j(0).value(x2, t);
  if (std::fabs(u1 - u2) > 1e-8) {
    why << "two-phase soliton needs equal u0 on both curves; at t = " << t << " got " << u1 << " and " << u2;
    throw ModelError(why.str());
  }
  return two_phase_params(t, u1, p1.dphi(t), p2.dphi(t), form);
}

TwoPhaseState solve_deltas(const TwoPhaseParams& p, double tau1, double tau2, double tol) {
  Coefs c = coefficients(p);
  double g1 = gm(p, 1), g2 = gm(p, 2);
  auto state = [&](double L) {
    TwoPhaseState s;
    s.delta1 = g1 * (-tau1 + L);
    s.delta2 = g2 * (-tau2 + L);
    LogSum l1 = log_sum(c.d1, s.delta1, s.delta2), l2 = log_sum(c.d2, s.delta1, s.delta2);
    s.log_delta1 = l1.value;
    s.log_delta2 = l2.value;
    double dL = (l1.g1 - l2.g1) * g1 + (l1.g2 - l2.g2) * g2;
    return std::pair{s, dL};
  };
  // The fixed point L = ln(Delta1/Delta2)(delta(L)) lies between the extreme
  // coefficient ratios, which gives a bracket.
  auto g = [&](double L) { return state(L).first.L() - L; };
  double lo = c.L_bounds[0] - 1e-9, hi = c.L_bounds[1] + 1e-9;
  double L = find_root_monotone(g, lo, hi, 1e-15);
  for (int it = 0; it < 3; ++it) {
    auto [s, dL] = state(L);
    double f = s.L() - L, df = dL - 1.0;
    if (df == 0.0) break;
    double next = L - f / df;
    if (!(next >= lo && next <= hi)) break;
    L = next;
  }
  TwoPhaseState s = state(L).first;
  s.defect = std::max(std::fabs(s.delta1 - g1 * (-tau1 + s.L())), std::fabs(s.delta2 - g2 * (-tau2 + s.L())));
  // relative to the size of delta: far out the defect is rounding of a large number
  if (!(s.defect < tol * std::max({1.0, std::fabs(s.delta1), std::fabs(s.delta2)}))) {
    std::ostringstream os;
    os << "delta system did not converge at tau = (" << tau1 << ", " << tau2 << "), defect " << s.defect;
    throw NonConvergence(os.str());
  }
  return s;
}

std::array<double, 2> taus_from_state(const TwoPhaseParams& p, const TwoPhaseState& s) {
  return {-s.delta1 / gm(p, 1) + s.L(), -s.delta2 / gm(p, 2) + s.L()};
}

double eval_V0_two_phase(const TwoPhaseParams& p, const TwoPhaseState& s) {
  Coefs c = coefficients(p);
  double M = max_exponent(c.den, s.delta1, s.delta2);
  double num = 0, den = 0;
  for (const Mono& m : c.num) num += std::exp(exponent(m, s.delta1, s.delta2) - M);
  for (const Mono& m : c.den) den += std::exp(exponent(m, s.delta1, s.delta2) - M);
  return p.scale * num / den;
}

double eval_V0_two_phase(const TwoPhaseParams& p, double tau1, double tau2) {
  return eval_V0_two_phase(p, solve_deltas(p, tau1, tau2));
}

TwoPhaseDerivs eval_V0_derivs(const TwoPhaseParams& p, double tau1, double tau2) {
  Coefs c = coefficients(p);
  TwoPhaseState s = solve_deltas(p, tau1, tau2);
  double d1 = s.delta1, d2 = s.delta2;
  double g1 = gm(p, 1), g2 = gm(p, 2);
  // tau(delta* + h) - tau* as jets in h
  auto tau_shift = [&](const T2& h1, const T2& h2) {
    T2 L = log_jet(c.d1, d1, d2, h1, h2) - log_jet(c.d2, d1, d2, h1, h2);
    L.c[0][0] = 0.0;  // subtract L(delta*)
    return std::pair{L - (1 / g1) * h1, L - (1 / g2) * h2};
  };
  // Jacobian of tau with respect to delta at delta*
  auto [J1, J2] = tau_shift(T2::var(1), T2::var(2));
  double a = J1.c[1][0], b = J1.c[0][1], cc = J2.c[1][0], d = J2.c[0][1];
  double det = a * d - b * cc;
  if (det == 0.0) throw ConstructionError("degenerate delta map");
  auto solve = [&](const T2& r1, const T2& r2) {
    return std::pair{(1 / det) * (d * r1 - b * r2), (1 / det) * (a * r2 - cc * r1)};
  };
  T2 e1 = T2::var(1), e2 = T2::var(2);
  T2 h1, h2;
  for (int it = 0; it < 4; ++it) {
    auto [t1, t2] = tau_shift(h1, h2);
    auto [c1, c2] = solve(e1 - t1, e2 - t2);
    h1 = h1 + c1;
    h2 = h2 + c2;
  }
  double M = max_exponent(c.den, d1, d2);
  T2 V = p.scale * (sum_jet(c.num, d1, d2, h1, h2, M) * recip(sum_jet(c.den, d1, d2, h1, h2, M)));
  TwoPhaseDerivs out;
  const double fact[4] = {1, 1, 2, 6};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) out.d[i][j] = V.c[i][j] * fact[i] * fact[j];
  return out;
}

double limit_profile(const TwoPhaseParams& p, int k, int sign, double tau_other) {
  int s = 3 - k;
  double ms = p.mu(s), ss = ms * ms, g = gm(p, s);
  double m1 = p.mu1, m2 = p.mu2;
  double r = (m1 - m2) * (m1 - m2) / ((m1 + m2) * (m1 + m2));
  // Delta_i reduced to the surviving powers of E_k: coefficients (c0 + cs E_s)
  double A0, As, B0, Bs;
  double mk = p.mu(k);
  if (sign > 0) {
    A0 = (1 - m1) * (1 - m2);
    As = (1 - mk) * (1 + ms);
    B0 = (1 + m1) * (1 + m2);
    Bs = (1 + mk) * (1 - ms);
  } else {
    A0 = (1 + mk) * (1 - ms);
    As = (1 + m1) * (1 + m2) * r;
    B0 = (1 - mk) * (1 + ms);
    Bs = (1 - m1) * (1 - m2) * r;
  }
  auto Lof = [&](double d) {
    return log_add_exp(std::log(A0), std::log(As) + d) - log_add_exp(std::log(B0), std::log(Bs) + d);
  };
  double lo = std::min(std::log(A0 / B0), std::log(As / Bs)) - 1e-9;
  double hi = std::max(std::log(A0 / B0), std::log(As / Bs)) + 1e-9;
  double L = find_root_monotone([&](double L) { return Lof(g * (-tau_other + L)) - L; }, lo, hi, 1e-15);
  double d = g * (-tau_other + L);
  // evaluate with E_s = exp(d) scaled to avoid overflow
  if (sign > 0) {
    // 12 mu^2 E / ((1 - mu^2)^2 (1 + E^2) + 2 (1 - mu^4) E), divided through by E
    double den = (1 - ss) * (1 - ss) * 2 * std::cosh(d) + 2 * (1 - ss * ss);
    return p.scale * ss / den;
  }
  double D = (m1 * m1 - m2 * m2) * (m1 * m1 - m2 * m2);
  double P = std::pow(m1 + m2, 4), Q = std::pow(m1 - m2, 4);
  // P + 2 D (1 + mu^2)/(1 - mu^2) E + Q E^2, divided through by E
  double den = P * std::exp(-d) + 2 * D * (1 + ss) / (1 - ss) + Q * std::exp(d);
  return p.scale * D * ss / ((1 - ss) * (1 - ss)) / den;
}

// ---------------------------------------------------------------- candidate

TwoPhaseSoliton::TwoPhaseSoliton(CoefficientModel m, RegularPart r, PhaseFunction p1, PhaseFunction p2,
                                 Interval window, TwoPhaseOptions opt)
    : m_(std::move(m)), r_(std::move(r)), p1_(std::move(p1)), p2_(std::move(p2)), window_(window), opt_(opt) {}

TwoPhaseParams TwoPhaseSoliton::params(double t) const {
  return make_two_phase_params(m_, r_, p1_, p2_, t, opt_.form);
}

double TwoPhaseSoliton::decay_rate(double t) const {
  TwoPhaseParams p = params(t);
  return p.gamma * std::min(p.mu1, p.mu2);
}

double TwoPhaseSoliton::value(double x, double t, double eps) const {
  TwoPhaseParams p = params(t);
  double tau1 = (x - p1_.phi(t)) / eps, tau2 = (x - p2_.phi(t)) / eps;
  return r_.u_j(0).value(x, t) + eval_V0_two_phase(p, tau1, tau2);
}

Jet TwoPhaseSoliton::jet(double x, double t, double eps) const {
  Jet j;
  add_regular(j, r_.u_j(0).jet(x, t), 1.0);
  TwoPhaseParams p = params(t);
  double tau1 = (x - p1_.phi(t)) / eps, tau2 = (x - p2_.phi(t)) / eps;
  auto D = eval_V0_derivs(p, tau1, tau2).d;
  double c1 = p1_.dphi(t), c2 = p2_.dphi(t);
  double Vx = D[1][0] + D[0][1];
  double Vxx = D[2][0] + 2 * D[1][1] + D[0][2];
  double Vxxx = D[3][0] + 3 * D[2][1] + 3 * D[1][2] + D[0][3];
  double CV = c1 * D[1][0] + c2 * D[0][1];
  double CVxx = c1 * (D[3][0] + 2 * D[2][1] + D[1][2]) + c2 * (D[2][1] + 2 * D[1][2] + D[0][3]);
  // t-derivatives at fixed tau come only through u0(t) and the speeds
  double Vt = 0, Vxxt = 0;
  TimeStencil st = time_stencil(t, window_);
  std::array<TwoPhaseParams, 3> ps;
  bool frozen = true;
  for (int i = 0; i < 3; ++i) {
    ps[i] = i == st.centre ? p : params(st.ts[i]);
    frozen = frozen && ps[i].u0 == p.u0 && ps[i].c1 == p.c1 && ps[i].c2 == p.c2;
  }
  if (!frozen) {
    for (int i = 0; i < 3; ++i) {
      if (st.w[i] == 0.0) continue;
      auto Di = i == st.centre ? D : eval_V0_derivs(ps[i], tau1, tau2).d;
      Vt += st.w[i] * Di[0][0];
      Vxxt += st.w[i] * (Di[2][0] + 2 * Di[1][1] + Di[0][2]);
    }
  }
  double ie = 1 / eps;
  j.u += D[0][0];
  j.ux += Vx * ie;
  j.uxx += Vxx * ie * ie;
  j.uxxx += Vxxx * ie * ie * ie;
  j.ut += Vt - CV * ie;
  j.utxx += (Vxxt - CVxx * ie) * ie * ie;
  return j;
}

std::shared_ptr<TwoPhaseSoliton> assemble_two_phase(const ModelFile& mf, TwoPhaseOptions opt) {
  CoefficientModel m = build_coefficients(mf);
  check_positivity(m, mf.domain);
  RegularPart r = build_regular(mf, m);
  PhaseFunction p1 = build_phase(mf, m, r, "phi1");
  PhaseFunction p2 = build_phase(mf, m, r, "phi2");
  Interval w{std::max(p1.window.lo, p2.window.lo), std::min(p1.window.hi, p2.window.hi)};
  if (!(w.hi > w.lo)) throw ModelError("two-phase soliton: the phase functions share no time interval");
  if (std::fabs(p1.phi(w.lo) - p2.phi(w.lo)) > 1e-8)
    throw ModelError("two-phase soliton: the phase curves must start from the same point");
  for (double t : linspace(w.lo, w.hi, 201)) make_two_phase_params(m, r, p1, p2, t, opt.form);
  return std::make_shared<TwoPhaseSoliton>(m, r, p1, p2, w, opt);
}

}  // namespace vcch
