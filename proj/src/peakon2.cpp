#include "vcch/peakon2.hpp"

#include <cmath>
#include <sstream>

namespace vcch {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

struct Term {
  double A, dA, q, dq;  // amplitude, centre and their eta-derivatives
};

std::array<Term, 2> terms(const TwoPeakonParams& p, double eta) {
  double c1 = p.c1, c2 = p.c2, d = c1 - c2, lr = std::log(c1 / c2);
  std::array<Term, 2> out;
  // first term: weights e^{-c eta}
  double s = sigmoid(-d * eta), f = sigmoid(lr - d * eta);
  out[0].A = c2 + d * s;
  out[0].dA = -d * d * s * (1 - s);
  out[0].q = std::log(d) - log_add_exp(std::log(c1) - c1 * eta, std::log(c2) - c2 * eta);
  out[0].dq = c1 * f + c2 * (1 - f);
  // second term: weights e^{+c eta}
  s = sigmoid(d * eta);
  f = sigmoid(lr + d * eta);
  out[1].A = c2 + d * s;
  out[1].dA = d * d * s * (1 - s);
  out[1].q = log_add_exp(std::log(c1) + c1 * eta, std::log(c2) + c2 * eta) - std::log(d);
  out[1].dq = c1 * f + c2 * (1 - f);
  return out;
}

}  // namespace

TwoPeakonParams two_peakon_params(double t, double c1, double c2) {
  if (!(c1 > c2 && c2 > 0)) {
    std::ostringstream os;
    os << "two-phase peakon needs phi1' > phi2' > 0; at t = " << t << " got " << c1 << " and " << c2;
    throw ModelError(os.str());
  }
  return {t, c1, c2};
}

TwoPeakonParams make_two_peakon_params(const CoefficientModel& m, const RegularPart& r, const PhaseFunction& p1,
                                       const PhaseFunction& p2, double t) {
  for (auto [k, x] : {std::pair{1, p1.phi(t)}, std::pair{2, p2.phi(t)}}) {
    double a0 = m.a_k(0).value(x, t), b0 = m.b_k(0).value(x, t), u0 = r.u_j(0).value(x, t);
    std::ostringstream os;
    if (std::fabs(a0 - 1) > 1e-8 || std::fabs(b0 - 3) > 1e-8) {
      os << "two-phase peakon needs a0 = 1 and b0 = 3 on phase curve " << k << "; at t = " << t << " a0 = " << a0
         << ", b0 = " << b0;
      throw ModelError(os.str());
    }
    if (std::fabs(u0) > 1e-12) {
      os << "two-phase peakon needs the trivial background u0 = 0; at t = " << t << " u0 = " << u0;
      throw ModelError(os.str());
    }
  }
  return two_peakon_params(t, p1.dphi(t), p2.dphi(t));
}

XiEta to_xi_eta(const TwoPeakonParams& p, double tau1, double tau2) {
  double d = p.c2 - p.c1;
  return {(p.c2 * tau1 - p.c1 * tau2) / d, (tau1 - tau2) / d};
}

std::array<double, 2> from_xi_eta(const TwoPeakonParams& p, const XiEta& z) {
  return {z.xi - p.c1 * z.eta, z.xi - p.c2 * z.eta};
}

std::array<double, 2> exponent_rates(const TwoPeakonParams& p) {
  double d = p.c1 - p.c2;
  return {p.c1 / d, p.c2 / d};
}

std::array<double, 2> crest_xi(const TwoPeakonParams& p, double eta) {
  auto T = terms(p, eta);
  return {T[0].q, T[1].q};
}

std::array<double, 2> crest_weights(const TwoPeakonParams& p, double eta) {
  auto T = terms(p, eta);
  return {T[0].A, T[1].A};
}

double eval_V0_two_peakon(const TwoPeakonParams& p, const XiEta& z) {
  double v = 0;
  for (const Term& T : terms(p, z.eta)) v += T.A * std::exp(-std::fabs(z.xi - T.q));
  return v;
}

double eval_V0_two_peakon(const TwoPeakonParams& p, double tau1, double tau2) {
  return eval_V0_two_peakon(p, to_xi_eta(p, tau1, tau2));
}

TwoPeakonJet eval_V0_two_peakon_jet(const TwoPeakonParams& p, const XiEta& z) {
  TwoPeakonJet j;
  for (const Term& T : terms(p, z.eta)) {
    double dx = z.xi - T.q;
    if (dx == 0.0) throw BandViolation("two-peakon derivative requested on a crest");
    double s = dx > 0 ? 1.0 : -1.0, e = std::exp(-std::fabs(dx));
    double v = T.A * e, ve = (T.dA + s * T.dq * T.A) * e;
    j.v += v;
    j.xi += -s * v;
    j.xi2 += v;
    j.xi3 += -s * v;
    j.eta += ve;
    j.xi2eta += ve;
  }
  return j;
}

double limit_profile_peakon(const TwoPeakonParams& p, int k, int sign, double tau_other) {
  // the surviving peakon travels with the other phase and has its speed as height
  double c = k == 1 ? p.c2 : p.c1, d = p.c1 - p.c2;
  return c * std::exp(-std::fabs(tau_other - sign * std::log(c / d)));
}

// ---------------------------------------------------------------- candidate

TwoPhasePeakon::TwoPhasePeakon(CoefficientModel m, RegularPart r, PhaseFunction p1, PhaseFunction p2,
                               Interval window, double band)
    : m_(std::move(m)), r_(std::move(r)), p1_(std::move(p1)), p2_(std::move(p2)), window_(window), band_(band) {}

TwoPeakonParams TwoPhasePeakon::params(double t) const { return make_two_peakon_params(m_, r_, p1_, p2_, t); }

XiEta TwoPhasePeakon::coords(double x, double t, double eps, const TwoPeakonParams& p) const {
  return to_xi_eta(p, (x - p1_.phi(t)) / eps, (x - p2_.phi(t)) / eps);
}

std::array<double, 2> TwoPhasePeakon::crest_x(double t, double eps) const {
  TwoPeakonParams p = params(t);
  double f1 = p1_.phi(t), f2 = p2_.phi(t);
  double eta = (f2 - f1) / (eps * (p.c2 - p.c1));
  double shift = (p.c2 * f1 - p.c1 * f2) / (p.c2 - p.c1);
  auto q = crest_xi(p, eta);
  return {eps * q[0] + shift, eps * q[1] + shift};
}

std::vector<Interval> TwoPhasePeakon::excluded(double t, double eps) const {
  std::vector<Interval> out;
  for (double x : crest_x(t, eps)) out.push_back({x - band_ * eps, x + band_ * eps});
  return out;
}

double TwoPhasePeakon::value(double x, double t, double eps) const {
  TwoPeakonParams p = params(t);
  return r_.u_j(0).value(x, t) + eval_V0_two_peakon(p, coords(x, t, eps, p));
}

Jet TwoPhasePeakon::jet(double x, double t, double eps) const {
  for (const Interval& b : excluded(t, eps))
    if (b.contains(x)) throw BandViolation("derivative requested inside a two-peakon crest band");
  Jet j;
  add_regular(j, r_.u_j(0).jet(x, t), 1.0);
  TwoPeakonParams p = params(t);
  double tau1 = (x - p1_.phi(t)) / eps, tau2 = (x - p2_.phi(t)) / eps;
  TwoPeakonJet v = eval_V0_two_peakon_jet(p, to_xi_eta(p, tau1, tau2));
  // explicit t-dependence at fixed tau enters only through the speeds
  double Vt = 0, Vxxt = 0;
  TimeStencil st = time_stencil(t, window_);
  std::array<TwoPeakonParams, 3> ps;
  bool frozen = true;
  for (int i = 0; i < 3; ++i) {
    ps[i] = i == st.centre ? p : params(st.ts[i]);
    frozen = frozen && ps[i].c1 == p.c1 && ps[i].c2 == p.c2;
  }
  if (!frozen) {
    for (int i = 0; i < 3; ++i) {
      TwoPeakonJet w = i == st.centre ? v : eval_V0_two_peakon_jet(ps[i], to_xi_eta(ps[i], tau1, tau2));
      Vt += st.w[i] * w.v;
      Vxxt += st.w[i] * w.xi2;
    }
  }
  double ie = 1 / eps;
  j.u += v.v;
  j.ux += v.xi * ie;
  j.uxx += v.xi2 * ie * ie;
  j.uxxx += v.xi3 * ie * ie * ie;
  j.ut += Vt + v.eta * ie;
  j.utxx += (Vxxt + v.xi2eta * ie) * ie * ie;
  return j;
}

std::shared_ptr<TwoPhasePeakon> assemble_two_peakon(const ModelFile& mf) {
  CoefficientModel m = build_coefficients(mf);
  check_positivity(m, mf.domain);
  RegularPart r = build_regular(mf, m);
  for (double t : linspace(mf.domain.t0, mf.domain.t1, 11))
    for (double x : linspace(mf.domain.x0, mf.domain.x1, 41))
      if (std::fabs(r.u_j(0).value(x, t)) > 1e-12)
        throw ModelError("two-phase peakon needs the trivial background u0 = 0");
  PhaseFunction p1 = build_phase(mf, m, r, "phi1");
  PhaseFunction p2 = build_phase(mf, m, r, "phi2");
  Interval w{std::max(p1.window.lo, p2.window.lo), std::min(p1.window.hi, p2.window.hi)};
  if (!(w.hi > w.lo)) throw ModelError("two-phase peakon: the phase functions share no time interval");
  if (std::fabs(p1.phi(w.lo) - p2.phi(w.lo)) > 1e-8)
    throw ModelError("two-phase peakon: the phase curves must start from the same point");
  for (double t : linspace(w.lo, w.hi, 201)) make_two_peakon_params(m, r, p1, p2, t);
  return std::make_shared<TwoPhasePeakon>(m, r, p1, p2, w);
}

}  // namespace vcch
