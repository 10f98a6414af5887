#include "vcch/peakon1.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vcch {

// ---------------------------------------------------------------- main term

PeakonMainTerm::PeakonMainTerm(CoefficientModel m, RegularPart r, PhaseFunction p,
                               std::function<double(double)> amplitude, std::function<double(double)> offset)
    : m_(std::move(m)), r_(std::move(r)), p_(std::move(p)), A_(std::move(amplitude)), beta_(std::move(offset)) {}

double PeakonMainTerm::alpha(double t) const {
  double b0 = m_.b_k(0).value(p_.phi(t), t);
  if (!(b0 > 0.0)) {
    std::ostringstream os;
    os << "b0 must be positive on the phase curve; b0 = " << b0 << " at t = " << t;
    throw ModelError(os.str());
  }
  return std::sqrt(b0 / 3.0);
}

double PeakonMainTerm::dalpha(double t) const {
  FieldJet b = m_.b_k(0).jet(p_.phi(t), t);
  return (b.fx * p_.dphi(t) + b.ft) / (6.0 * alpha(t));
}

SingularJet PeakonMainTerm::jet(double t, double tau, int side) const {
  double a = alpha(t), da = dalpha(t), A = amplitude(t), beta = offset(t);
  double s = tau - beta;
  int sg = s > 0 ? 1 : s < 0 ? -1 : (side >= 0 ? 1 : -1);
  double v = A * std::exp(-a * std::fabs(s));
  double dA = 0, db = 0;
  const double h = 1e-5;
  if (A_) dA = (A_(t + h) - A_(t - h)) / (2 * h);
  if (beta_) db = (beta_(t + h) - beta_(t - h)) / (2 * h);
  SingularJet j;
  j.v = v;
  j.vtau = -sg * a * v;
  j.vtau2 = a * a * v;
  j.vtau3 = -sg * a * a * a * v;
  j.vt = (A != 0.0 ? dA / A : 0.0) * v - da * std::fabs(s) * v + a * sg * db * v;
  j.vtau2t = 2 * a * da * v + a * a * j.vt;
  return j;
}

PeakonMainTerm make_peakon_main(const CoefficientModel& m, const RegularPart& r, const PhaseFunction& p) {
  PeakonMainTerm main(m, r, p);
  for (double t : linspace(p.window.lo, p.window.hi, 51)) main.alpha(t);
  return main;
}

// ---------------------------------------------------------------- source

ACoefficients compute_A_coeffs(const PeakonMainTerm& main, double t) {
  const auto& m = main.model();
  const auto& r = main.regular();
  double x = main.phase().phi(t), dphi = main.phase().dphi(t);
  double a = main.alpha(t), da = main.dalpha(t);
  FieldJet a0 = m.a_k(0).jet(x, t), b0 = m.b_k(0).jet(x, t), u0 = r.u_j(0).jet(x, t);
  double a1 = m.a.size() > 1 ? m.a_k(1).value(x, t) : 0.0;
  double b1 = m.b.size() > 1 ? m.b_k(1).value(x, t) : 0.0;
  ACoefficients c;
  c.A1[0] = 2 * a * da + a0.f * da - (a * a * da + a1 * a * dphi);
  c.A1[1] = 2 * a * da - a0.f * da - (-a * a * da - a1 * a * dphi);
  c.A2[0] = b0.fx * u0.f + b0.f * u0.fx - a0.fx * dphi;
  c.A2[1] = -c.A2[0];
  c.A3[0] = b1 * a;
  c.A3[1] = -c.A3[0];
  c.A4[0] = b0.fx * a;
  c.A4[1] = -c.A4[0];
  return c;
}

PeakonSource compute_Phi1_pm(const ACoefficients& A, double alpha) { return {A, alpha}; }

double PeakonSource::Phi_side(int side, double s) const {
  double a = alpha;
  if (side == 0) {
    return -(A.A1[0] + A.A2[0] * (1 / a + s)) * std::exp(-a * s) / a -
           (A.A3[0] + A.A4[0] * (1 / (2 * a) + s)) * std::exp(-2 * a * s) / (2 * a);
  }
  double tau = -s;
  return (A.A1[1] + A.A2[1] * (-1 / a + tau)) * std::exp(a * tau) / a +
         (A.A3[1] + A.A4[1] * (-1 / (2 * a) + tau)) * std::exp(2 * a * tau) / (2 * a);
}

double PeakonSource::F_side(int side, double s) const {
  double a = alpha;
  if (side == 0) return (A.A1[0] + A.A2[0] * s) * std::exp(-a * s) + (A.A3[0] + A.A4[0] * s) * std::exp(-2 * a * s);
  double tau = -s;
  return (A.A1[1] + A.A2[1] * tau) * std::exp(a * tau) + (A.A3[1] + A.A4[1] * tau) * std::exp(2 * a * tau);
}

double PeakonSource::Phi(double tau) const { return tau >= 0 ? Phi_side(0, tau) : Phi_side(1, -tau); }

double PeakonSource::F(double tau) const { return tau >= 0 ? F_side(0, tau) : F_side(1, -tau); }

// ---------------------------------------------------------------- fundamental system

namespace {

// second solution on s >= 0 and its s-derivative
std::pair<double, double> second_solution(double a, double dphi, double s) {
  double E = std::exp(a * s), k = 1.0 / dphi, d3 = dphi * dphi * dphi;
  double lg = std::log(E - k);
  double y = (dphi + 0.5 * dphi * dphi * E + lg / E) / (a * d3);
  double dy = (0.5 * dphi * dphi * E - lg / E + 1.0 / (E - k)) / d3;
  return {y, dy};
}

}  // namespace

FundamentalValues fundamental_system(double alpha, double dphi, int side, double tau) {
  if (!(dphi > 1.0)) {
    std::ostringstream os;
    os << "peakon correction needs phi' > 1, got " << dphi;
    throw ConstructionError(os.str());
  }
  double sg = side >= 0 ? 1.0 : -1.0, s = std::fabs(tau);
  auto [Y, dY] = second_solution(alpha, dphi, s);
  double e = std::exp(-alpha * s);
  return {e, -sg * alpha * e, sg * Y, dY};
}

// ---------------------------------------------------------------- correction

PiecewiseCorrection solve_correction_peakon(const PeakonMainTerm& main, double t, const PeakonSource& src,
                                            const PeakonCorrectionOptions& opt) {
  if (!main.is_normalised())
    throw ConstructionError("the first peakon correction is built for amplitude 1 and zero offset");
  PiecewiseCorrection c;
  c.t = t;
  c.alpha = main.alpha(t);
  c.dphi = main.phase().dphi(t);
  double x = main.phase().phi(t);
  c.a0 = main.model().a_k(0).value(x, t);
  c.b0 = main.model().b_k(0).value(x, t);
  c.u0 = main.regular().u_j(0).value(x, t);
  c.source = src;
  c.cutoff = opt.cutoff_factor / c.alpha;
  FundamentalValues f0 = fundamental_system(c.alpha, c.dphi, 1, 0.0);
  c.pW = (c.dphi - 1.0) * (f0.y1 * f0.dy2 - f0.dy1 * f0.y2);
  std::vector<double> s = linspace(0.0, c.cutoff, opt.nodes);
  for (int side = 0; side < 2; ++side) {
    double sg = side == 0 ? 1.0 : -1.0;
    std::size_t n = s.size();
    std::vector<double> g1(n), g2(n), dg1(n), dg2(n);
    for (std::size_t i = 0; i < n; ++i) {
      double ph = src.Phi_side(side, s[i]), dph = sg * src.F_side(side, s[i]);
      double e = std::exp(-c.alpha * s[i]);
      auto [Y, dY] = second_solution(c.alpha, c.dphi, s[i]);
      g1[i] = ph * e / c.pW;
      g2[i] = ph * Y / c.pW;
      dg1[i] = (dph - c.alpha * ph) * e / c.pW;
      dg2[i] = (dph * Y + ph * dY) / c.pW;
    }
    // T is accumulated from the far end: it multiplies the growing y2
    std::vector<double> rs(n), rg(n);
    for (std::size_t i = 0; i < n; ++i) {
      rs[i] = -s[n - 1 - i];
      rg[i] = g1[n - 1 - i];
    }
    std::vector<double> rc = cumulative_integral(rs, rg);
    QuinticGrid& T = c.T[side];
    QuinticGrid& I2 = c.I2[side];
    T.nodes = I2.nodes = s;
    T.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) T.f[i] = rc[n - 1 - i];
    T.d1 = g1;
    T.d2 = dg1;
    for (std::size_t i = 0; i < n; ++i) {
      T.d1[i] = -T.d1[i];
      T.d2[i] = -T.d2[i];
    }
    I2.f = cumulative_integral(s, g2);
    I2.d1 = g2;
    I2.d2 = dg2;
  }
  double Y0 = second_solution(c.alpha, c.dphi, 0.0).first;
  c.c1[1] = 0.0;
  c.c1[0] = Y0 * (c.T[0].f[0] - c.T[1].f[0]);
  return c;
}

PiecewiseCorrection solve_correction_peakon(const PeakonMainTerm& main, double t,
                                            const PeakonCorrectionOptions& opt) {
  return solve_correction_peakon(main, t, compute_Phi1_pm(compute_A_coeffs(main, t), main.alpha(t)), opt);
}

PeakonCorrectionJet PiecewiseCorrection::eval(double tau) const {
  PeakonCorrectionJet out;
  double s = std::fabs(tau);
  if (s >= cutoff) return out;
  int side = tau >= 0 ? 0 : 1;
  double sg = side == 0 ? 1.0 : -1.0;
  double e = std::exp(-alpha * s);
  auto [Y, dY] = second_solution(alpha, dphi, s);
  double i2 = I2[side].eval(s).first, T0 = T[side].eval(s).first;
  out.v = e * (c1[side] - i2) - Y * T0;
  out.d1 = sg * (-alpha * e * (c1[side] - i2) - dY * T0);
  double v0 = e, v0t = -sg * alpha * e, v0tt = alpha * alpha * e;
  double p = dphi - v0, q = -v0t, r = b0 * (v0 + u0) - a0 * dphi - v0tt;
  double dp = -v0t, dq = -v0tt, dr = b0 * v0t + sg * alpha * alpha * alpha * e;
  out.d2 = (source.Phi(tau) - q * out.d1 - r * out.v) / p;
  out.d3 = (source.F(tau) - (dp + q) * out.d2 - (dq + r) * out.d1 - dr * out.v) / p;
  return out;
}

double envelope_constant(const PiecewiseCorrection& c) {
  double C = 0.0;
  for (double s : linspace(0.0, c.cutoff * 0.9, 2001))
    for (double sg : {1.0, -1.0}) {
      double w = std::fabs(c.value(sg * s)) * std::exp(c.alpha * s) / ((1 + s) * (1 + s));
      C = std::max(C, w);
    }
  return C;
}

// ---------------------------------------------------------------- candidate

OnePhasePeakon::OnePhasePeakon(std::shared_ptr<const PeakonMainTerm> main, int order,
                               PeakonCorrectionOptions opt, double band)
    : main_(std::move(main)), order_(order), opt_(opt), band_(band) {
  if (order_ < 0 || order_ > 1) throw ModelError("one-phase peakon supports orders 0 and 1");
  if (order_ == 1) correction(main_->window().lo);
}

std::shared_ptr<const PiecewiseCorrection> OnePhasePeakon::correction(double t) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
  }
  auto c = std::make_shared<const PiecewiseCorrection>(solve_correction_peakon(*main_, t, opt_));
  std::lock_guard<std::mutex> lock(mu_);
  if (cache_.size() > 4096) cache_.clear();
  cache_.emplace(t, c);
  return c;
}

std::vector<Interval> OnePhasePeakon::excluded(double t, double eps) const {
  double xc = main_->phase().phi(t) + eps * main_->offset(t);
  return {{xc - band_ * eps, xc + band_ * eps}};
}

std::vector<double> OnePhasePeakon::centers(double t) const { return {main_->phase().phi(t)}; }

double OnePhasePeakon::value(double x, double t, double eps) const {
  const auto& r = main_->regular();
  double tau = (x - main_->phase().phi(t)) / eps;
  double y = r.u_j(0).value(x, t) + main_->jet(t, tau).v;
  if (order_ >= 1) {
    double u1 = r.u.size() > 1 ? r.u_j(1).value(x, t) : 0.0;
    y += eps * (u1 + correction(t)->value(tau));
  }
  return y;
}

Jet OnePhasePeakon::jet(double x, double t, double eps) const {
  const auto& r = main_->regular();
  double tau = (x - main_->phase().phi(t)) / eps;
  if (std::fabs(tau - main_->offset(t)) < band_) {
    std::ostringstream os;
    os << "derivative requested inside the crest band at x = " << x << ", t = " << t;
    throw BandViolation(os.str());
  }
  double dphi = main_->phase().dphi(t);
  Jet j;
  add_regular(j, r.u_j(0).jet(x, t), 1.0);
  add_singular(j, main_->jet(t, tau), eps, 0, dphi);
  if (order_ >= 1) {
    if (r.u.size() > 1) add_regular(j, r.u_j(1).jet(x, t), eps);
    TimeStencil st = time_stencil(t, main_->window());
    SingularJet s;
    for (int k = 0; k < 3; ++k) {
      PeakonCorrectionJet c = correction(st.ts[k])->eval(tau);
      if (k == st.centre) {
        s.v = c.v;
        s.vtau = c.d1;
        s.vtau2 = c.d2;
        s.vtau3 = c.d3;
      }
      s.vt += st.w[k] * c.v;
      s.vtau2t += st.w[k] * c.d2;
    }
    add_singular(j, s, eps, 1, dphi);
  }
  return j;
}

std::shared_ptr<OnePhasePeakon> assemble_peakon(const ModelFile& mf, int order, PeakonCorrectionOptions opt) {
  CoefficientModel m = build_coefficients(mf);
  check_positivity(m, mf.domain);
  RegularPart r = build_regular(mf, m);
  PhaseFunction p = build_phase(mf, m, r, "phi");
  // the construction needs phi' > 1; the window ends where it first fails
  double end = p.window.lo;
  bool any = false;
  for (double t : linspace(p.window.lo, p.window.hi, 401)) {
    if (!(p.dphi(t) > 1.0) || !(m.b_k(0).value(p.phi(t), t) > 0.0)) break;
    end = t;
    any = true;
  }
  if (!any) throw ConstructionError("peakon window is empty: need phi' > 1 and b0 > 0 on the phase curve");
  p.window.hi = end;
  auto main = std::make_shared<PeakonMainTerm>(make_peakon_main(m, r, p));
  return std::make_shared<OnePhasePeakon>(main, order, opt);
}

ClassicalPeakon::ClassicalPeakon(double c, Interval window, double band) : c_(c), window_(window), band_(band) {
  if (!(c > 0)) throw ModelError("classical peakon needs a positive speed");
  Expression one = parse_expression("1"), three = parse_expression("3");
  m_.a = {expression_field(one)};
  m_.b = {expression_field(three)};
}

double ClassicalPeakon::value(double x, double t, double eps) const {
  return c_ * std::exp(-std::fabs(x - c_ * t) / eps);
}

Jet ClassicalPeakon::jet(double x, double t, double eps) const {
  double tau = (x - c_ * t) / eps;
  if (std::fabs(tau) <= band_) throw BandViolation("derivative requested inside the classical peakon crest band");
  double s = tau > 0 ? 1.0 : -1.0, u = c_ * std::exp(-std::fabs(tau)), ie = 1 / eps;
  Jet j;
  j.u = u;
  j.ux = -s * u * ie;
  j.uxx = u * ie * ie;
  j.uxxx = -s * u * ie * ie * ie;
  j.ut = c_ * s * u * ie;
  j.utxx = c_ * s * u * ie * ie * ie;
  return j;
}

std::vector<Interval> ClassicalPeakon::excluded(double t, double eps) const {
  double x = c_ * t;
  return {{x - band_ * eps, x + band_ * eps}};
}

}  // namespace vcch
