#include "vcch/soliton1.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace vcch {

// ---------------------------------------------------------------- profile

SolitonProfileParams make_soliton_params(double t, double phi, double dphi, double a0, double b0,
                                         double u0) {
  SolitonProfileParams p;
  p.t = t; p.phi = phi; p.dphi = dphi; p.a0 = a0; p.b0 = b0; p.u0 = u0;
  p.D = a0 * dphi - b0 * u0;
  if (!(b0 > 0.0) || !(dphi > 0.0)) {
    std::ostringstream os;
    os << "soliton profile needs b0 > 0 and phi' > 0 at t = " << t;
    throw ModelError(os.str());
  }
  p.ratio = 3.0 * p.D / (b0 * dphi);
  if (!(p.ratio > 0.0 && p.ratio < 1.0)) {
    std::ostringstream os;
    os << "soliton window violated at t = " << t << ": 3(a0 phi' - b0 u0)/(b0 phi') = " << p.ratio
       << " is not in (0, 1)";
    throw ModelError(os.str());
  }
  p.amp = 3.0 * p.D / b0;
  p.theta0 = std::atanh(std::sqrt(p.ratio));
  p.stretch = 2.0 * std::sqrt(dphi / p.D);
  p.log_coef = std::sqrt(3.0 / b0);
  p.decay = std::sqrt(p.D / dphi);
  return p;
}

SolitonProfileParams soliton_params(const CoefficientModel& m, const RegularPart& r,
                                    const PhaseFunction& ph, double t) {
  double x = ph.phi(t);
  return make_soliton_params(t, x, ph.dphi(t), m.a_k(0).value(x, t), m.b_k(0).value(x, t),
                             r.u_j(0).value(x, t));
}

double theta_to_tau(const SolitonProfileParams& p, double th) {
  return p.stretch * th + p.log_coef * (log_cosh(th - p.theta0) - log_cosh(th + p.theta0));
}

double dtau_dtheta(const SolitonProfileParams& p, double th) {
  return p.stretch + p.log_coef * (std::tanh(th - p.theta0) - std::tanh(th + p.theta0));
}

double tau_to_theta(const SolitonProfileParams& p, double tau, double tol, double hint) {
  // |tau - stretch theta| <= 2 log_coef theta0 gives an exact bracket
  double w = 2.0 * p.log_coef * p.theta0;
  double lo = (tau - w) / p.stretch, hi = (tau + w) / p.stretch;
  double th = std::isnan(hint) ? (tau + (tau > 0 ? w : -w)) / p.stretch : hint;
  if (!(th > lo && th < hi)) th = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    double f = theta_to_tau(p, th) - tau;
    if (std::fabs(f) <= tol * (1.0 + std::fabs(tau))) return th;
    if (f > 0) hi = th; else lo = th;
    double next = th - f / dtau_dtheta(p, th);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - th) <= 1e-16 * (1.0 + std::fabs(th))) return next;
    th = next;
    if (hi - lo <= 4e-16 * (1.0 + std::fabs(th))) return th;
  }
  throw NonConvergence("tau to theta inversion did not converge");
}

ProfileJet eval_v0(const SolitonProfileParams& p, double tau, double hint) {
  ProfileJet j;
  j.theta = tau_to_theta(p, tau, 1e-14, hint);
  double th = j.theta;
  if (std::fabs(th) > 340.0) return j;  // underflow: the profile is zero to double precision
  double sh = std::sinh(th), ch = std::cosh(th);
  double den = 1.0 + (1.0 - p.ratio) * sh * sh;
  j.v = p.amp / den;
  double dv_dth = -p.amp * (1.0 - p.ratio) * 2.0 * sh * ch / (den * den);
  j.d1 = dv_dth / dtau_dtheta(p, th);
  double c = p.dphi - j.v;
  j.d2 = (p.D * j.v - 0.5 * p.b0 * j.v * j.v + 0.5 * j.d1 * j.d1) / c;
  j.d3 = (p.D * j.d1 - p.b0 * j.v * j.d1 + 2.0 * j.d1 * j.d2) / c;
  return j;
}

double first_integral(const SolitonProfileParams& p, double v, double y) {
  return p.b0 * v * v * v - 3.0 * (v - p.dphi) * y * y - 3.0 * p.D * v * v;
}

// ---------------------------------------------------------------- main term

SolitonMainTerm::SolitonMainTerm(CoefficientModel m, RegularPart r, PhaseFunction p, Interval window)
    : m_(std::move(m)), r_(std::move(r)), p_(std::move(p)), window_(window) {}

SolitonProfileParams SolitonMainTerm::params(double t) const { return soliton_params(m_, r_, p_, t); }

ProfileJet SolitonMainTerm::jet(double t, double tau, double hint) const {
  return eval_v0(params(t), tau, hint);
}

TimeStencil SolitonMainTerm::stencil(double t) const { return time_stencil(t, window_); }

SolitonMainTerm::TimeJet SolitonMainTerm::time_jet(double t, double tau, double hint) const {
  TimeStencil s = stencil(t);
  TimeJet out;
  for (int k = 0; k < 3; ++k) {
    ProfileJet j = jet(s.ts[k], tau, hint);
    if (k == s.centre) out.at = j;
    out.vt += s.w[k] * j.v;
    out.vtau2t += s.w[k] * j.d2;
  }
  return out;
}

// ---------------------------------------------------------------- F1

F1Coefficients f1_coefficients(const SolitonMainTerm& main, double t) {
  const auto& m = main.model();
  const auto& r = main.regular();
  double x = main.phase().phi(t);
  F1Coefficients c;
  c.dphi = main.phase().dphi(t);
  FieldJet a0 = m.a_k(0).jet(x, t), b0 = m.b_k(0).jet(x, t), u0 = r.u_j(0).jet(x, t);
  c.a0 = a0.f; c.a0x = a0.fx;
  c.b0 = b0.f; c.b0x = b0.fx;
  c.u0 = u0.f; c.u0x = u0.fx;
  c.a1 = m.a.size() > 1 ? m.a_k(1).value(x, t) : 0.0;
  c.b1 = m.b.size() > 1 ? m.b_k(1).value(x, t) : 0.0;
  c.u1 = r.u.size() > 1 ? r.u_j(1).value(x, t) : 0.0;
  return c;
}

double F1_value(const F1Coefficients& c, double tau, const SolitonMainTerm::TimeJet& j) {
  const ProfileJet& v = j.at;
  double b0u0x = c.b0x * c.u0 + c.b0 * c.u0x;
  return j.vtau2t - c.a0 * j.vt + (tau * c.a0x + c.a1) * c.dphi * v.d1
         - (tau * b0u0x + c.b0 * c.u1 + c.b1 * c.u0) * v.d1 - c.b0 * c.u0x * v.v
         - (tau * c.b0x + c.b1) * v.v * v.d1;
}

GridFunction compute_F1(const SolitonMainTerm& main, double t, const std::vector<double>& tau_grid) {
  F1Coefficients c = f1_coefficients(main, t);
  GridFunction F;
  F.nodes = tau_grid;
  F.values.resize(tau_grid.size());
  double hint = NAN;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    auto j = main.time_jet(t, tau_grid[i], hint);
    hint = j.at.theta;
    F.values[i] = F1_value(c, tau_grid[i], j);
  }
  return F;
}

PhiResult compute_Phi(const GridFunction& F) {
  PhiResult out;
  std::vector<double> cum = cumulative_integral(F.nodes, F.values);
  double total = cum.back();
  out.Phi.nodes = F.nodes;
  out.Phi.values.resize(cum.size());
  for (std::size_t i = 0; i < cum.size(); ++i) out.Phi.values[i] = cum[i] - total;
  out.Phi.slopes = F.values;
  out.left_limit = -total;
  return out;
}

OrthogonalityReport check_orthogonality(const GridFunction& F, const SolitonMainTerm& main, double t) {
  SolitonProfileParams p = main.params(t);
  PhiResult phi = compute_Phi(F);
  std::size_t n = F.size();
  std::vector<double> a(n), aa(n), b(n), bb(n);
  double hint = NAN;
  for (std::size_t i = 0; i < n; ++i) {
    ProfileJet j = eval_v0(p, F.nodes[i], hint);
    hint = j.theta;
    a[i] = F.values[i] * j.v;
    aa[i] = std::fabs(a[i]);
    b[i] = phi.Phi.values[i] * j.d1;
    bb[i] = std::fabs(b[i]);
  }
  auto ratio = [&](const std::vector<double>& s, const std::vector<double>& ss) {
    double den = integrate_samples(F.nodes, ss);
    return den > 0 ? std::fabs(integrate_samples(F.nodes, s)) / den : 0.0;
  };
  return {ratio(a, aa), ratio(b, bb)};
}

// ---------------------------------------------------------------- correction

std::array<double, 4> switch_eta(double tau) {
  double T = std::tanh(0.5 * tau), S = 1.0 - T * T;
  return {0.5 * (1.0 - T), -0.25 * S, 0.25 * T * S, 0.25 * (0.5 * S * S - T * T * S)};
}

namespace {

struct OpCoef {
  double p, q, r, dp, dq, dr;
};

OpCoef operator_coefficients(const SolitonProfileParams& pp, const ProfileJet& v0) {
  OpCoef c;
  c.p = pp.dphi - v0.v;
  c.q = -v0.d1;
  c.r = pp.b0 * (v0.v + pp.u0) - pp.a0 * pp.dphi - v0.d2;
  c.dp = -v0.d1;
  c.dq = -v0.d2;
  c.dr = pp.b0 * v0.d1 - v0.d3;
  return c;
}

// L eta and its derivative
std::pair<double, double> L_eta(const OpCoef& c, double tau) {
  auto e = switch_eta(tau);
  double L = c.p * e[2] + c.q * e[1] + c.r * e[0];
  double dL = c.dp * e[2] + c.p * e[3] + c.dq * e[1] + c.q * e[2] + c.dr * e[0] + c.r * e[1];
  return {L, dL};
}

double d1_sixth(const std::vector<double>& f, std::size_t i, double h) {
  std::size_t n = f.size();
  if (i >= 3 && i + 3 < n)
    return (-f[i - 3] + 9 * f[i - 2] - 45 * f[i - 1] + 45 * f[i + 1] - 9 * f[i + 2] + f[i + 3]) / (60 * h);
  if (i >= 1 && i + 1 < n) return (f[i + 1] - f[i - 1]) / (2 * h);
  if (i == 0) return (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
  return (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
}

}  // namespace

CorrectionJet CorrectionTerm::eval(double s, const ProfileJet& v0, double F) const {
  OpCoef c = operator_coefficients(params, v0);
  CorrectionJet out;
  auto e = switch_eta(s);
  double Le = 0, dLe = 0;
  if (nu != 0.0) std::tie(Le, dLe) = L_eta(c, s);
  double ps = 0, dps = 0;
  std::tie(ps, dps) = psi.eval(s);
  double Ph = (s > Phi.front() && s < Phi.back()) ? Phi(s) : 0.0;
  double d2ps = (Ph - nu * Le - c.q * dps - c.r * ps) / c.p;
  double d3ps = (F - nu * dLe - (c.dp + c.q) * d2ps - (c.dq + c.r) * dps - c.dr * ps) / c.p;
  out.v = nu * e[0] + ps;
  out.d1 = nu * e[1] + dps;
  out.d2 = nu * e[2] + d2ps;
  out.d3 = nu * e[3] + d3ps;
  return out;
}

CorrectionTerm solve_correction(const SolitonMainTerm& main, double t, const CorrectionOptions& opt,
                                const std::function<double(double)>& source) {
  CorrectionTerm out;
  out.t = t;
  out.params = main.params(t);
  const SolitonProfileParams& pp = out.params;
  double L = opt.half_width_factor / pp.decay;
  out.half_width = L;
  std::size_t n0 = 2 * static_cast<std::size_t>(std::ceil(L / opt.h)) + 1;
  std::size_t n1 = 2 * n0 - 1, n2 = 4 * n0 - 3;
  std::vector<double> fine = linspace(-L, L, n2);
  double hf = fine[1] - fine[0];

  std::vector<ProfileJet> jets(n2);
  GridFunction F;
  F.nodes = fine;
  F.values.resize(n2);
  F1Coefficients fc = f1_coefficients(main, t);
  double hint = NAN;
  for (std::size_t i = 0; i < n2; ++i) {
    if (source) {
      jets[i] = eval_v0(pp, fine[i], hint);
      F.values[i] = source(fine[i]);
    } else {
      auto tj = main.time_jet(t, fine[i], hint);
      jets[i] = tj.at;
      F.values[i] = F1_value(fc, fine[i], tj);
    }
    hint = jets[i].theta;
  }
  out.orthogonality = check_orthogonality(F, main, t);
  if (out.orthogonality.defect_v0 > opt.orthogonality_tol) {
    std::ostringstream os;
    os << "orthogonality condition fails at t = " << t << ": normalized defect "
       << out.orthogonality.defect_v0 << " exceeds " << opt.orthogonality_tol;
    throw ConstructionError(os.str());
  }
  PhiResult ph = compute_Phi(F);
  out.Phi = ph.Phi;
  out.nu = std::fabs(ph.left_limit) > 1e-12 * (1.0 + std::fabs(integrate_samples(fine, F.values)))
               ? -ph.left_limit / pp.D
               : 0.0;
  for (double v : F.values)
    if (!std::isfinite(v)) throw ConstructionError("source term is not finite");

  std::vector<OpCoef> co(n2);
  std::vector<double> rhs(n2);
  for (std::size_t i = 0; i < n2; ++i) {
    co[i] = operator_coefficients(pp, jets[i]);
    if (!(co[i].p > 0.0)) throw ConstructionError("phi' - v0 vanishes on the tau grid");
    rhs[i] = out.Phi.values[i] - (out.nu != 0.0 ? out.nu * L_eta(co[i], fine[i]).first : 0.0);
  }
  auto idx = [&](double s) {
    long k = std::lround((s + L) / hf);
    return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(n2) - 1));
  };
  LinearBvp bvp;
  bvp.p = [&](double s) { return co[idx(s)].p; };
  bvp.q = [&](double s) { return co[idx(s)].q; };
  bvp.r = [&](double s) { return co[idx(s)].r; };
  bvp.f = [&](double s) { return rhs[idx(s)]; };
  bvp.domain = {-L, L};
  auto null_mode = [&](double s) { return jets[idx(s)].d1; };
  BvpSolution s0 = solve_linear_bvp_orthogonal(bvp, n0, null_mode);
  BvpSolution s1 = solve_linear_bvp_orthogonal(bvp, n1, null_mode);
  BvpSolution s2 = solve_linear_bvp_orthogonal(bvp, n2, null_mode);
  out.condition = s2.condition;
  out.multiplier = s2.multiplier;

  QuinticGrid& g = out.psi;
  g.nodes = s0.v.nodes;
  g.f.resize(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    double c = s0.v.values[i], m = s1.v.values[2 * i], f = s2.v.values[4 * i];
    double r1 = (4 * m - c) / 3, r2 = (4 * f - m) / 3;
    g.f[i] = (16 * r2 - r1) / 15;
  }
  double h = g.nodes[1] - g.nodes[0];
  g.d1.resize(n0);
  g.d2.resize(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    g.d1[i] = d1_sixth(g.f, i, h);
    const OpCoef& c = co[4 * i];
    g.d2[i] = (rhs[4 * i] - c.q * g.d1[i] - c.r * g.f[i]) / c.p;
  }
  return out;
}

double correction_left_limit(const SolitonMainTerm& main, double t) {
  SolitonProfileParams p = main.params(t);
  double L = 40.0 / p.decay;
  std::vector<double> g = linspace(-L, L, 2 * static_cast<std::size_t>(std::ceil(L / 0.02)) + 1);
  return compute_Phi(compute_F1(main, t, g)).left_limit;
}

std::shared_ptr<ExtensionField> extend_correction(const SolitonMainTerm& main,
                                                  std::function<double(double)> nu) {
  return std::make_shared<ExtensionField>(main.model(), main.regular(), main.phase(), std::move(nu),
                                          main.window().lo);
}

// ---------------------------------------------------------------- candidate

OnePhaseSoliton::OnePhaseSoliton(std::shared_ptr<const SolitonMainTerm> main, int order,
                                 CorrectionOptions opt)
    : main_(std::move(main)), order_(order), opt_(opt) {
  if (order_ < 0 || order_ > 1) throw ModelError("one-phase soliton supports orders 0 and 1");
  if (order_ == 1) {
    const SolitonMainTerm* mt = main_.get();
    double worst = 0.0;
    for (double t : linspace(mt->window().lo, mt->window().hi, 5))
      worst = std::max(worst, std::fabs(correction_left_limit(*mt, t)));
    if (worst > 1e-10) {
      extension_ = extend_correction(*mt, [mt](double t) {
        return -correction_left_limit(*mt, t) / mt->params(t).D;
      });
    }
  }
}

std::shared_ptr<const CorrectionTerm> OnePhaseSoliton::correction(double t) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = corr_cache_.find(t);
    if (it != corr_cache_.end()) return it->second;
  }
  auto c = std::make_shared<const CorrectionTerm>(solve_correction(*main_, t, opt_));
  std::lock_guard<std::mutex> lock(mu_);
  if (corr_cache_.size() > 4096) corr_cache_.clear();
  corr_cache_.emplace(t, c);
  return c;
}

std::shared_ptr<const OnePhaseSoliton::Slice> OnePhaseSoliton::slice(double t) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = slice_cache_.find(t);
    if (it != slice_cache_.end()) return it->second;
  }
  auto s = std::make_shared<Slice>();
  s->st = main_->stencil(t);
  s->coef = f1_coefficients(*main_, t);
  if (order_ >= 1)
    for (int k = 0; k < 3; ++k) s->corr[k] = correction(s->st.ts[k]);
  std::lock_guard<std::mutex> lock(mu_);
  if (slice_cache_.size() > 4096) slice_cache_.clear();
  slice_cache_.emplace(t, s);
  return s;
}

SingularJet OnePhaseSoliton::singular0(double t, double tau) const {
  auto tj = main_->time_jet(t, tau);
  return {tj.at.v, tj.vt, tj.at.d1, tj.at.d2, tj.at.d3, tj.vtau2t};
}

SingularJet OnePhaseSoliton::singular1(double t, double tau) const {
  auto sl = slice(t);
  const TimeStencil& st = sl->st;
  SingularJet out;
  ProfileJet j0[3];
  double hint = NAN;
  for (int k = 0; k < 3; ++k) {
    j0[k] = main_->jet(st.ts[k], tau, hint);
    hint = j0[k].theta;
  }
  SolitonMainTerm::TimeJet tj;
  tj.at = j0[st.centre];
  for (int k = 0; k < 3; ++k) {
    tj.vt += st.w[k] * j0[k].v;
    tj.vtau2t += st.w[k] * j0[k].d2;
  }
  double F = F1_value(sl->coef, tau, tj);
  for (int k = 0; k < 3; ++k) {
    CorrectionJet c = sl->corr[k]->eval(tau, j0[k], k == st.centre ? F : 0.0);
    if (k == st.centre) {
      out.v = c.v;
      out.vtau = c.d1;
      out.vtau2 = c.d2;
      out.vtau3 = c.d3;
    }
    out.vt += st.w[k] * c.v;
    out.vtau2t += st.w[k] * c.d2;
  }
  return out;
}

double OnePhaseSoliton::value(double x, double t, double eps) const {
  const auto& r = main_->regular();
  double tau = (x - main_->phase().phi(t)) / eps;
  double y = r.u_j(0).value(x, t) + main_->jet(t, tau).v;
  if (order_ >= 1) {
    double u1 = r.u.size() > 1 ? r.u_j(1).value(x, t) : 0.0;
    auto sl = slice(t);
    const auto& c = *sl->corr[sl->st.centre];
    double v1 = c.eval(tau, main_->jet(t, tau)).v;
    if (extension_) {
      // the left limit is carried by the extension field instead of nu
      double g = x <= main_->phase().phi(t) ? extension_->value(x, t) : c.nu;
      v1 += (g - c.nu) * switch_eta(tau)[0];
    }
    y += eps * (u1 + v1);
  }
  return y;
}

Jet OnePhaseSoliton::jet(double x, double t, double eps) const {
  const auto& r = main_->regular();
  double dphi = main_->phase().dphi(t);
  double tau = (x - main_->phase().phi(t)) / eps;
  Jet j;
  add_regular(j, r.u_j(0).jet(x, t), 1.0);
  add_singular(j, singular0(t, tau), eps, 0, dphi);
  if (order_ >= 1) {
    if (r.u.size() > 1) add_regular(j, r.u_j(1).jet(x, t), eps);
    SingularJet s1 = singular1(t, tau);
    add_singular(j, s1, eps, 1, dphi);
    if (extension_) {
      // replace nu(t) eta by g(x, t) eta, g the extension of nu
      auto sl = slice(t);
      const TimeStencil& st = sl->st;
      FieldJet g;
      if (x <= main_->phase().phi(t)) {
        g = extension_->jet(x, t);
      } else {
        g.f = sl->corr[st.centre]->nu;
        for (int k = 0; k < 3; ++k) g.ft += st.w[k] * sl->corr[k]->nu;
      }
      double nu = sl->corr[st.centre]->nu, dnu = 0.0;
      for (int k = 0; k < 3; ++k) dnu += st.w[k] * sl->corr[k]->nu;
      auto e = switch_eta(tau);
      double ie = 1.0 / eps, ie2 = ie * ie, ie3 = ie2 * ie;
      double d = g.f - nu, dt = g.ft - dnu;
      j.u += eps * d * e[0];
      j.ux += eps * (g.fx * e[0] + d * e[1] * ie);
      j.uxx += eps * (g.fxx * e[0] + 2 * g.fx * e[1] * ie + d * e[2] * ie2);
      j.uxxx += eps * (g.fxxx * e[0] + 3 * g.fxx * e[1] * ie + 3 * g.fx * e[2] * ie2 + d * e[3] * ie3);
      j.ut += eps * (dt * e[0] - d * dphi * e[1] * ie);
      j.utxx += eps * (g.ftxx * e[0] - g.fxx * dphi * e[1] * ie + 2 * g.fxt * e[1] * ie -
                       2 * g.fx * dphi * e[2] * ie2 + dt * e[2] * ie2 - d * dphi * e[3] * ie3);
    }
  }
  return j;
}

std::shared_ptr<OnePhaseSoliton> assemble_one_phase(const ModelFile& mf, int order, CorrectionOptions opt) {
  CoefficientModel m = build_coefficients(mf);
  check_positivity(m, mf.domain);
  RegularPart r = build_regular(mf, m);
  PhaseFunction p = build_phase(mf, m, r, "phi");
  WindowReport w = check_soliton_window(m, r, p, linspace(p.window.lo, p.window.hi, 201));
  auto main = std::make_shared<SolitonMainTerm>(m, r, p, w.window);
  return std::make_shared<OnePhaseSoliton>(main, order, opt);
}

}  // namespace vcch
