#include "vcch/examples.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "vcch/output.hpp"
#include "vcch/peakon1.hpp"
#include "vcch/peakon2.hpp"
#include "vcch/soliton1.hpp"

namespace vcch {

namespace {

const ExampleSpec kExamples[] = {
    {1, "Example 1: one-phase soliton on a constant background", "soliton1", 1, R"([coefficients]
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
)",
     0.1},
    {2, "Example 2: two-phase soliton", "soliton2", 0, R"([coefficients]
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
)",
     0.1},
    {3, "Example 3: one-phase peakon", "peakon1", 1, R"([coefficients]
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
)",
     0.1},
    {4, "Example 4: two-phase peakon", "peakon2", 0, R"([coefficients]
a0 = exp(x^2 - 62*x*t + 600*t^2)
b0 = 3
b1 = t^2
[regular]
u0 = 0
[phase]
phi1 = explicit: 50*t
phi2 = explicit: 12*t
[domain]
x_min = -2
x_max = 20
t_min = 0
t_max = 0.3
)",
     0.1},
};

ReferenceCheck check(std::string name, double value, double reference, double tol) {
  return {std::move(name), value, reference, tol};
}

std::vector<ReferenceCheck> checks1(const ModelFile& mf) {
  auto y = assemble_one_phase(mf, 1);
  std::vector<ReferenceCheck> out;
  double t = 0.5;
  SolitonProfileParams p = y->main().params(t);
  out.push_back(check("theta0", p.theta0, std::atanh(std::sqrt(0.6)), 1e-12));
  out.push_back(check("stretch", p.stretch, 2 * std::sqrt(5.0), 1e-12));
  out.push_back(check("log_coef", p.log_coef, std::sqrt(3.0), 1e-12));
  out.push_back(check("v0(0)", eval_v0(p, 0.0).v, 0.75, 1e-12));
  double worst = 0;
  for (double th = -5; th <= 5; th += 0.1) {
    double closed = 2 * std::sqrt(5.0) * th + std::sqrt(3.0) * (log_cosh(th - p.theta0) - log_cosh(th + p.theta0));
    worst = std::max(worst, std::fabs(theta_to_tau(p, th) - closed));
  }
  out.push_back(check("tau-theta map deviation", worst, 0, 1e-10));
  out.push_back(check("window end", y->time_window().hi, 1.0, 1e-12));
  return out;
}

std::vector<ReferenceCheck> checks2(const ModelFile& mf) {
  auto y = assemble_two_phase(mf);
  std::vector<ReferenceCheck> out;
  TwoPhaseParams p = y->params(0.5);
  out.push_back(check("mu1", p.mu1, std::sqrt(4 - std::sqrt(6.0)) / 2, 1e-12));
  out.push_back(check("mu2", p.mu2, std::sqrt(8 - std::sqrt(6.0)) / (2 * std::sqrt(2.0)), 1e-12));
  const CoefficientModel& m = y->model();
  double n1 = 0, n2 = 0;
  for (double t : linspace(0, 1, 101)) {
    n1 = std::max(n1, std::fabs(m.a_k(0).value(12 * t, t) - 1));
    n2 = std::max(n2, std::fabs(m.a_k(0).value(24 * t, t) - 1));
  }
  out.push_back(check("a0 on phi1 deviation", n1, 0, 1e-12));
  out.push_back(check("a0 on phi2 deviation", n2, 0, 1e-12));
  double defect = 0;
  for (double t1 : linspace(-20, 20, 41))
    for (double t2 : linspace(-20, 20, 41)) defect = std::max(defect, solve_deltas(p, t1, t2).defect);
  out.push_back(check("delta defect", defect, 0, 1e-10));
  double lim = 0;
  for (double o : linspace(-10, 10, 41)) {
    lim = std::max(lim, std::fabs(eval_V0_two_phase(p, 60, o) - limit_profile(p, 1, 1, o)));
    lim = std::max(lim, std::fabs(eval_V0_two_phase(p, -60, o) - limit_profile(p, 1, -1, o)));
    lim = std::max(lim, std::fabs(eval_V0_two_phase(p, o, 60) - limit_profile(p, 2, 1, o)));
    lim = std::max(lim, std::fabs(eval_V0_two_phase(p, o, -60) - limit_profile(p, 2, -1, o)));
  }
  out.push_back(check("limit profiles at |tau| = 60", lim, 0, 1e-6));
  return out;
}

std::vector<ReferenceCheck> checks3(const ModelFile& mf) {
  auto y = assemble_peakon(mf, 1);
  std::vector<ReferenceCheck> out;
  const PeakonMainTerm& main = y->main();
  double phi = 0, alpha = 0;
  for (double t : linspace(0, 2, 201)) {
    phi = std::max(phi, std::fabs(main.phase().phi(t) - 2 * t));
    alpha = std::max(alpha, std::fabs(main.alpha(t) - std::sqrt(2 * (t * t + 1))));
  }
  out.push_back(check("phi - 2t", phi, 0, 1e-8));
  out.push_back(check("alpha - sqrt(2(t^2+1))", alpha, 0, 1e-12));
  out.push_back(check("window end", y->time_window().hi, 2.0, 1e-12));
  auto c = y->correction(0.5);
  out.push_back(check("v1 jump at the crest", std::fabs(c->value(0.0) - c->value(-1e-300)), 0, 1e-12));
  return out;
}

std::vector<ReferenceCheck> checks4(const ModelFile& mf) {
  auto y = assemble_two_peakon(mf);
  std::vector<ReferenceCheck> out;
  TwoPeakonParams p = y->params(0.2);
  auto r = exponent_rates(p);
  out.push_back(check("alpha1", r[0], 25.0 / 19, 1e-15));
  out.push_back(check("alpha2", r[1], 6.0 / 19, 1e-15));
  double lim = 0;
  for (double o : linspace(-10, 10, 81)) {
    lim = std::max(lim, std::fabs(eval_V0_two_peakon(p, 40, o) - limit_profile_peakon(p, 1, 1, o)));
    lim = std::max(lim, std::fabs(eval_V0_two_peakon(p, -40, o) - limit_profile_peakon(p, 1, -1, o)));
    lim = std::max(lim, std::fabs(eval_V0_two_peakon(p, o, 40) - limit_profile_peakon(p, 2, 1, o)));
    lim = std::max(lim, std::fabs(eval_V0_two_peakon(p, o, -40) - limit_profile_peakon(p, 2, -1, o)));
  }
  out.push_back(check("limit profiles at |tau| = 40", lim, 0, 1e-8));
  double eps = 0.1, h = 0;
  for (double t : linspace(0, 0.3, 151)) {
    auto xs = y->crest_x(t, eps);
    if (std::fabs(xs[1] - xs[0]) < 10 * eps) continue;
    h = std::max(h, std::fabs(y->value(xs[0], t, eps) - 12) / 12);
    h = std::max(h, std::fabs(y->value(xs[1], t, eps) - 50) / 50);
  }
  out.push_back(check("crest heights relative to 12 and 50", h, 0, 0.02));
  return out;
}

double relative(double sym, double fd) { return std::fabs(sym - fd) / std::max(std::fabs(sym), 1.0); }

}  // namespace

bool ReferenceCheck::ok() const { return std::fabs(value - reference) <= tolerance; }

const ExampleSpec& example_spec(int id) {
  for (const auto& e : kExamples)
    if (e.id == id) return e;
  throw ModelError("unknown example " + std::to_string(id) + "; the examples are 1, 2, 3 and 4");
}

std::string infer_kind(const ModelFile& mf) {
  bool two = false, ode = false;
  for (const auto& p : mf.phases) {
    if (p.name == "phi2") two = true;
    if (p.kind == PhaseSpec::Kind::PeakonOde) ode = true;
  }
  if (ode) return "peakon1";
  if (!two) return "soliton1";
  bool zero = !mf.u.empty() && !mf.u[0].solve && mf.u[0].expr.is_constant() && mf.u[0].expr.eval(0, 0) == 0.0;
  return zero ? "peakon2" : "soliton2";
}

std::shared_ptr<CandidateSolution> assemble_candidate(const ModelFile& mf, const std::string& kind, int order,
                                                      TwoPhaseForm form) {
  bool one = kind == "soliton1" || kind == "peakon1";
  bool two = kind == "soliton2" || kind == "peakon2";
  if (!one && !two) throw ModelError("unknown kind '" + kind + "'; use soliton1, soliton2, peakon1 or peakon2");
  if (order < 0 || order > (one ? 1 : 0)) {
    std::ostringstream os;
    os << "kind " << kind << " supports order " << (one ? "0 or 1" : "0") << ", got " << order;
    throw ModelError(os.str());
  }
  if (kind == "soliton1") return assemble_one_phase(mf, order);
  if (kind == "peakon1") return assemble_peakon(mf, order);
  if (kind == "soliton2") return assemble_two_phase(mf, TwoPhaseOptions{form});
  return assemble_two_peakon(mf);
}

std::vector<ReferenceCheck> example_checks(int id) {
  ModelFile mf = parse_model(example_spec(id).model_text);
  switch (id) {
    case 1: return checks1(mf);
    case 2: return checks2(mf);
    case 3: return checks3(mf);
    default: return checks4(mf);
  }
}

double derivative_check(const Expression& e, const Rect& rect, int n, unsigned seed) {
  Expression ex = e.diff(Var::X), exx = ex.diff(Var::X);
  struct Pair {
    Expression sym, base;
    Var v;
  };
  std::vector<Pair> pairs = {{ex, e, Var::X},          {e.diff(Var::T), e, Var::T},  {exx, ex, Var::X},
                             {ex.diff(Var::T), ex, Var::T}, {exx.diff(Var::X), exx, Var::X}, {exx.diff(Var::T), exx, Var::T}};
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> X(rect.x0, rect.x1), T(rect.t0, rect.t1);
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    double x = X(gen), t = T(gen);
    for (const Pair& p : pairs) {
      double s = p.v == Var::X ? x : t, h = 1e-5 * std::max(1.0, std::fabs(s));
      auto f = [&](double z) { return p.v == Var::X ? p.base.eval(z, t) : p.base.eval(x, z); };
      worst = std::max(worst, relative(p.sym.eval(x, t), fd_derivative(f, s, h, 1)));
    }
  }
  return worst;
}

std::vector<Expression> model_expressions(const ModelFile& mf) {
  std::vector<Expression> out(mf.a.begin(), mf.a.end());
  out.insert(out.end(), mf.b.begin(), mf.b.end());
  for (const auto& u : mf.u) out.push_back(u.expr);
  for (const auto& p : mf.phases)
    if (p.kind == PhaseSpec::Kind::Explicit) out.push_back(p.expr);
  return out;
}

Surface sample_surface(const CandidateSolution& c, const Rect& rect, std::size_t nx, std::size_t nt, double eps) {
  Surface s;
  s.xs = linspace(rect.x0, rect.x1, nx);
  s.ts = linspace(rect.t0, rect.t1, nt);
  s.u.assign(nt, std::vector<double>(nx));
  for (std::size_t it = 0; it < nt; ++it)
    for (std::size_t ix = 0; ix < nx; ++ix) s.u[it][ix] = c.value(s.xs[ix], s.ts[it], eps);
  return s;
}

std::string surface_csv(const Surface& s) {
  std::vector<std::vector<double>> rows;
  for (std::size_t it = 0; it < s.ts.size(); ++it)
    for (std::size_t ix = 0; ix < s.xs.size(); ++ix) rows.push_back({s.xs[ix], s.ts[it], s.u[it][ix]});
  return csv_table({"x", "t", "u"}, rows);
}

std::string surface_snapshots_svg(const Surface& s, const std::string& title, std::size_t count) {
  std::vector<Series> series;
  std::size_t n = s.ts.size();
  count = std::max<std::size_t>(1, std::min(count, n));
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t it = count == 1 ? 0 : k * (n - 1) / (count - 1);
    std::ostringstream label;
    label << "t = " << s.ts[it];
    series.push_back({label.str(), s.xs, s.u[it]});
  }
  return svg_lines(title, "x", "u", series);
}

ExampleRun run_example(int id, const std::string& dir) {
  const ExampleSpec& spec = example_spec(id);
  ExampleRun run;
  run.checks = example_checks(id);
  std::filesystem::create_directories(dir);
  ModelFile mf = parse_model(spec.model_text);
  auto c = assemble_candidate(mf, spec.kind, spec.order);
  Interval w = c->time_window();
  Rect rect{mf.domain.x0, mf.domain.x1, std::max(mf.domain.t0, w.lo), std::min(mf.domain.t1, w.hi)};
  auto path = [&](const std::string& f) {
    std::string p = (std::filesystem::path(dir) / f).string();
    run.files.push_back(p);
    return p;
  };
  write_text_file(path("model.txt"), spec.model_text);
  std::ostringstream eps;
  eps << "eps = " << spec.eps;
  Surface s = sample_surface(*c, rect, 301, 81, spec.eps);
  write_text_file(path("surface.csv"), surface_csv(s));
  write_text_file(path("surface.svg"), svg_heatmap(spec.title + ", " + eps.str(), s.xs, s.ts, s.u));
  // the line plots resolve the crests: spacing eps/8
  auto fine = static_cast<std::size_t>(std::ceil(8 * (rect.x1 - rect.x0) / spec.eps)) + 1;
  Surface lines = sample_surface(*c, rect, std::max<std::size_t>(fine, 301), 5, spec.eps);
  write_text_file(path("snapshots.svg"), surface_snapshots_svg(lines, spec.title + ", " + eps.str()));

  std::vector<Series> prof;
  std::vector<double> taus = linspace(-8, 8, 641);
  double t = std::min(0.5, w.hi);
  if (id == 1) {
    auto y = std::static_pointer_cast<OnePhaseSoliton>(c);
    SolitonProfileParams p = y->main().params(t);
    auto corr = y->correction(t);
    Series v0{"v0", taus, {}}, v1{"v1", taus, {}};
    for (double tau : taus) {
      ProfileJet j = eval_v0(p, tau);
      v0.y.push_back(j.v);
      v1.y.push_back(corr->eval(tau, j).v);
    }
    prof = {v0, v1};
  } else if (id == 3) {
    auto y = std::static_pointer_cast<OnePhasePeakon>(c);
    auto corr = y->correction(t);
    Series v0{"v0", taus, {}}, v1{"v1", taus, {}};
    for (double tau : taus) {
      v0.y.push_back(y->main().jet(t, tau, tau == 0 ? 1 : 0).v);
      v1.y.push_back(corr->value(tau));
    }
    prof = {v0, v1};
  } else {
    for (double other : {-4.0, 0.0, 4.0}) {
      std::ostringstream label;
      label << "tau2 = " << other;
      Series v{label.str(), taus, {}};
      for (double tau : taus) {
        if (id == 2) {
          v.y.push_back(eval_V0_two_phase(std::static_pointer_cast<TwoPhaseSoliton>(c)->params(t), tau, other));
        } else {
          v.y.push_back(eval_V0_two_peakon(std::static_pointer_cast<TwoPhasePeakon>(c)->params(t), tau, other));
        }
      }
      prof.push_back(v);
    }
  }
  std::ostringstream pt;
  pt << spec.title << ", singular terms at t = " << t;
  write_text_file(path("profile.svg"), svg_lines(pt.str(), id == 1 || id == 3 ? "tau" : "tau1", "v", prof));
  return run;
}

}  // namespace vcch
