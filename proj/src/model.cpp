#include "vcch/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace vcch {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

// ---------------------------------------------------------------- fields

namespace {

class ExprField : public ScalarField {
 public:
  explicit ExprField(const Expression& e)
      : f_(e), fx_(e.diff(Var::X)), ft_(e.diff(Var::T)), fxx_(fx_.diff(Var::X)),
        fxt_(fx_.diff(Var::T)), fxxx_(fxx_.diff(Var::X)), ftxx_(fxx_.diff(Var::T)),
        zero_(e.is_constant() && e.eval(0, 0) == 0.0) {}
  double value(double x, double t) const override { return f_.eval(x, t); }
  FieldJet jet(double x, double t) const override {
    return {f_.eval(x, t),   fx_.eval(x, t),   ft_.eval(x, t),   fxx_.eval(x, t),
            fxt_.eval(x, t), fxxx_.eval(x, t), ftxx_.eval(x, t)};
  }
  bool is_zero() const override { return zero_; }
  std::string describe() const override { return f_.str(); }

 private:
  Expression f_, fx_, ft_, fxx_, fxt_, fxxx_, ftxx_;
  bool zero_;
};

// weights of the Lagrange basis through z at s, with derivatives up to 3
void lagrange_weights(const double* z, std::size_t n, double s, double w[4][8]) {
  for (std::size_t j = 0; j < n; ++j) {
    double c[8] = {1, 0, 0, 0, 0, 0, 0, 0};  // coefficients in powers of (s' - s)
    std::size_t deg = 0;
    double denom = 1.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      // multiply by ((s' - s) + (s - z_m))
      double a = s - z[m];
      for (std::size_t k = deg + 1; k-- > 0;) {
        double v = c[k] * a;
        if (k + 1 < 8) c[k + 1] += c[k];
        c[k] = v;
      }
      ++deg;
      denom *= z[j] - z[m];
    }
    w[0][j] = c[0] / denom;
    w[1][j] = c[1] / denom;
    w[2][j] = 2 * c[2] / denom;
    w[3][j] = 6 * c[3] / denom;
  }
}

std::size_t stencil_start(const std::vector<double>& g, double s, std::size_t width) {
  if (g.size() <= width) return 0;
  auto it = std::upper_bound(g.begin(), g.end(), s);
  long i = static_cast<long>(it - g.begin()) - static_cast<long>(width / 2);
  i = std::max(0L, std::min(i, static_cast<long>(g.size() - width)));
  return static_cast<std::size_t>(i);
}

class GridField : public ScalarField {
 public:
  GridField(std::vector<double> xs, std::vector<double> ts, std::vector<std::vector<double>> v, std::string what)
      : xs_(std::move(xs)), ts_(std::move(ts)), v_(std::move(v)), what_(std::move(what)) {}

  double value(double x, double t) const override { return jet(x, t).f; }

  FieldJet jet(double x, double t) const override {
    check(x, t);
    std::size_t nx = std::min<std::size_t>(6, xs_.size()), nt = std::min<std::size_t>(6, ts_.size());
    std::size_t ix = stencil_start(xs_, x, nx), it = stencil_start(ts_, t, nt);
    double wx[4][8], wt[4][8];
    lagrange_weights(&xs_[ix], nx, x, wx);
    lagrange_weights(&ts_[it], nt, t, wt);
    FieldJet j;
    for (std::size_t a = 0; a < nt; ++a) {
      double r0 = 0, r1 = 0, r2 = 0, r3 = 0;
      const auto& row = v_[it + a];
      for (std::size_t b = 0; b < nx; ++b) {
        double val = row[ix + b];
        r0 += wx[0][b] * val;
        r1 += wx[1][b] * val;
        r2 += wx[2][b] * val;
        r3 += wx[3][b] * val;
      }
      j.f += wt[0][a] * r0;
      j.ft += wt[1][a] * r0;
      j.fx += wt[0][a] * r1;
      j.fxt += wt[1][a] * r1;
      j.fxx += wt[0][a] * r2;
      j.ftxx += wt[1][a] * r2;
      j.fxxx += wt[0][a] * r3;
    }
    return j;
  }
  std::string describe() const override { return what_; }

 private:
  void check(double x, double t) const {
    double sx = 1e-9 * (xs_.back() - xs_.front()), st = 1e-9 * std::max(1.0, ts_.back() - ts_.front());
    if (x < xs_.front() - sx || x > xs_.back() + sx || t < ts_.front() - st || t > ts_.back() + st) {
      std::ostringstream os;
      os << "solved field '" << what_ << "' queried outside its grid at (" << x << ", " << t << ")";
      throw ConstructionError(os.str());
    }
  }
  std::vector<double> xs_, ts_;
  std::vector<std::vector<double>> v_;
  std::string what_;
};

}  // namespace

FieldPtr expression_field(const Expression& e) { return std::make_shared<ExprField>(e); }

FieldPtr zero_field() {
  static FieldPtr z = expression_field(Expression::constant(0.0));
  return z;
}

FieldPtr grid_field(std::vector<double> xs, std::vector<double> ts, std::vector<std::vector<double>> values,
                    std::string what) {
  return std::make_shared<GridField>(std::move(xs), std::move(ts), std::move(values), std::move(what));
}

const ScalarField& CoefficientModel::a_k(std::size_t k) const {
  return k < a.size() && a[k] ? *a[k] : *zero_field();
}
const ScalarField& CoefficientModel::b_k(std::size_t k) const {
  return k < b.size() && b[k] ? *b[k] : *zero_field();
}

double CoefficientModel::a_at(double x, double t, double eps) const {
  double s = 0.0, p = 1.0;
  for (const auto& f : a) {
    if (f && !f->is_zero()) s += p * f->value(x, t);
    p *= eps;
  }
  return s;
}

double CoefficientModel::b_at(double x, double t, double eps) const {
  double s = 0.0, p = 1.0;
  for (const auto& f : b) {
    if (f && !f->is_zero()) s += p * f->value(x, t);
    p *= eps;
  }
  return s;
}

const ScalarField& RegularPart::u_j(std::size_t j) const {
  return j < u.size() && u[j] ? *u[j] : *zero_field();
}

// ---------------------------------------------------------------- model files

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Expression parse_field(const std::string& key, const std::string& text) {
  try {
    return parse_expression(text);
  } catch (const ParseError& e) {
    throw ModelError("in '" + key + "': " + e.what());
  }
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ModelError("'" + key + "' must be a real number, got '" + text + "'");
}

void put_indexed(std::vector<Expression>& v, std::size_t k, Expression e) {
  if (v.size() <= k) v.resize(k + 1, Expression::constant(0.0));
  v[k] = std::move(e);
}

}  // namespace

ModelFile parse_model(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
  ModelFile mf;
  bool have_a0 = false, have_b0 = false;
  static const std::regex coef_key("([ab])([0-9])");
  static const std::regex u_key("u([0-9])");
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ModelError("key '" + section + "' is outside any section");
    if (section == "coefficients") {
      for (const auto& [key, val] : body) {
        std::smatch mt;
        if (!std::regex_match(key, mt, coef_key)) throw ModelError("unknown coefficient '" + key + "'");
        std::size_t k = static_cast<std::size_t>(std::stoi(mt[2]));
        Expression e = parse_field(key, trim(val.data()));
        if (mt[1] == "a") {
          put_indexed(mf.a, k, e);
          have_a0 = have_a0 || k == 0;
        } else {
          put_indexed(mf.b, k, e);
          have_b0 = have_b0 || k == 0;
        }
      }
    } else if (section == "regular") {
      for (const auto& [key, val] : body) {
        std::smatch mt;
        if (!std::regex_match(key, mt, u_key)) throw ModelError("unknown regular term '" + key + "'");
        std::size_t j = static_cast<std::size_t>(std::stoi(mt[1]));
        std::string v = trim(val.data());
        RegularSpec rs;
        if (v.rfind("solve:", 0) == 0) {
          rs.solve = true;
          v = trim(v.substr(6));
        }
        rs.expr = parse_field(key, v);
        if (mf.u.size() <= j) mf.u.resize(j + 1);
        mf.u[j] = rs;
      }
    } else if (section == "phase") {
      for (const auto& [key, val] : body) {
        if (key != "phi" && key != "phi1" && key != "phi2") throw ModelError("unknown phase key '" + key + "'");
        std::string v = trim(val.data());
        PhaseSpec ps;
        ps.name = key;
        if (v.rfind("explicit:", 0) == 0) {
          ps.kind = PhaseSpec::Kind::Explicit;
          ps.expr = parse_field(key, trim(v.substr(9)));
          if (!ps.expr.independent_of(Var::X)) throw ModelError("phase '" + key + "' must depend on t only");
        } else if (v.rfind("peakon-ode:", 0) == 0) {
          ps.kind = PhaseSpec::Kind::PeakonOde;
          std::string rest = trim(v.substr(11));
          if (rest.rfind("phi0", 0) != 0) throw ModelError("peakon-ode phase needs 'phi0=<real>'");
          rest = trim(rest.substr(4));
          if (rest.empty() || rest[0] != '=') throw ModelError("peakon-ode phase needs 'phi0=<real>'");
          ps.phi0 = parse_real(key, trim(rest.substr(1)));
        } else {
          throw ModelError("phase '" + key + "' must start with 'explicit:' or 'peakon-ode:'");
        }
        mf.phases.push_back(ps);
      }
    } else if (section == "domain") {
      std::map<std::string, double*> slots{{"x_min", &mf.domain.x0}, {"x_max", &mf.domain.x1},
                                           {"t_min", &mf.domain.t0}, {"t_max", &mf.domain.t1}};
      for (const auto& [key, val] : body) {
        auto it = slots.find(key);
        if (it == slots.end()) throw ModelError("unknown domain key '" + key + "'");
        *it->second = parse_real(key, trim(val.data()));
      }
      if (!(mf.domain.x0 < mf.domain.x1) || !(mf.domain.t0 < mf.domain.t1))
        throw ModelError("domain must satisfy x_min < x_max and t_min < t_max");
    } else {
      throw ModelError("unknown section [" + section + "]");
    }
  }
  if (!have_a0 || !have_b0) throw ModelError("model needs both a0 and b0");
  return mf;
}

ModelFile load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ModelError("cannot open model file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model(ss.str());
}

CoefficientModel build_coefficients(const ModelFile& mf) {
  CoefficientModel m;
  for (const auto& e : mf.a) m.a.push_back(expression_field(e));
  for (const auto& e : mf.b) m.b.push_back(expression_field(e));
  return m;
}

void check_positivity(const CoefficientModel& m, const Rect& d) {
  for (double t : linspace(d.t0, d.t1, 21))
    for (double x : linspace(d.x0, d.x1, 41)) {
      double a0, b0;
      try {
        a0 = m.a_k(0).value(x, t);
        b0 = m.b_k(0).value(x, t);
      } catch (const DomainError& e) {
        std::ostringstream os;
        os << "coefficients cannot be evaluated at (" << x << ", " << t << "): " << e.what();
        throw ModelError(os.str());
      }
      if (!(a0 > 0.0) || !(b0 > 0.0)) {
        std::ostringstream os;
        os << "a0 and b0 must be positive; at (" << x << ", " << t << ") a0 = " << a0 << ", b0 = " << b0;
        throw ModelError(os.str());
      }
    }
}

// ---------------------------------------------------------------- regular part

std::pair<double, double> regular_defects(const CoefficientModel& m, const RegularPart& r, const Rect& d) {
  double d0 = 0.0, d1 = 0.0;
  for (double t : linspace(d.t0, d.t1, 21))
    for (double x : linspace(d.x0, d.x1, 21)) {
      double a0 = m.a_k(0).value(x, t), b0 = m.b_k(0).value(x, t);
      double a1 = m.a_k(1).value(x, t), b1 = m.b_k(1).value(x, t);
      FieldJet u0 = r.u_j(0).jet(x, t), u1 = r.u_j(1).jet(x, t);
      d0 = std::max(d0, std::fabs(a0 * u0.ft + b0 * u0.f * u0.fx));
      double f1 = -a1 * u0.ft - b1 * u0.f * u0.fx;
      d1 = std::max(d1, std::fabs(a0 * u1.ft + b0 * (u0.fx * u1.f + u0.f * u1.fx) - f1));
    }
  return {d0, d1};
}

namespace {

IvpOptions characteristic_options(const std::vector<double>& t_grid) {
  IvpOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-13;
  o.max_step = (t_grid.back() - t_grid.front()) / 50.0;
  return o;
}

struct Characteristics {
  std::vector<double> x0;              // launch points
  std::vector<std::vector<double>> X;  // X[i][k] position at t_grid[k]
};

Characteristics trace(const std::function<double(double, double, std::size_t)>& speed, std::vector<double> launch,
                      const std::vector<double>& t_grid) {
  Characteristics c;
  c.x0 = std::move(launch);
  c.X.resize(c.x0.size());
  for (std::size_t i = 0; i < c.x0.size(); ++i) {
    auto traj = solve_ivp([&](double t, double x) { return speed(x, t, i); }, t_grid.front(), c.x0[i], t_grid.back(),
                          characteristic_options(t_grid));
    c.X[i].resize(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) c.X[i][k] = traj(t_grid[k]);
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    for (std::size_t i = 1; i < c.x0.size(); ++i)
      if (!(c.X[i][k] > c.X[i - 1][k])) {
        std::ostringstream os;
        os << "characteristics cross before t = " << t_grid[k];
        throw ConstructionError(os.str());
      }
  return c;
}

// values[i][k] carried along characteristic i, resampled onto x_grid at each t
std::vector<std::vector<double>> resample(const Characteristics& c, const std::vector<std::vector<double>>& carried,
                                          const std::vector<double>& x_grid, const std::vector<double>& t_grid) {
  std::vector<std::vector<double>> out(t_grid.size(), std::vector<double>(x_grid.size()));
  std::vector<double> pos(c.x0.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    for (std::size_t i = 0; i < c.x0.size(); ++i) pos[i] = c.X[i][k];
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
      double x = x_grid[j];
      if (x < pos.front() || x > pos.back()) {
        std::ostringstream os;
        os << "characteristics do not cover x = " << x << " at t = " << t_grid[k];
        throw ConstructionError(os.str());
      }
      std::size_t n = std::min<std::size_t>(6, pos.size());
      std::size_t s = stencil_start(pos, x, n);
      double w[4][8];
      lagrange_weights(&pos[s], n, x, w);
      double v = 0.0;
      for (std::size_t b = 0; b < n; ++b) v += w[0][b] * carried[s + b][k];
      out[k][j] = v;
    }
  }
  return out;
}

std::vector<double> launch_points(const std::vector<double>& x_grid) {
  double w = x_grid.back() - x_grid.front();
  return linspace(x_grid.front() - w, x_grid.back() + w, 3 * x_grid.size());
}

}  // namespace

FieldPtr solve_regular_leading(const CoefficientModel& m, const Expression& g, const std::vector<double>& x_grid,
                               const std::vector<double>& t_grid) {
  auto launch = launch_points(x_grid);
  std::vector<double> u(launch.size());
  for (std::size_t i = 0; i < launch.size(); ++i) u[i] = g.eval(launch[i], t_grid.front());
  auto speed = [&](double x, double t, std::size_t i) {
    return m.b_k(0).value(x, t) * u[i] / m.a_k(0).value(x, t);
  };
  Characteristics c = trace(speed, launch, t_grid);
  std::vector<std::vector<double>> carried(launch.size(), std::vector<double>(t_grid.size()));
  for (std::size_t i = 0; i < launch.size(); ++i) std::fill(carried[i].begin(), carried[i].end(), u[i]);
  return grid_field(x_grid, t_grid, resample(c, carried, x_grid, t_grid), "u0 solved from " + g.str());
}

FieldPtr solve_regular_correction(const CoefficientModel& m, const ScalarField& u0, const Expression& g1,
                                  const std::vector<double>& x_grid, const std::vector<double>& t_grid) {
  auto launch = launch_points(x_grid);
  auto speed = [&](double x, double t, std::size_t) {
    return m.b_k(0).value(x, t) * u0.value(x, t) / m.a_k(0).value(x, t);
  };
  Characteristics c = trace(speed, launch, t_grid);
  std::vector<std::vector<double>> carried(launch.size(), std::vector<double>(t_grid.size()));
  for (std::size_t i = 0; i < launch.size(); ++i) {
    auto path = solve_ivp([&](double t, double x) { return speed(x, t, i); }, t_grid.front(), launch[i], t_grid.back(),
                          characteristic_options(t_grid));
    auto rhs = [&](double t, double v) {
      double x = path(t);
      double a0 = m.a_k(0).value(x, t), b0 = m.b_k(0).value(x, t);
      double a1 = m.a_k(1).value(x, t), b1 = m.b_k(1).value(x, t);
      FieldJet j = u0.jet(x, t);
      double f1 = -a1 * j.ft - b1 * j.f * j.fx;
      return (f1 - b0 * j.fx * v) / a0;
    };
    auto sol = solve_ivp(rhs, t_grid.front(), g1.eval(launch[i], t_grid.front()), t_grid.back(),
                         characteristic_options(t_grid));
    for (std::size_t k = 0; k < t_grid.size(); ++k) carried[i][k] = sol(t_grid[k]);
  }
  return grid_field(x_grid, t_grid, resample(c, carried, x_grid, t_grid), "u1 solved from " + g1.str());
}

RegularPart build_regular(const ModelFile& mf, const CoefficientModel& m) {
  RegularPart r;
  auto xs = linspace(mf.domain.x0, mf.domain.x1, 201);
  auto ts = linspace(mf.domain.t0, mf.domain.t1, 101);
  bool solved = false;
  for (std::size_t j = 0; j < mf.u.size(); ++j) {
    const RegularSpec& s = mf.u[j];
    if (!s.solve) {
      r.u.push_back(expression_field(s.expr));
      continue;
    }
    solved = true;
    if (j == 0)
      r.u.push_back(solve_regular_leading(m, s.expr, xs, ts));
    else if (j == 1)
      r.u.push_back(solve_regular_correction(m, r.u_j(0), s.expr, xs, ts));
    else
      throw ModelError("only u0 and u1 can be solved along characteristics");
  }
  if (r.u.empty()) r.u.push_back(zero_field());
  if (!solved) {
    auto [d0, d1] = regular_defects(m, r, mf.domain);
    if (d0 > 1e-8) throw ModelError("u0 does not satisfy a0 u_t + b0 u u_x = 0 (defect " + std::to_string(d0) + ")");
    if (d1 > 1e-8) throw ModelError("u1 does not satisfy its transport equation (defect " + std::to_string(d1) + ")");
  }
  return r;
}

// ---------------------------------------------------------------- phases

PhaseFunction explicit_phase(const Expression& phi, const Interval& t_span) {
  PhaseFunction p;
  Expression d = phi.diff(Var::T);
  p.phi = [phi](double t) { return phi.eval(0.0, t); };
  p.dphi = [d](double t) { return d.eval(0.0, t); };
  p.window = t_span;
  p.description = "explicit " + phi.str();
  return p;
}

PhaseFunction solve_peakon_phase(const CoefficientModel& m, const RegularPart& r, double phi0, const Interval& t_span) {
  auto den_at = [&](double x, double t) { return 3 * m.a_k(0).value(x, t) - m.b_k(0).value(x, t); };
  double den0 = den_at(phi0, t_span.lo);
  double scale0 = 3 * std::fabs(m.a_k(0).value(phi0, t_span.lo)) + std::fabs(m.b_k(0).value(phi0, t_span.lo));
  if (std::fabs(den0) <= 1e-12 * scale0)
    throw ConstructionError("phase equation breaks down: 3 a0 - b0 vanishes at the initial point");
  auto rhs = [&m, &r, den0](double t, double x) {
    double a0 = m.a_k(0).value(x, t), b0 = m.b_k(0).value(x, t), u0 = r.u_j(0).value(x, t);
    double den = 3 * a0 - b0;
    if (den == 0.0 || (den > 0) != (den0 > 0)) {
      std::ostringstream os;
      os << "phase equation breaks down near t = " << t << ": 3 a0 - b0 changes sign";
      throw ConstructionError(os.str());
    }
    return 3 * b0 * u0 / den;
  };
  auto traj = std::make_shared<GridFunction>(solve_ivp(rhs, t_span.lo, phi0, t_span.hi, {1e-12, 1e-14}));
  PhaseFunction p;
  p.phi = [traj](double t) { return (*traj)(t); };
  // the slope comes from the equation itself rather than from the interpolant
  CoefficientModel mc = m;
  RegularPart rc = r;
  p.dphi = [traj, mc, rc](double t) {
    double x = (*traj)(t);
    double a0 = mc.a_k(0).value(x, t), b0 = mc.b_k(0).value(x, t), u0 = rc.u_j(0).value(x, t);
    return 3 * b0 * u0 / (3 * a0 - b0);
  };
  auto ts = linspace(t_span.lo, t_span.hi, 401);
  double end = t_span.lo;
  bool any = false;
  for (double t : ts) {
    double x = p.phi(t);
    if (!(p.dphi(t) > 1.0) || !(m.b_k(0).value(x, t) > 0.0)) break;
    end = t;
    any = true;
  }
  if (!any) throw ConstructionError("peakon window is empty: need phi' > 1 and b0 > 0 on the phase curve");
  p.window = {t_span.lo, end};
  std::ostringstream os;
  os << "peakon phase equation, phi(" << t_span.lo << ") = " << phi0;
  p.description = os.str();
  return p;
}

PhaseFunction build_phase(const ModelFile& mf, const CoefficientModel& m, const RegularPart& r, const std::string& name) {
  for (const auto& ps : mf.phases) {
    if (ps.name != name) continue;
    Interval span{mf.domain.t0, mf.domain.t1};
    if (ps.kind == PhaseSpec::Kind::Explicit) return explicit_phase(ps.expr, span);
    return solve_peakon_phase(m, r, ps.phi0, span);
  }
  throw ModelError("model has no phase '" + name + "'");
}

WindowReport check_soliton_window(const CoefficientModel& m, const RegularPart& r, const PhaseFunction& p,
                                  const std::vector<double>& t_grid) {
  WindowReport w;
  w.min_margin = INFINITY;
  bool any = false;
  for (double t : t_grid) {
    double x = p.phi(t), dp = p.dphi(t);
    double a0 = m.a_k(0).value(x, t), b0 = m.b_k(0).value(x, t), u0 = r.u_j(0).value(x, t);
    double ratio = (b0 > 0 && dp != 0) ? (a0 * dp - b0 * u0) / (b0 * dp) : NAN;
    if (!(ratio > 0.0 && ratio < 1.0 / 3.0)) break;
    w.ts.push_back(t);
    w.ratios.push_back(ratio);
    w.min_margin = std::min(w.min_margin, std::min(ratio, 1.0 / 3.0 - ratio));
    any = true;
  }
  if (!any) {
    std::ostringstream os;
    os << "soliton window is empty: condition 0 < (a0 phi' - b0 u0)/(b0 phi') < 1/3 fails at t = " << t_grid.front();
    throw ConstructionError(os.str());
  }
  w.window = {w.ts.front(), w.ts.back()};
  return w;
}

// ---------------------------------------------------------------- extension

ExtensionField::ExtensionField(const CoefficientModel& m, const RegularPart& r, PhaseFunction p,
                               std::function<double(double)> nu, double t_min)
    : m_(m), r_(r), p_(std::move(p)), nu_(std::move(nu)), t_min_(t_min) {
  zero_ = true;
  for (double t : linspace(std::max(t_min_, p_.window.lo), p_.window.hi, 41))
    if (nu_(t) != 0.0) zero_ = false;
}

double ExtensionField::value(double x, double t) const {
  if (zero_) return 0.0;
  double lo = std::max(t_min_, p_.window.lo), hi = p_.window.hi;
  double gap = x - p_.phi(t);
  if (gap == 0.0) return nu_(t);
  auto speed = [&](double s, double y) {
    return m_.b_k(0).value(y, s) * r_.u_j(0).value(y, s) / m_.a_k(0).value(y, s);
  };
  // left of the curve the characteristic meets it in the past, right of it in the future
  double target = gap < 0 ? lo : hi;
  if (target == t) throw ConstructionError("characteristic leaves the window before reaching the phase curve");
  GridFunction path = solve_ivp(speed, t, x, target);
  auto diff = [&](double s) { return path(s) - p_.phi(s); };
  double end = diff(target);
  if ((end > 0) == (gap > 0) && end != 0.0)
    throw ConstructionError("characteristic leaves the window before reaching the phase curve");
  double s_star = find_root_monotone(diff, std::min(t, target), std::max(t, target), 1e-13);
  auto rate = [&](double s) {
    double y = path(s);
    return m_.b_k(0).value(y, s) * r_.u_j(0).jet(y, s).fx / m_.a_k(0).value(y, s);
  };
  double integral = integrate_interval(rate, s_star, t, 1e-13, 1e-11).value;
  return nu_(s_star) * std::exp(-integral);
}

FieldJet ExtensionField::jet(double x, double t) const {
  FieldJet j;
  j.f = value(x, t);
  if (zero_) return j;
  const double h = 1e-3;
  auto fx = [&](double s) { return value(s, t); };
  j.fx = fd_derivative(fx, x, h, 1);
  j.fxx = fd_derivative(fx, x, h, 2);
  j.fxxx = fd_derivative(fx, x, 2 * h, 3);
  j.ft = fd_derivative([&](double s) { return value(x, s); }, t, h, 1);
  j.fxt = fd_derivative([&](double s) { return fd_derivative([&](double y) { return value(y, s); }, x, h, 1); }, t, h, 1);
  j.ftxx = fd_derivative([&](double s) { return fd_derivative([&](double y) { return value(y, s); }, x, h, 2); }, t, h, 1);
  return j;
}

}  // namespace vcch
