#include "vcch/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

namespace vcch {

namespace {

std::size_t locate(const std::vector<double>& nodes, double s) {
  if (nodes.size() < 2) throw NumericalError("grid function needs at least two nodes");
  double span = nodes.back() - nodes.front();
  double slack = 1e-12 * std::max(1.0, std::fabs(span));
  if (s < nodes.front() - slack || s > nodes.back() + slack) {
    std::ostringstream os;
    os << "evaluation at " << s << " outside [" << nodes.front() << ", " << nodes.back() << "]";
    throw NumericalError(os.str());
  }
  auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  if (i == 0) i = 1;
  if (i >= nodes.size()) i = nodes.size() - 1;
  return i - 1;
}

}  // namespace

double GridFunction::operator()(double s) const {
  std::size_t i = locate(nodes, s);
  double h = nodes[i + 1] - nodes[i];
  double u = (s - nodes[i]) / h;
  if (slopes.empty()) return values[i] + u * (values[i + 1] - values[i]);
  double u2 = u * u, u3 = u2 * u;
  double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  return h00 * values[i] + h10 * h * slopes[i] + h01 * values[i + 1] + h11 * h * slopes[i + 1];
}

double GridFunction::derivative(double s) const {
  std::size_t i = locate(nodes, s);
  double h = nodes[i + 1] - nodes[i];
  double u = (s - nodes[i]) / h;
  if (slopes.empty()) return (values[i + 1] - values[i]) / h;
  double u2 = u * u;
  double d00 = 6 * u2 - 6 * u, d10 = 3 * u2 - 4 * u + 1;
  double d01 = -6 * u2 + 6 * u, d11 = 3 * u2 - 2 * u;
  return (d00 * values[i] + d01 * values[i + 1]) / h + d10 * slopes[i] + d11 * slopes[i + 1];
}

// ---------------------------------------------------------------- quadrature

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error, abs_value;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double k = fc * kWgk[7], g = fc * kWg[3], ka = std::fabs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double f1 = f(c - dx), f2 = f(c + dx);
    k += kWgk[j] * (f1 + f2);
    ka += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, k * h, std::fabs((k - g) * h), ka * std::fabs(h)};
}

}  // namespace

QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol) {
  if (a == b) return {0.0, 0.0, 0.0};
  std::priority_queue<Panel> heap;
  Panel first = gk15(f, a, b);
  heap.push(first);
  double total = first.value, err = first.error, total_abs = first.abs_value;
  const int max_panels = 4000;
  int panels = 1;
  while (err > std::max(abs_tol, rel_tol * total_abs)) {
    if (panels >= max_panels) {
      // accept tiny residual error rather than fail when we are at roundoff
      if (err <= 1e3 * std::max(abs_tol, rel_tol * total_abs)) break;
      throw NonConvergence("adaptive quadrature did not converge");
    }
    Panel worst = heap.top();
    heap.pop();
    double m = 0.5 * (worst.a + worst.b);
    Panel l = gk15(f, worst.a, m), r = gk15(f, m, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    total_abs += l.abs_value + r.abs_value - worst.abs_value;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  // recompute sums to shed accumulated cancellation
  double v = 0.0, e = 0.0, av = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    av += heap.top().abs_value;
    heap.pop();
  }
  return {v, e, av};
}

QuadResult integrate_decaying(const DecayingIntegrand& in, double rel_tol) {
  if (!(in.decay_rate > 0.0)) throw NumericalError("decay rate must be positive");
  double L = 10.0 / in.decay_rate;
  for (int it = 0; it < 40; ++it) {
    double a = in.center - L, b = in.center + L;
    QuadResult r = integrate_interval(in.f, a, b, 0.0, 0.1 * rel_tol);
    double tail = (std::fabs(in.f(a)) + std::fabs(in.f(b))) / in.decay_rate;
    double scale = std::max(std::fabs(r.value), r.abs_value);
    if (tail <= rel_tol * scale || (scale == 0.0 && tail == 0.0)) {
      // the tail bound is only meaningful if f really decays at the stated rate
      double fa = std::fabs(in.f(a)), fb = std::fabs(in.f(b));
      double ga = std::fabs(in.f(in.center - 2 * L)), gb = std::fabs(in.f(in.center + 2 * L));
      double env = std::exp(-0.5 * in.decay_rate * L);
      if (ga > fa * env + 1e-300 || gb > fb * env + 1e-300)
        throw NonConvergence("integrand does not decay at the declared rate");
      r.error += tail;
      return r;
    }
    L *= 1.5;
  }
  throw NonConvergence("integrand does not decay at the declared rate");
}

namespace {

bool is_uniform(const std::vector<double>& x) {
  if (x.size() < 3) return true;
  double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::fabs((x[i] - x[i - 1]) - h) > 1e-9 * std::fabs(h)) return false;
  return true;
}

}  // namespace

double integrate_samples(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (n % 2 == 1 && n >= 3 && is_uniform(x)) {
    double h = (x.back() - x.front()) / static_cast<double>(n - 1);
    double s = y.front() + y.back();
    for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
    return s * h / 3.0;
  }
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

std::vector<double> cumulative_integral(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4 || !is_uniform(x)) {
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return out;
  }
  double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double seg;
    if (i == 0)
      seg = 9 * y[0] + 19 * y[1] - 5 * y[2] + y[3];
    else if (i + 2 == n)
      seg = y[n - 4] - 5 * y[n - 3] + 19 * y[n - 2] + 9 * y[n - 1];
    else
      seg = -y[i - 1] + 13 * y[i] + 13 * y[i + 1] - y[i + 2];
    out[i + 1] = out[i] + seg * h / 24.0;
  }
  return out;
}

// ---------------------------------------------------------------- roots

double find_root_monotone(const std::function<double(double)>& f, double lo, double hi,
                          double tol, int max_iter) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (std::fabs(fa) < tol && std::fabs(fb) < tol) return 0.5 * (a + b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericalError("root is not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 2.2e-16 * std::fabs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || std::fabs(fb) < tol || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NonConvergence("root finder exceeded iteration limit");
}

std::pair<double, double> expand_bracket(const std::function<double(double)>& f, double guess,
                                         double width, int max_iter) {
  double lo = guess - width, hi = guess + width;
  double flo = f(lo), fhi = f(hi);
  for (int it = 0; it < max_iter; ++it) {
    if ((flo > 0) != (fhi > 0) || flo == 0.0 || fhi == 0.0) return {lo, hi};
    width *= 2.0;
    if (std::fabs(flo) < std::fabs(fhi)) {
      lo = guess - width;
      flo = f(lo);
    } else {
      hi = guess + width;
      fhi = f(hi);
    }
  }
  throw NumericalError("could not bracket root");
}

// ---------------------------------------------------------------- ODE

GridFunction solve_ivp(const std::function<double(double, double)>& rhs, double t0, double y0,
                       double t_end, const IvpOptions& opt) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  GridFunction out;
  double dir = t_end >= t0 ? 1.0 : -1.0;
  double span = std::fabs(t_end - t0);
  double t = t0, y = y0;
  double k1 = rhs(t, y);
  out.nodes.push_back(t);
  out.values.push_back(y);
  out.slopes.push_back(k1);
  if (span == 0.0) return out;
  double h = opt.first_step > 0 ? opt.first_step : std::min(span, 1e-3 * std::max(1.0, span));
  long steps = 0;
  while (dir * (t_end - t) > 0) {
    if (++steps > opt.max_steps) throw NonConvergence("ODE integrator exceeded step limit");
    h = std::min(h, opt.max_step);
    if (h > std::fabs(t_end - t)) h = std::fabs(t_end - t);
    if (h < 1e-14 * std::max(1.0, std::fabs(t)))
      throw NonConvergence("ODE step size underflow (stiff or singular right-hand side)");
    double s = dir * h;
    double k2 = rhs(t + c2 * s, y + s * a21 * k1);
    double k3 = rhs(t + c3 * s, y + s * (a31 * k1 + a32 * k2));
    double k4 = rhs(t + c4 * s, y + s * (a41 * k1 + a42 * k2 + a43 * k3));
    double k5 = rhs(t + c5 * s, y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    double k6 = rhs(t + s, y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    double ynew = y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    double k7 = rhs(t + s, ynew);
    double err = std::fabs(s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    double sc = opt.abs_tol + opt.rel_tol * std::max(std::fabs(y), std::fabs(ynew));
    double ratio = err / sc;
    if (ratio <= 1.0) {
      t = (std::fabs(t_end - (t + s)) < 1e-15 * std::max(1.0, std::fabs(t_end))) ? t_end : t + s;
      y = ynew;
      k1 = k7;
      if (!std::isfinite(y) || std::fabs(y) > opt.blowup)
        throw NumericalError("ODE solution blew up near t = " + std::to_string(t));
      out.nodes.push_back(t);
      out.values.push_back(y);
      out.slopes.push_back(k1);
    }
    double fac = ratio == 0.0 ? 5.0 : 0.9 * std::pow(ratio, -0.2);
    h *= std::min(5.0, std::max(0.2, fac));
  }
  if (dir < 0) {
    std::reverse(out.nodes.begin(), out.nodes.end());
    std::reverse(out.values.begin(), out.values.end());
    std::reverse(out.slopes.begin(), out.slopes.end());
  }
  return out;
}

// ---------------------------------------------------------------- BVP

namespace {

// LU with partial pivoting of a tridiagonal matrix, same scheme as LAPACK gttrf
struct TridiagLU {
  std::vector<double> dl, d, du, du2;
  std::vector<std::size_t> ipiv;

  TridiagLU(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
      : dl(std::move(lower)), d(std::move(diag)), du(std::move(upper)) {
    std::size_t n = d.size();
    du2.assign(n, 0.0);
    ipiv.resize(n);
    for (std::size_t i = 0; i < n; ++i) ipiv[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::fabs(d[i]) >= std::fabs(dl[i])) {
        if (d[i] != 0.0) {
          double fact = dl[i] / d[i];
          dl[i] = fact;
          d[i + 1] -= fact * du[i];
        }
        ipiv[i] = i;
      } else {
        double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        ipiv[i] = i + 1;
      }
    }
    for (double v : d)
      if (v == 0.0) throw SingularSystem("tridiagonal matrix is exactly singular", INFINITY);
  }

  void solve(std::vector<double>& b) const {
    std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      std::size_t ip = ipiv[i];
      double temp = b[i + 1 - ip + i] - dl[i] * b[ip];
      b[i] = b[ip];
      b[i + 1] = temp;
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n; k-- > 2;) {
      std::size_t i = k - 2;
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
  }

  void solve_transpose(std::vector<double>& b) const {
    std::size_t n = d.size();
    b[0] /= d[0];
    if (n > 1) b[1] = (b[1] - du[0] * b[0]) / d[1];
    for (std::size_t i = 2; i < n; ++i) b[i] = (b[i] - du[i - 1] * b[i - 1] - du2[i - 2] * b[i - 2]) / d[i];
    for (std::size_t k = n - 1; k-- > 0;) {
      std::size_t ip = ipiv[k];
      double temp = b[k] - dl[k] * b[k + 1];
      b[k] = b[ip];
      b[ip] = temp;
    }
  }

  // Hager's estimate of ||A^-1||_1
  double inverse_norm1() const {
    std::size_t n = d.size();
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), y, z;
    double est = 0.0;
    for (int it = 0; it < 5; ++it) {
      y = x;
      solve(y);
      double ny = 0.0;
      for (double v : y) ny += std::fabs(v);
      if (ny <= est && it > 0) break;
      est = ny;
      z.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) z[i] = y[i] >= 0 ? 1.0 : -1.0;
      solve_transpose(z);
      std::size_t j = 0;
      double zx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        zx += z[i] * x[i];
        if (std::fabs(z[i]) > std::fabs(z[j])) j = i;
      }
      if (std::fabs(z[j]) <= zx) break;
      x.assign(n, 0.0);
      x[j] = 1.0;
    }
    // alternative probe catches cases the iteration above misses
    std::vector<double> alt(n);
    for (std::size_t i = 0; i < n; ++i)
      alt[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + static_cast<double>(i) / std::max<double>(1.0, n - 1.0));
    solve(alt);
    double na = 0.0;
    for (double v : alt) na += std::fabs(v);
    return std::max(est, 2.0 * na / (3.0 * static_cast<double>(n)));
  }
};

struct Discretised {
  std::vector<double> nodes;
  std::vector<double> lower, diag, upper, rhs;  // interior unknowns only
  double norm1 = 0.0;
  double pmax = 0.0;
};

Discretised discretise(const LinearBvp& bvp, std::size_t n) {
  if (n < 5) throw NumericalError("BVP needs at least 5 nodes");
  Discretised D;
  double a = bvp.domain.lo, b = bvp.domain.hi;
  double h = (b - a) / static_cast<double>(n - 1);
  D.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) D.nodes[i] = a + h * static_cast<double>(i);
  D.nodes.back() = b;
  std::size_t m = n - 2;
  D.lower.assign(m, 0.0);
  D.diag.assign(m, 0.0);
  D.upper.assign(m, 0.0);
  D.rhs.assign(m, 0.0);
  std::vector<double> colsum(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double s = D.nodes[k + 1];
    double p = bvp.p(s), q = bvp.q(s), r = bvp.r(s);
    D.pmax = std::max(D.pmax, std::fabs(p));
    double lo = p / (h * h) - q / (2 * h);
    double di = -2 * p / (h * h) + r;
    double up = p / (h * h) + q / (2 * h);
    D.rhs[k] = bvp.f(s);
    if (k == 0) D.rhs[k] -= lo * bvp.left; else D.lower[k - 1] = lo;
    if (k + 1 == m) D.rhs[k] -= up * bvp.right; else D.upper[k] = up;
    D.diag[k] = di;
    colsum[k] += std::fabs(di);
    if (k > 0) colsum[k - 1] += std::fabs(lo);
    if (k + 1 < m) colsum[k + 1] += std::fabs(up);
  }
  for (double c : colsum) D.norm1 = std::max(D.norm1, c);
  return D;
}

GridFunction assemble(const Discretised& D, const LinearBvp& bvp, const std::vector<double>& inner) {
  GridFunction g;
  g.nodes = D.nodes;
  g.values.resize(D.nodes.size());
  g.values.front() = bvp.left;
  g.values.back() = bvp.right;
  for (std::size_t k = 0; k < inner.size(); ++k) g.values[k + 1] = inner[k];
  return g;
}

}  // namespace

BvpSolution solve_linear_bvp(const LinearBvp& bvp, std::size_t n) {
  Discretised D = discretise(bvp, n);
  TridiagLU lu(D.lower, D.diag, D.upper);
  double inv = lu.inverse_norm1();
  double cond = D.norm1 * inv;
  double ell = bvp.domain.length();
  // an eigenvalue this close to zero is within the discretisation error of
  // an exactly singular continuous problem
  double floor = 1e-2 * D.pmax / (ell * ell);
  if (1.0 / inv < floor || cond > 1e13) {
    std::ostringstream os;
    os << "BVP operator is singular at this resolution (condition estimate " << cond << ")";
    throw SingularSystem(os.str(), cond);
  }
  std::vector<double> x = D.rhs;
  lu.solve(x);
  return {assemble(D, bvp, x), cond, 0.0};
}

BvpSolution solve_linear_bvp_orthogonal(const LinearBvp& bvp, std::size_t n,
                                        const std::function<double(double)>& null_mode) {
  Discretised D = discretise(bvp, n);
  TridiagLU lu(D.lower, D.diag, D.upper);
  double cond = D.norm1 * lu.inverse_norm1();
  std::size_t m = D.rhs.size();
  std::vector<double> nm(m);
  for (std::size_t k = 0; k < m; ++k) nm[k] = null_mode(D.nodes[k + 1]);
  std::vector<double> y = D.rhs, z = nm;
  lu.solve(y);
  lu.solve(z);
  // constraint uses trapezoid weights; boundary values are the Dirichlet data
  double h = D.nodes[1] - D.nodes[0];
  double wy = 0.5 * h * (bvp.left * null_mode(D.nodes.front()) + bvp.right * null_mode(D.nodes.back()));
  double wz = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    wy += h * nm[k] * y[k];
    wz += h * nm[k] * z[k];
  }
  if (wz == 0.0 || !std::isfinite(wz))
    throw SingularSystem("null mode is not transversal to the range of the operator", cond);
  double lambda = wy / wz;
  for (std::size_t k = 0; k < m; ++k) y[k] -= lambda * z[k];
  return {assemble(D, bvp, y), cond, lambda};
}

// ---------------------------------------------------------------- quintic grid

std::pair<double, double> QuinticGrid::eval(double s) const {
  if (nodes.size() < 2 || !(s >= nodes.front() && s <= nodes.back())) return {0.0, 0.0};
  double h = nodes[1] - nodes[0];
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>((s - nodes.front()) / h), nodes.size() - 2);
  double x = (s - nodes[k]) / h, x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
  double H0 = 1 - 10 * x3 + 15 * x4 - 6 * x5, H1 = x - 6 * x3 + 8 * x4 - 3 * x5;
  double H2 = 0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5, H5 = 10 * x3 - 15 * x4 + 6 * x5;
  double H4 = -4 * x3 + 7 * x4 - 3 * x5, H3 = 0.5 * x3 - x4 + 0.5 * x5;
  double G0 = -30 * x2 + 60 * x3 - 30 * x4, G1 = 1 - 18 * x2 + 32 * x3 - 15 * x4;
  double G2 = x - 4.5 * x2 + 6 * x3 - 2.5 * x4, G5 = -G0;
  double G4 = -12 * x2 + 28 * x3 - 15 * x4, G3 = 1.5 * x2 - 4 * x3 + 2.5 * x4;
  double v = f[k] * H0 + h * d1[k] * H1 + h * h * d2[k] * H2 + f[k + 1] * H5 + h * d1[k + 1] * H4 +
             h * h * d2[k + 1] * H3;
  double dv = (f[k] * G0 + f[k + 1] * G5) / h + d1[k] * G1 + d1[k + 1] * G4 + h * (d2[k] * G2 + d2[k + 1] * G3);
  return {v, dv};
}

// ---------------------------------------------------------------- misc

OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& norms) {
  if (eps.size() != norms.size() || eps.size() < 2)
    throw NumericalError("order fit needs at least two (eps, norm) pairs");
  for (double e : eps)
    if (!(e > 0.0)) throw NumericalError("eps values must be positive");
  for (double n : norms)
    if (n == 0.0) return {INFINITY, 0.0, 1.0, true};
  std::size_t k = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double x = std::log(eps[i]), y = std::log(norms[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double kn = static_cast<double>(k);
  double den = kn * sxx - sx * sx;
  if (den == 0.0) throw NumericalError("eps values must be distinct");
  double slope = (kn * sxy - sx * sy) / den;
  double icpt = (sy - slope * sx) / kn;
  double ssr = 0, sst = 0, ybar = sy / kn;
  for (std::size_t i = 0; i < k; ++i) {
    double x = std::log(eps[i]), y = std::log(norms[i]);
    double f = icpt + slope * x;
    ssr += (y - f) * (y - f);
    sst += (y - ybar) * (y - ybar);
  }
  double r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
  return {slope, icpt, r2, false};
}

double fd_derivative(const std::function<double(double)>& f, double s, double h, int order) {
  switch (order) {
    case 1: return (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * h);
    case 2:
      return (-f(s - 2 * h) + 16 * f(s - h) - 30 * f(s) + 16 * f(s + h) - f(s + 2 * h)) / (12 * h * h);
    case 3:
      return (f(s - 3 * h) - 8 * f(s - 2 * h) + 13 * f(s - h) - 13 * f(s + h) + 8 * f(s + 2 * h) -
              f(s + 3 * h)) / (8 * h * h * h);
    default: throw NumericalError("unsupported derivative order");
  }
}

double log_cosh(double z) {
  double a = std::fabs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace vcch
