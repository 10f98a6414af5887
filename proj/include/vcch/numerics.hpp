#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcch {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystem : public NumericalError {
 public:
  SingularSystem(const std::string& msg, double cond) : NumericalError(msg), condition(cond) {}
  double condition;
};

// Sampled function.  When slopes are present, interpolation is cubic Hermite,
// otherwise piecewise linear.
struct GridFunction {
  std::vector<double> nodes;
  std::vector<double> values;
  std::vector<double> slopes;

  double operator()(double s) const;
  double derivative(double s) const;
  double front() const { return nodes.front(); }
  double back() const { return nodes.back(); }
  std::size_t size() const { return nodes.size(); }
};

// Quintic Hermite interpolation on a uniform grid from values and first and
// second derivatives.  Outside the grid the result is {0, 0}.
struct QuinticGrid {
  std::vector<double> nodes, f, d1, d2;
  // value and first derivative
  std::pair<double, double> eval(double s) const;
};

struct DecayingIntegrand {
  std::function<double(double)> f;
  double decay_rate;  // f = O(exp(-decay_rate |s - center|))
  double center = 0.0;
};

struct QuadResult {
  double value;
  double error;
  double abs_value;  // integral of |f|, used as a scale
};

// Whole line integral; the truncation L is grown until the tail bound drops
// below rel_tol times the magnitude of the integral.
QuadResult integrate_decaying(const DecayingIntegrand& in, double rel_tol = 1e-12);

// Adaptive Gauss-Kronrod (7/15) on a finite interval.
QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              double abs_tol = 1e-13, double rel_tol = 1e-12);

// Integral of sampled data: composite Simpson on uniform grids with an odd
// number of nodes, trapezoid otherwise.
double integrate_samples(const std::vector<double>& nodes, const std::vector<double>& values);

// Running integral from nodes.front(), fourth order on uniform grids.
std::vector<double> cumulative_integral(const std::vector<double>& nodes,
                                        const std::vector<double>& values);

// Bracketed scalar root (Brent).  Returns r with |f(r)| < tol or a bracket
// narrower than tol.
double find_root_monotone(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-14, int max_iter = 200);

// Grows [lo, hi] geometrically around a guess until f changes sign.
std::pair<double, double> expand_bracket(const std::function<double(double)>& f, double guess,
                                         double width, int max_iter = 200);

struct IvpOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double first_step = 0.0;  // 0 picks a default
  double max_step = INFINITY;
  long max_steps = 1000000;
  double blowup = 1e100;
};

// Dormand-Prince 5(4) for y' = rhs(t, y).  t_end may lie before t0.
// The trajectory keeps slopes, so evaluation between steps is cubic Hermite.
GridFunction solve_ivp(const std::function<double(double, double)>& rhs, double t0, double y0,
                       double t_end, const IvpOptions& opt = {});

struct Interval {
  double lo, hi;
  double length() const { return hi - lo; }
  bool contains(double s) const { return s >= lo && s <= hi; }
};

// p v'' + q v' + r v = f with Dirichlet data.
struct LinearBvp {
  std::function<double(double)> p, q, r, f;
  Interval domain;
  double left = 0.0, right = 0.0;
};

struct BvpSolution {
  GridFunction v;
  double condition;   // estimate of cond_1 of the discrete operator
  double multiplier;  // Lagrange multiplier of the orthogonality constraint (0 if none)
};

// Second order central differences on n uniform nodes, tridiagonal solve.
// Throws SingularSystem when the discrete operator has an eigenvalue that is
// indistinguishable from zero at this resolution.
BvpSolution solve_linear_bvp(const LinearBvp& bvp, std::size_t n);

// Same discretisation but the solution is constrained to be orthogonal to
// `null_mode` (a known decaying kernel element).  The equation picks up a
// multiple of null_mode whose coefficient is returned as `multiplier`.
BvpSolution solve_linear_bvp_orthogonal(const LinearBvp& bvp, std::size_t n,
                                        const std::function<double(double)>& null_mode);

struct OrderFit {
  double slope;
  double intercept;
  double r_squared;
  bool exact;  // a norm was zero: slope reported as +inf
};

// Least squares fit of ln(norm) against ln(eps).
OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& norms);

// Central finite difference weights helper: derivative of order k (1..3) of f
// at s with step h, fourth order accurate.
double fd_derivative(const std::function<double(double)>& f, double s, double h, int order);

// ln(cosh(z)) without overflow.
double log_cosh(double z);

// Numerically stable log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

}  // namespace vcch
