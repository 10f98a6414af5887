#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vcch/errors.hpp"
#include "vcch/expr.hpp"
#include "vcch/numerics.hpp"

namespace vcch {

// Value and the partial derivatives the residual needs.
struct FieldJet {
  double f = 0, fx = 0, ft = 0, fxx = 0, fxt = 0, fxxx = 0, ftxx = 0;
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double value(double x, double t) const = 0;
  virtual FieldJet jet(double x, double t) const = 0;
  virtual bool is_zero() const { return false; }
  virtual std::string describe() const = 0;
};
using FieldPtr = std::shared_ptr<const ScalarField>;

FieldPtr expression_field(const Expression& e);
FieldPtr zero_field();

// Values on a tensor grid; evaluation uses local degree five interpolation.
FieldPtr grid_field(std::vector<double> xs, std::vector<double> ts,
                    std::vector<std::vector<double>> values /* [it][ix] */, std::string what);

// a = sum eps^k a_k, b = sum eps^k b_k
struct CoefficientModel {
  std::vector<FieldPtr> a, b;

  const ScalarField& a_k(std::size_t k) const;
  const ScalarField& b_k(std::size_t k) const;
  double a_at(double x, double t, double eps) const;
  double b_at(double x, double t, double eps) const;
};

struct RegularPart {
  std::vector<FieldPtr> u;  // u_0, u_1, ...
  const ScalarField& u_j(std::size_t j) const;
};

struct PhaseFunction {
  std::function<double(double)> phi, dphi;
  Interval window{0, 0};
  std::string description;
};

struct Rect {
  double x0, x1, t0, t1;
};

struct PhaseSpec {
  enum class Kind { Explicit, PeakonOde } kind = Kind::Explicit;
  std::string name;  // phi, phi1, phi2
  Expression expr;
  double phi0 = 0.0;
};

struct RegularSpec {
  bool solve = false;
  Expression expr;  // the field itself, or its initial data when solve is set
};

struct ModelFile {
  std::vector<Expression> a, b;
  std::vector<RegularSpec> u;
  std::vector<PhaseSpec> phases;
  Rect domain{-1, 1, 0, 1};
};

ModelFile parse_model(const std::string& text);
ModelFile load_model(const std::string& path);

CoefficientModel build_coefficients(const ModelFile& mf);
// Checks a0 > 0 and b0 > 0 on a sample of the domain.
void check_positivity(const CoefficientModel& m, const Rect& domain);

// Builds u_0, u_1 from the file, solving along characteristics where requested,
// and verifies directly supplied fields against the regular equations.
RegularPart build_regular(const ModelFile& mf, const CoefficientModel& m);

// max |a0 u0_t + b0 u0 u0_x| and max |a0 u1_t + b0 (u0 u1)_x - f1| on a sample grid
std::pair<double, double> regular_defects(const CoefficientModel& m, const RegularPart& r,
                                          const Rect& rect);

// a0 u_t + b0 u u_x = 0, u(x, t0) = g(x)
FieldPtr solve_regular_leading(const CoefficientModel& m, const Expression& g,
                               const std::vector<double>& x_grid, const std::vector<double>& t_grid);

// a0 u_t + b0 (u0 u)_x = -a1 u0_t - b1 u0 u0_x, u(x, t0) = g1(x)
FieldPtr solve_regular_correction(const CoefficientModel& m, const ScalarField& u0,
                                  const Expression& g1, const std::vector<double>& x_grid,
                                  const std::vector<double>& t_grid);

PhaseFunction explicit_phase(const Expression& phi, const Interval& t_span);

// phi' = 3 b0 u0 / (3 a0 - b0) along x = phi(t); the window is where phi' > 1 and b0 > 0
// (ConstructionError when empty).
PhaseFunction solve_peakon_phase(const CoefficientModel& m, const RegularPart& r, double phi0,
                                 const Interval& t_span);

PhaseFunction build_phase(const ModelFile& mf, const CoefficientModel& m, const RegularPart& r,
                          const std::string& name);

struct WindowReport {
  Interval window;
  double min_margin;  // distance of the window ratio from the ends of (0, 1/3)
  std::vector<double> ts, ratios;
};

// Soliton admissibility: 0 < (a0 phi' - b0 u0)/(b0 phi') < 1/3 and b0 > 0 on x = phi(t).
// The window is the leading run of t_grid where it holds; ConstructionError when empty.
WindowReport check_soliton_window(const CoefficientModel& m, const RegularPart& r,
                                  const PhaseFunction& p, const std::vector<double>& t_grid);

// Extension of the boundary value nu(t) on x = phi(t) into x < phi(t) along the
// characteristics of a0 u_t + b0 u0 u_x + b0 u0_x u = 0.
class ExtensionField : public ScalarField {
 public:
  ExtensionField(const CoefficientModel& m, const RegularPart& r, PhaseFunction p,
                 std::function<double(double)> nu, double t_min);
  double value(double x, double t) const override;
  FieldJet jet(double x, double t) const override;
  bool is_zero() const override { return zero_; }
  std::string describe() const override { return "extension of boundary data along characteristics"; }

 private:
  CoefficientModel m_;
  RegularPart r_;
  PhaseFunction p_;
  std::function<double(double)> nu_;
  double t_min_;
  bool zero_;
};

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace vcch
