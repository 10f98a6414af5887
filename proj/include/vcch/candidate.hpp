#pragma once

#include <array>
#include <string>
#include <vector>

#include "vcch/model.hpp"

namespace vcch {

// Value and the derivatives entering the residual.
struct Jet {
  double u = 0, ut = 0, ux = 0, uxx = 0, uxxx = 0, utxx = 0;
};

// A singular term v(t, tau) together with what the chain rule needs.
struct SingularJet {
  double v = 0, vt = 0, vtau = 0, vtau2 = 0, vtau3 = 0, vtau2t = 0;
};

// Adds eps^power * v(t, (x - phi)/eps) to jet, phi moving with speed dphi.
// Nodes and weights for d/dt with step h = 1e-4 (1 + |t|): central inside the
// window, one-sided second order at its ends.
struct TimeStencil {
  std::array<double, 3> ts{}, w{};
  int centre = 0;  // index of t itself
};
TimeStencil time_stencil(double t, const Interval& window);

void add_singular(Jet& jet, const SingularJet& s, double eps, int power, double dphi);
void add_regular(Jet& jet, const FieldJet& f, double weight);

// Approximate solution Y(x, t, eps) of the vcCH equation.
class CandidateSolution {
 public:
  virtual ~CandidateSolution() = default;
  virtual const CoefficientModel& model() const = 0;
  virtual double value(double x, double t, double eps) const = 0;
  // throws BandViolation inside excluded bands
  virtual Jet jet(double x, double t, double eps) const = 0;
  // x-intervals where derivatives are not defined (crest bands)
  virtual std::vector<Interval> excluded(double, double) const { return {}; }
  // positions of the phase curves, used to refine residual grids
  virtual std::vector<double> centers(double t) const = 0;
  // decay rate of the singular part in tau
  virtual double decay_rate(double t) const = 0;
  virtual Interval time_window() const = 0;
  virtual std::string kind() const = 0;
  virtual int order() const = 0;
};

}  // namespace vcch
