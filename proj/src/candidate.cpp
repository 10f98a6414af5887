#include "vcch/candidate.hpp"

#include <cmath>

namespace vcch {

TimeStencil time_stencil(double t, const Interval& window) {
  double h = 1e-4 * (1.0 + std::fabs(t));
  TimeStencil s;
  if (t - h < window.lo && t + 2 * h <= window.hi) {
    s.ts = {t, t + h, t + 2 * h};
    s.w = {-1.5 / h, 2.0 / h, -0.5 / h};
    s.centre = 0;
  } else if (t + h > window.hi && t - 2 * h >= window.lo) {
    s.ts = {t - 2 * h, t - h, t};
    s.w = {0.5 / h, -2.0 / h, 1.5 / h};
    s.centre = 2;
  } else {
    s.ts = {t - h, t, t + h};
    s.w = {-0.5 / h, 0.0, 0.5 / h};
    s.centre = 1;
  }
  return s;
}

void add_singular(Jet& j, const SingularJet& s, double eps, int power, double dphi) {
  double w = 1.0;
  for (int k = 0; k < power; ++k) w *= eps;
  double ie = 1.0 / eps, ie2 = ie * ie, ie3 = ie2 * ie;
  j.u += w * s.v;
  j.ux += w * s.vtau * ie;
  j.uxx += w * s.vtau2 * ie2;
  j.uxxx += w * s.vtau3 * ie3;
  j.ut += w * (s.vt - dphi * s.vtau * ie);
  j.utxx += w * (s.vtau2t - dphi * s.vtau3 * ie) * ie2;
}

void add_regular(Jet& j, const FieldJet& f, double w) {
  j.u += w * f.f;
  j.ut += w * f.ft;
  j.ux += w * f.fx;
  j.uxx += w * f.fxx;
  j.uxxx += w * f.fxxx;
  j.utxx += w * f.ftxx;
}

}  // namespace vcch
