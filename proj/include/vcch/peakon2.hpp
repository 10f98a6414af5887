#pragma once

#include <array>
#include <memory>

#include "vcch/candidate.hpp"
#include "vcch/model.hpp"

namespace vcch {

struct TwoPeakonParams {
  double t = 0, c1 = 0, c2 = 0;  // c1 > c2 > 0
};

// Throws ModelError unless c1 > c2 > 0.
TwoPeakonParams two_peakon_params(double t, double c1, double c2);
// Also checks u0 = 0 and a0 = 1, b0 = 3 on both curves (tolerance 1e-8).
TwoPeakonParams make_two_peakon_params(const CoefficientModel& m, const RegularPart& r, const PhaseFunction& p1,
                                       const PhaseFunction& p2, double t);

struct XiEta {
  double xi = 0, eta = 0;
};
// xi = (c2 tau1 - c1 tau2)/(c2 - c1), eta = (tau1 - tau2)/(c2 - c1); tau_k = xi - c_k eta
XiEta to_xi_eta(const TwoPeakonParams& p, double tau1, double tau2);
std::array<double, 2> from_xi_eta(const TwoPeakonParams& p, const XiEta& z);

// c_k/(c1 - c2): the rates multiplying tau1 - tau2 in the exponentials
std::array<double, 2> exponent_rates(const TwoPeakonParams& p);

// Crest positions in xi at a given eta (first and second term).
std::array<double, 2> crest_xi(const TwoPeakonParams& p, double eta);
// Amplitude factors of the two terms.
std::array<double, 2> crest_weights(const TwoPeakonParams& p, double eta);

double eval_V0_two_peakon(const TwoPeakonParams& p, const XiEta& z);
double eval_V0_two_peakon(const TwoPeakonParams& p, double tau1, double tau2);

// Off-crest derivatives in (xi, eta).  Throws BandViolation on a crest.
struct TwoPeakonJet {
  double v = 0, xi = 0, xi2 = 0, xi3 = 0, eta = 0, xi2eta = 0;
};
TwoPeakonJet eval_V0_two_peakon_jet(const TwoPeakonParams& p, const XiEta& z);

// Limit of V0 as tau_k -> +inf (sign = +1) or -inf (sign = -1).
double limit_profile_peakon(const TwoPeakonParams& p, int k, int sign, double tau_other);

class TwoPhasePeakon : public CandidateSolution {
 public:
  TwoPhasePeakon(CoefficientModel m, RegularPart r, PhaseFunction p1, PhaseFunction p2, Interval window,
                 double band = 1e-3);

  const CoefficientModel& model() const override { return m_; }
  double value(double x, double t, double eps) const override;
  Jet jet(double x, double t, double eps) const override;
  std::vector<Interval> excluded(double t, double eps) const override;
  std::vector<double> centers(double t) const override { return {p1_.phi(t), p2_.phi(t)}; }
  double decay_rate(double) const override { return 1.0; }
  Interval time_window() const override { return window_; }
  std::string kind() const override { return "peakon2"; }
  int order() const override { return 0; }

  TwoPeakonParams params(double t) const;
  // x positions of the two crests
  std::array<double, 2> crest_x(double t, double eps) const;

 private:
  XiEta coords(double x, double t, double eps, const TwoPeakonParams& p) const;

  CoefficientModel m_;
  RegularPart r_;
  PhaseFunction p1_, p2_;
  Interval window_;
  double band_;
};

std::shared_ptr<TwoPhasePeakon> assemble_two_peakon(const ModelFile& mf);

}  // namespace vcch
