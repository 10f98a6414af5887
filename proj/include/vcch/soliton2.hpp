#pragma once

#include <array>
#include <memory>

#include "vcch/candidate.hpp"
#include "vcch/model.hpp"

namespace vcch {

// Printed: mu_k^2 = 1 - 3 sqrt(6) u0^{3/2} / c_k, gamma = sqrt(6)/(3 sqrt(u0)), scale 12 u0.
// Consistent: the parameters for which V0 solves the full leading-order
// equation, including the u0 V_xxx term: with w = 2 u0/3 and speeds c_k - u0,
// mu_k^2 = 1 - 3 w/(c_k - u0), gamma = 1, scale 12 w.
enum class TwoPhaseForm { Printed, Consistent };

struct TwoPhaseParams {
  double t = 0, u0 = 0, c1 = 0, c2 = 0;
  double mu1 = 0, mu2 = 0, gamma = 0, scale = 0;
  TwoPhaseForm form = TwoPhaseForm::Printed;
  double mu(int k) const { return k == 1 ? mu1 : mu2; }
};

// Throws ModelError when an inequality fails or mu1 == mu2.
TwoPhaseParams two_phase_params(double t, double u0, double c1, double c2,
                                TwoPhaseForm form = TwoPhaseForm::Printed);
// Also checks a0 = 1, b0 = 3 and equal u0 on both curves (tolerance 1e-8).
TwoPhaseParams make_two_phase_params(const CoefficientModel& m, const RegularPart& r, const PhaseFunction& p1,
                                     const PhaseFunction& p2, double t, TwoPhaseForm form = TwoPhaseForm::Printed);

struct TwoPhaseState {
  double delta1 = 0, delta2 = 0;
  double log_delta1 = 0, log_delta2 = 0;  // ln Delta_1, ln Delta_2
  double defect = 0;                      // max_k |delta_k - gamma mu_k (-tau_k + ln(Delta1/Delta2))|
  double L() const { return log_delta1 - log_delta2; }
  double E(int k) const { return std::exp(k == 1 ? delta1 : delta2); }
};

// delta_k = gamma mu_k (-tau_k + ln(Delta1/Delta2)).  Throws NonConvergence when the
// defect exceeds tol max(1, |delta1|, |delta2|).
TwoPhaseState solve_deltas(const TwoPhaseParams& p, double tau1, double tau2, double tol = 1e-12);
// tau_k recovered from a state
std::array<double, 2> taus_from_state(const TwoPhaseParams& p, const TwoPhaseState& s);

double eval_V0_two_phase(const TwoPhaseParams& p, const TwoPhaseState& s);
double eval_V0_two_phase(const TwoPhaseParams& p, double tau1, double tau2);

// All partial derivatives of V0 in (tau1, tau2) up to order three.
// d[i][j] = d^{i+j} V0 / d tau1^i d tau2^j, i + j <= 3.
struct TwoPhaseDerivs {
  std::array<std::array<double, 4>, 4> d{};
};
TwoPhaseDerivs eval_V0_derivs(const TwoPhaseParams& p, double tau1, double tau2);

// Limit of V0 as tau_k -> +inf (sign = +1) or -inf (sign = -1), as a function
// of the other phase variable.
double limit_profile(const TwoPhaseParams& p, int k, int sign, double tau_other);

struct TwoPhaseOptions {
  TwoPhaseForm form = TwoPhaseForm::Printed;
};

class TwoPhaseSoliton : public CandidateSolution {
 public:
  TwoPhaseSoliton(CoefficientModel m, RegularPart r, PhaseFunction p1, PhaseFunction p2, Interval window,
                  TwoPhaseOptions opt = {});

  const CoefficientModel& model() const override { return m_; }
  double value(double x, double t, double eps) const override;
  Jet jet(double x, double t, double eps) const override;
  std::vector<double> centers(double t) const override { return {p1_.phi(t), p2_.phi(t)}; }
  double decay_rate(double t) const override;
  Interval time_window() const override { return window_; }
  std::string kind() const override { return "soliton2"; }
  int order() const override { return 0; }

  TwoPhaseParams params(double t) const;
  const PhaseFunction& phase(int k) const { return k == 1 ? p1_ : p2_; }

 private:
  CoefficientModel m_;
  RegularPart r_;
  PhaseFunction p1_, p2_;
  Interval window_;
  TwoPhaseOptions opt_;
};

std::shared_ptr<TwoPhaseSoliton> assemble_two_phase(const ModelFile& mf, TwoPhaseOptions opt = {});

}  // namespace vcch
