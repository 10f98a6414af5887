#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "vcch/candidate.hpp"
#include "vcch/model.hpp"

namespace vcch {

// v0 = A(t) exp(-alpha(t) |tau - beta(t)|), alpha = sqrt(b0(phi, t)/3).
class PeakonMainTerm {
 public:
  PeakonMainTerm(CoefficientModel m, RegularPart r, PhaseFunction p,
                 std::function<double(double)> amplitude = {}, std::function<double(double)> offset = {});

  double alpha(double t) const;
  double dalpha(double t) const;  // d alpha / dt along the curve
  double amplitude(double t) const { return A_ ? A_(t) : 1.0; }
  double offset(double t) const { return beta_ ? beta_(t) : 0.0; }
  bool is_normalised() const { return !A_ && !beta_; }
  // one-sided jet; at the crest tau = beta the side is chosen by `side`
  SingularJet jet(double t, double tau, int side = 0) const;

  const CoefficientModel& model() const { return m_; }
  const RegularPart& regular() const { return r_; }
  const PhaseFunction& phase() const { return p_; }
  const Interval& window() const { return p_.window; }

 private:
  CoefficientModel m_;
  RegularPart r_;
  PhaseFunction p_;
  std::function<double(double)> A_, beta_;
};

PeakonMainTerm make_peakon_main(const CoefficientModel& m, const RegularPart& r, const PhaseFunction& p);

// Index 0 is the + side (tau > 0), index 1 the - side.
struct ACoefficients {
  std::array<double, 2> A1{}, A2{}, A3{}, A4{};
};
ACoefficients compute_A_coeffs(const PeakonMainTerm& main, double t);

// Phi_1 and F_1 = Phi_1' on both half-lines (limits E = 0).
struct PeakonSource {
  ACoefficients A;
  double alpha = 0;
  double Phi(double tau) const;
  double F(double tau) const;
  // one side explicitly (0: +, 1: -) at tau = +-s, so that s = 0 gives the one-sided limit
  double Phi_side(int side, double s) const;
  double F_side(int side, double s) const;
};
PeakonSource compute_Phi1_pm(const ACoefficients& A, double alpha);

// y1 = exp(-alpha s), y2 from the closed form; side + for tau >= 0.
struct FundamentalValues {
  double y1, dy1, y2, dy2;
};
FundamentalValues fundamental_system(double alpha, double dphi, int side, double tau);

struct PeakonCorrectionJet {
  double v = 0, d1 = 0, d2 = 0, d3 = 0;
};

struct PiecewiseCorrection {
  double t = 0, alpha = 0, dphi = 0, cutoff = 0, pW = 1;
  double a0 = 0, b0 = 0, u0 = 0;
  std::array<double, 2> c1{};  // glue constants (+, -)
  PeakonSource source;
  // per side, on s = |tau| in [0, cutoff]: I2(s) = int_0^s Phi y2, T(s) = int_s^inf Phi y1
  std::array<QuinticGrid, 2> I2, T;

  PeakonCorrectionJet eval(double tau) const;
  double value(double tau) const { return eval(tau).v; }
};

struct PeakonCorrectionOptions {
  double cutoff_factor = 40.0;  // cutoff = factor / alpha
  std::size_t nodes = 8001;
};

PiecewiseCorrection solve_correction_peakon(const PeakonMainTerm& main, double t,
                                            const PeakonCorrectionOptions& opt = {});
// Same with an explicit source, for tests.
PiecewiseCorrection solve_correction_peakon(const PeakonMainTerm& main, double t, const PeakonSource& src,
                                            const PeakonCorrectionOptions& opt = {});

// C with |v(tau)| <= C (1 + |tau|)^2 exp(-alpha |tau|) on the grid.
double envelope_constant(const PiecewiseCorrection& c);

class OnePhasePeakon : public CandidateSolution {
 public:
  OnePhasePeakon(std::shared_ptr<const PeakonMainTerm> main, int order, PeakonCorrectionOptions opt = {},
                 double band = 1e-3);

  const CoefficientModel& model() const override { return main_->model(); }
  double value(double x, double t, double eps) const override;
  Jet jet(double x, double t, double eps) const override;
  std::vector<Interval> excluded(double t, double eps) const override;
  std::vector<double> centers(double t) const override;
  double decay_rate(double t) const override { return main_->alpha(t); }
  Interval time_window() const override { return main_->window(); }
  std::string kind() const override { return "peakon1"; }
  int order() const override { return order_; }

  const PeakonMainTerm& main() const { return *main_; }
  std::shared_ptr<const PiecewiseCorrection> correction(double t) const;

 private:
  std::array<double, 3> stencil_times(double t, std::array<double, 3>& w, int& centre) const;

  std::shared_ptr<const PeakonMainTerm> main_;
  int order_;
  PeakonCorrectionOptions opt_;
  double band_;
  mutable std::mutex mu_;
  mutable std::map<double, std::shared_ptr<const PiecewiseCorrection>> cache_;
};

std::shared_ptr<OnePhasePeakon> assemble_peakon(const ModelFile& mf, int order,
                                                PeakonCorrectionOptions opt = {});

// u = c exp(-|x - c t|/eps), an exact off-crest solution for a = 1, b = 3.
class ClassicalPeakon : public CandidateSolution {
 public:
  explicit ClassicalPeakon(double c, Interval window = {0, 1}, double band = 1e-3);
  const CoefficientModel& model() const override { return m_; }
  double value(double x, double t, double eps) const override;
  Jet jet(double x, double t, double eps) const override;
  std::vector<Interval> excluded(double t, double eps) const override;
  std::vector<double> centers(double t) const override { return {c_ * t}; }
  double decay_rate(double) const override { return 1.0; }
  Interval time_window() const override { return window_; }
  std::string kind() const override { return "peakon1"; }
  int order() const override { return 0; }

 private:
  double c_;
  Interval window_;
  double band_;
  CoefficientModel m_;
};

}  // namespace vcch
