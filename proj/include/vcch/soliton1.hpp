#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "vcch/candidate.hpp"
#include "vcch/model.hpp"

namespace vcch {

// Profile data of the main soliton term on x = phi(t).
struct SolitonProfileParams {
  double t = 0, phi = 0, dphi = 0, a0 = 0, b0 = 0, u0 = 0;
  double D = 0;         // a0 phi' - b0 u0
  double amp = 0;       // 3 D / b0, crest height
  double ratio = 0;     // 3 D / (b0 phi'), in (0, 1)
  double theta0 = 0;    // atanh(sqrt(ratio))
  double stretch = 0;   // 2 sqrt(phi' / D)
  double log_coef = 0;  // sqrt(3 / b0)
  double decay = 0;     // sqrt(D / phi')
};

// Throws ModelError unless 0 < ratio < 1 and b0 > 0.
SolitonProfileParams make_soliton_params(double t, double phi, double dphi, double a0, double b0,
                                         double u0);
SolitonProfileParams soliton_params(const CoefficientModel& m, const RegularPart& r,
                                    const PhaseFunction& p, double t);

double theta_to_tau(const SolitonProfileParams& p, double theta);
double dtau_dtheta(const SolitonProfileParams& p, double theta);
// hint: starting guess for theta (NaN picks the asymptotic guess)
double tau_to_theta(const SolitonProfileParams& p, double tau, double tol = 1e-13,
                    double hint = NAN);

struct ProfileJet {
  double theta = 0, v = 0, d1 = 0, d2 = 0, d3 = 0;
};
ProfileJet eval_v0(const SolitonProfileParams& p, double tau, double hint = NAN);

// H = b0 v^3 - 3 (v - phi') y^2 - 3 D v^2, vanishing on the profile orbit.
double first_integral(const SolitonProfileParams& p, double v, double y);

class SolitonMainTerm {
 public:
  SolitonMainTerm(CoefficientModel m, RegularPart r, PhaseFunction p, Interval window);

  SolitonProfileParams params(double t) const;
  ProfileJet jet(double t, double tau, double hint = NAN) const;
  TimeStencil stencil(double t) const;

  struct TimeJet {
    ProfileJet at;
    double vt = 0, vtau2t = 0;
  };
  TimeJet time_jet(double t, double tau, double hint = NAN) const;

  const CoefficientModel& model() const { return m_; }
  const RegularPart& regular() const { return r_; }
  const PhaseFunction& phase() const { return p_; }
  const Interval& window() const { return window_; }

 private:
  CoefficientModel m_;
  RegularPart r_;
  PhaseFunction p_;
  Interval window_;
};

// Coefficient values on x = phi(t) entering F1.
struct F1Coefficients {
  double dphi = 0, a0 = 0, a0x = 0, a1 = 0, b0 = 0, b0x = 0, b1 = 0, u0 = 0, u0x = 0, u1 = 0;
};
F1Coefficients f1_coefficients(const SolitonMainTerm& main, double t);
double F1_value(const F1Coefficients& c, double tau, const SolitonMainTerm::TimeJet& j);

GridFunction compute_F1(const SolitonMainTerm& main, double t, const std::vector<double>& tau_grid);

struct OrthogonalityReport {
  double defect_v0 = 0;    // |int F v0| / int |F v0|
  double defect_v0t = 0;   // |int Phi v0_tau| / int |Phi v0_tau|
};
OrthogonalityReport check_orthogonality(const GridFunction& F, const SolitonMainTerm& main, double t);

struct PhiResult {
  GridFunction Phi;  // slopes hold F
  double left_limit = 0;
};
PhiResult compute_Phi(const GridFunction& F);

// eta = (1 - tanh(tau/2))/2 and its first three derivatives
std::array<double, 4> switch_eta(double tau);

struct CorrectionJet {
  double v = 0, d1 = 0, d2 = 0, d3 = 0;
};

// v = nu eta + psi with psi decaying on both sides.
struct CorrectionTerm {
  double t = 0, nu = 0, half_width = 0, multiplier = 0, condition = 0;
  SolitonProfileParams params;
  OrthogonalityReport orthogonality;
  QuinticGrid psi;                            // coarse grid
  GridFunction Phi;                           // fine grid, slopes = F

  // F is the source value at tau; only the third derivative depends on it.
  CorrectionJet eval(double tau, const ProfileJet& v0, double F = 0.0) const;
};

struct CorrectionOptions {
  double half_width_factor = 40.0;  // L = factor / decay
  double h = 0.04;                  // coarse step; Richardson uses h, h/2, h/4
  double orthogonality_tol = 1e-6;
};

// Source defaults to F1 of the model.
CorrectionTerm solve_correction(const SolitonMainTerm& main, double t,
                                const CorrectionOptions& opt = {},
                                const std::function<double(double)>& source = {});

// Limit of Phi_1 at tau -> -infinity.
double correction_left_limit(const SolitonMainTerm& main, double t);

std::shared_ptr<ExtensionField> extend_correction(const SolitonMainTerm& main,
                                                  std::function<double(double)> nu);

class OnePhaseSoliton : public CandidateSolution {
 public:
  OnePhaseSoliton(std::shared_ptr<const SolitonMainTerm> main, int order,
                  CorrectionOptions opt = {});

  const CoefficientModel& model() const override { return main_->model(); }
  double value(double x, double t, double eps) const override;
  Jet jet(double x, double t, double eps) const override;
  std::vector<double> centers(double t) const override { return {main_->phase().phi(t)}; }
  double decay_rate(double t) const override { return main_->params(t).decay; }
  Interval time_window() const override { return main_->window(); }
  std::string kind() const override { return "soliton1"; }
  int order() const override { return order_; }

  const SolitonMainTerm& main() const { return *main_; }
  // correction at t (cached); requires order 1
  std::shared_ptr<const CorrectionTerm> correction(double t) const;
  SingularJet singular0(double t, double tau) const;
  SingularJet singular1(double t, double tau) const;
  bool has_left_limit() const { return extension_ != nullptr; }

 private:
  struct Slice {
    TimeStencil st;
    F1Coefficients coef;
    std::array<std::shared_ptr<const CorrectionTerm>, 3> corr;
  };
  std::shared_ptr<const Slice> slice(double t) const;

  std::shared_ptr<const SolitonMainTerm> main_;
  int order_;
  CorrectionOptions opt_;
  std::shared_ptr<ExtensionField> extension_;
  mutable std::mutex mu_;
  mutable std::map<double, std::shared_ptr<const CorrectionTerm>> corr_cache_;
  mutable std::map<double, std::shared_ptr<const Slice>> slice_cache_;
};

// Builds main term (and correction for order 1) from a model file.
std::shared_ptr<OnePhaseSoliton> assemble_one_phase(const ModelFile& mf, int order,
                                                    CorrectionOptions opt = {});

}  // namespace vcch
