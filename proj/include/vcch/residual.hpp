#pragma once

#include <string>
#include <vector>

#include "vcch/candidate.hpp"

namespace vcch {

// The scan could not produce any admissible point.
class ScanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// R = transport - eps^2 dispersive with
// transport = a u_t + b u u_x, dispersive = u_txx + 2 u_x u_xx + u u_xxx.
struct ResidualTerms {
  double a = 0, b = 0, transport = 0, dispersive = 0, eps = 0;
  double value() const { return transport - eps * eps * dispersive; }
};

ResidualTerms residual_terms(const CoefficientModel& m, const Jet& j, double x, double t, double eps);
double residual_from_jet(const CoefficientModel& m, const Jet& j, double x, double t, double eps);

// Pointwise residual of the candidate; throws BandViolation inside a band.
double eval_residual(const CandidateSolution& c, double x, double t, double eps);

// Largest relative disagreement between the jet and finite differences of
// value (h_x = eps 1e-3, h_t = 1e-5), over u_t, u_x, u_xx, u_xxx, u_txx.
// Relative to max(|jet component|, scale).
double jet_consistency(const CandidateSolution& c, double x, double t, double eps, double scale = 1.0);

struct ScanOptions {
  std::size_t nx = 201, nt = 21;  // uniform base grid
  double per_eps = 10;            // refined spacing eps/per_eps near the curves
  double tau_extent = 40;         // refinement reaches |tau| <= tau_extent/decay
  double target = 1;              // claimed order
  double tolerance = 0.3;         // pass iff slope >= target - tolerance
  double exact_threshold = 1e-10; // all sup norms below: order reported as +inf
  double tau_cap = 0;             // if positive, keep only points with |x - center|/eps <= tau_cap for some center
};

// Target order and tolerance matching the accuracy claim for a candidate:
// order N for one-phase constructions, boundedness (0, tolerance 0.2) for two-phase main terms,
// which are scanned within |tau_k| <= 60 of some curve.
ScanOptions default_scan_options(const CandidateSolution& c);

struct EpsNorms {
  double eps = 0, sup = 0, l2 = 0;
  std::size_t points = 0;
  double worst_x = 0, worst_t = 0;
};

struct ResidualReport {
  std::string kind;
  int order = 0;
  Rect rect{};
  std::vector<EpsNorms> norms;
  OrderFit fit{};
  double target = 0, tolerance = 0;
  bool pass = false;
  double worst_x = 0, worst_t = 0, worst_eps = 0;  // largest |R| at the smallest eps
};

// x nodes at time t: uniform base plus eps/per_eps spacing around every curve,
// with excluded bands removed.
std::vector<double> scan_nodes(const CandidateSolution& c, const Rect& rect, double t, double eps,
                               const ScanOptions& opt);

ResidualReport scan_orders(const CandidateSolution& c, const std::vector<double>& eps_list, const Rect& rect,
                           const ScanOptions& opt);

// key = value lines
std::string report_text(const ResidualReport& r);
// eps,sup_norm,l2_norm,points
std::string report_csv(const ResidualReport& r);

}  // namespace vcch
