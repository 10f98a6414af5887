#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vcch/candidate.hpp"
#include "vcch/soliton2.hpp"

namespace vcch {

struct ExampleSpec {
  int id = 0;
  std::string title;
  std::string kind;  // soliton1, soliton2, peakon1, peakon2
  int order = 0;     // order of the figures and the default residual scan
  std::string model_text;
  double eps = 0.1;  // eps of the figures
};

// Examples 1 to 4; throws ModelError for any other id.
const ExampleSpec& example_spec(int id);

// kind inferred from the phase section: peakon-ode -> peakon1, one explicit
// phase -> soliton1, two phases -> peakon2 when u0 = 0 and soliton2 otherwise.
std::string infer_kind(const ModelFile& mf);

// Throws ModelError for an unknown kind or an order the kind does not support.
std::shared_ptr<CandidateSolution> assemble_candidate(const ModelFile& mf, const std::string& kind, int order,
                                                      TwoPhaseForm form = TwoPhaseForm::Printed);

struct ReferenceCheck {
  std::string name;
  double value = 0, reference = 0, tolerance = 0;
  bool ok() const;
};

// Reference values asserted for an example.
std::vector<ReferenceCheck> example_checks(int id);

// Worst relative disagreement between symbolic derivatives (up to third
// order, including the mixed t x x derivative) and central differences of the
// next lower symbolic derivative, over n random points of the rectangle.
double derivative_check(const Expression& e, const Rect& rect, int n, unsigned seed);

// All expressions appearing in a model file.
std::vector<Expression> model_expressions(const ModelFile& mf);

// Surface samples u(x, t) on a tensor grid, [it][ix].
struct Surface {
  std::vector<double> xs, ts;
  std::vector<std::vector<double>> u;
};
Surface sample_surface(const CandidateSolution& c, const Rect& rect, std::size_t nx, std::size_t nt, double eps);
std::string surface_csv(const Surface& s);
// line plot of up to `count` evenly spaced time rows
std::string surface_snapshots_svg(const Surface& s, const std::string& title, std::size_t count = 5);

struct ExampleRun {
  std::vector<ReferenceCheck> checks;
  std::vector<std::string> files;
};
// Checks the references and writes the model file and figures of the example into dir.
ExampleRun run_example(int id, const std::string& dir);

}  // namespace vcch
