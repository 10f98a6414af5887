#pragma once

#include <stdexcept>
#include <string>

namespace vcch {

// Bad model input: malformed file, coefficients violating positivity.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The asymptotic construction could not be carried out (solvability failure,
// empty window, numerical breakdown, crossing characteristics, ...).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A derivative was requested inside an excluded band (peakon crest).
class BandViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vcch
