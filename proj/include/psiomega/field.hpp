#pragma once

#include <vector>

namespace psiomega {

/// Nodal coefficients of a continuous piecewise-linear function on one
/// hierarchy level.
struct ScalarField {
  int level = 0;
  std::vector<double> values;
};

}  // namespace psiomega
