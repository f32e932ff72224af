#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace psiomega {

/// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid mesh (inverted or degenerate triangle, non-conforming
/// edge, holes, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, singular matrix, non-finite data.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what,
                       double residual = std::numeric_limits<double>::quiet_NaN(),
                       int iterations = 0)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace psiomega
