#pragma once

#include <string>
#include <vector>

#include "scale.hpp"

namespace dualdiv {

struct CheckRow {
  std::string name;
  double value = 0.0;     // measured quantity (error, margin, ...)
  double tolerance = 0.0;
  bool pass = false;
};

// Root residuals, boundary values at zero, the Laplace identity, monotonicity
// and log-concavity of W, conjugate symmetry and the two drift formulas.
std::vector<CheckRow> run_checks(const ScaleBasis& basis);

}  // namespace dualdiv
