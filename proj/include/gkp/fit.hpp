#pragma once

// Levenberg-Marquardt fit of y = a + b·exp(−γ·t).

#include <vector>

#include "gkp/common.hpp"

namespace gkp {

struct FitResult {
  double a = 0, b = 0, gamma = 0;
  double da = 0, db = 0, dgamma = 0;  // standard errors from the covariance
  double residual_norm = 0;
  bool converged = false;
  bool gamma_indeterminate = false;
};

// fix_a_zero pins the baseline at zero. Requires at least 4 points.
FitResult fit_exp_decay(const std::vector<double>& t, const std::vector<double>& y,
                        bool fix_a_zero = false);

}  // namespace gkp
