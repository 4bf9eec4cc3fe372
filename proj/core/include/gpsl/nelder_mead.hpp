#pragma once

#include <Eigen/Core>
#include <functional>

#include "gpsl/box.hpp"

namespace gpsl {

// Derivative-free simplex minimizer with box constraints enforced by
// projection. Deterministic for a given start. Zero-width box dimensions are
// held fixed at their bound value.
struct NelderMeadOptions {
  int max_evals = 200;
  double initial_step = 0.10;  // relative to the box side per dimension
  double ftol = 1e-10;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value;
  int evals = 0;
};

NelderMeadResult nelder_mead_box(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Box& box, const Eigen::VectorXd& x0,
                                 const NelderMeadOptions& opts = {});

}  // namespace gpsl
