#pragma once

#include <Eigen/Core>
#include <functional>

#include "gpsl/box.hpp"

namespace gpsl {

// Total variation distance between two (unnormalized) log-densities on a 2D
// box: both are normalized over the shared midpoint grid before differencing,
// so the result lies in [0, 1].
double tv_grid(const std::function<double(const Eigen::VectorXd&)>& logp,
               const std::function<double(const Eigen::VectorXd&)>& logq,
               const Box& box, int resolution = 100);

// Average over dimensions of the 1D histogram TV between two sample sets,
// with bins spanning the box sides. Rows are samples.
double marginal_tv(const Eigen::MatrixXd& samples_a, const Eigen::MatrixXd& samples_b,
                   const Box& box, int n_bins = 50);

}  // namespace gpsl
