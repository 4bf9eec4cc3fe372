#pragma once

#include <Eigen/Core>

namespace gpsl {

struct GpHyperparams {
  double signal_var = 1.0;              // sigma_f^2
  Eigen::VectorXd lengthscales;         // one per input dimension

  void validate(int dim) const;         // throws std::invalid_argument
};

// Squared-exponential kernel matrix between row-point sets A (m x d), B (n x d):
//   k(a, b) = signal_var * exp(-sum_i (a_i - b_i)^2 / (2 l_i^2))
Eigen::MatrixXd se_covariance(const GpHyperparams& hyper, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B);

}  // namespace gpsl
