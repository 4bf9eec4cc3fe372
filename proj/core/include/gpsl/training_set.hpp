#pragma once

#include <Eigen/Core>

namespace gpsl {

// Noisy log-likelihood evaluations: locations (t x d, rows are points),
// observed values and their reported noise standard deviations.
struct TrainingSet {
  Eigen::MatrixXd locations;
  Eigen::VectorXd values;
  Eigen::VectorXd noise_std;

  TrainingSet() = default;
  explicit TrainingSet(int dim) : locations(0, dim), values(0), noise_std(0) {}

  int size() const { return static_cast<int>(values.size()); }
  int dim() const { return static_cast<int>(locations.cols()); }

  void append(const Eigen::VectorXd& theta, double value, double noise);
  void validate() const;  // shape/finiteness checks, throws std::invalid_argument
};

}  // namespace gpsl
