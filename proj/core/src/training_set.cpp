#include "gpsl/training_set.hpp"

#include <cmath>
#include <stdexcept>

namespace gpsl {

void TrainingSet::append(const Eigen::VectorXd& theta, double value, double noise) {
  if (theta.size() != dim())
    throw std::invalid_argument("TrainingSet::append: point dimension mismatch");
  const int t = size();
  locations.conservativeResize(t + 1, Eigen::NoChange);
  locations.row(t) = theta.transpose();
  values.conservativeResize(t + 1);
  values[t] = value;
  noise_std.conservativeResize(t + 1);
  noise_std[t] = noise;
}

void TrainingSet::validate() const {
  if (locations.rows() != values.size() || values.size() != noise_std.size())
    throw std::invalid_argument("TrainingSet: row count mismatch");
  if (!locations.allFinite() || !values.allFinite())
    throw std::invalid_argument("TrainingSet: non-finite entries");
  for (int i = 0; i < noise_std.size(); ++i)
    if (!(noise_std[i] >= 0.0) || !std::isfinite(noise_std[i]))
      throw std::invalid_argument("TrainingSet: noise_std must be finite and >= 0");
}

}  // namespace gpsl
