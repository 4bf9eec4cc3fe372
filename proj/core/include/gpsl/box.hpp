#pragma once

#include <Eigen/Core>

#include "gpsl/math.hpp"

namespace gpsl {

// Axis-aligned hyperrectangle; every parameter space in this library is one.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd up);
  static Box cube(double lo, double up, int dim);

  int dim() const { return static_cast<int>(lower.size()); }
  double side(int i) const { return upper[i] - lower[i]; }
  Eigen::VectorXd sides() const { return upper - lower; }
  Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
  double volume() const;
  double log_volume() const;

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Eigen::VectorXd sample(Rng& rng) const;
  // n independent uniform draws, rows are points
  Eigen::MatrixXd sample_n(Rng& rng, int n) const;
  // stratified latin hypercube draws, rows are points
  Eigen::MatrixXd latin_hypercube(Rng& rng, int n) const;
};

}  // namespace gpsl
