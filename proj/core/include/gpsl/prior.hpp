#pragma once

#include <Eigen/Core>
#include <functional>

#include "gpsl/box.hpp"

namespace gpsl {

// Prior over the parameter box. log_pdf is -inf outside the box; inside it
// delegates to the density function (a constant -log(volume) for uniforms).
class LogPrior {
 public:
  LogPrior() = default;
  LogPrior(Box box, std::function<double(const Eigen::VectorXd&)> interior_logpdf);

  static LogPrior uniform(Box box);

  const Box& box() const { return box_; }
  int dim() const { return box_.dim(); }
  double log_pdf(const Eigen::Ref<const Eigen::VectorXd>& theta) const;

  bool can_sample() const { return uniform_; }
  Eigen::VectorXd sample(Rng& rng) const;

 private:
  Box box_;
  std::function<double(const Eigen::VectorXd&)> interior_;
  bool uniform_ = false;
};

}  // namespace gpsl
