#include "gpsl/prior.hpp"

#include <limits>
#include <stdexcept>

namespace gpsl {

LogPrior::LogPrior(Box box, std::function<double(const Eigen::VectorXd&)> interior_logpdf)
    : box_(std::move(box)), interior_(std::move(interior_logpdf)) {}

LogPrior LogPrior::uniform(Box box) {
  const double c = -box.log_volume();
  LogPrior p(std::move(box), [c](const Eigen::VectorXd&) { return c; });
  p.uniform_ = true;
  return p;
}

double LogPrior::log_pdf(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  if (!box_.contains(theta)) return -std::numeric_limits<double>::infinity();
  return interior_(theta);
}

Eigen::VectorXd LogPrior::sample(Rng& rng) const {
  if (!uniform_)
    throw std::invalid_argument("LogPrior::sample: only uniform priors are samplable");
  return box_.sample(rng);
}

}  // namespace gpsl
