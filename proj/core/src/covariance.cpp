#include "gpsl/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace gpsl {

void GpHyperparams::validate(int dim) const {
  if (!(signal_var > 0.0) || !std::isfinite(signal_var))
    throw std::invalid_argument("GpHyperparams: signal_var must be positive and finite");
  if (lengthscales.size() != dim)
    throw std::invalid_argument("GpHyperparams: lengthscale count != input dimension");
  for (int i = 0; i < lengthscales.size(); ++i)
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i]))
      throw std::invalid_argument("GpHyperparams: lengthscales must be positive and finite");
}

Eigen::MatrixXd se_covariance(const GpHyperparams& hyper, const Eigen::MatrixXd& A,
                              const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols() || A.cols() != hyper.lengthscales.size())
    throw std::invalid_argument("se_covariance: dimension mismatch");
  const Eigen::VectorXd inv_l = hyper.lengthscales.cwiseInverse();
  const Eigen::MatrixXd As = A * inv_l.asDiagonal();
  const Eigen::MatrixXd Bs = B * inv_l.asDiagonal();
  // squared distances via the usual |a|^2 + |b|^2 - 2 a.b expansion
  Eigen::MatrixXd D = -2.0 * As * Bs.transpose();
  D.colwise() += As.rowwise().squaredNorm();
  D.rowwise() += Bs.rowwise().squaredNorm().transpose();
  return hyper.signal_var * (-0.5 * D.cwiseMax(0.0)).array().exp().matrix();
}

}  // namespace gpsl
