#include "gpsl/gp_model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gpsl/errors.hpp"

namespace gpsl {

BasisConfig BasisConfig::quadratic(int dim, double coef_sd) {
  BasisConfig b;
  const int q = 1 + 2 * dim;
  b.coef_mean = Eigen::VectorXd::Zero(q);
  b.coef_var = Eigen::VectorXd::Constant(q, coef_sd * coef_sd);
  return b;
}

void BasisConfig::validate(int dim) const {
  if (coef_mean.size() != coef_var.size())
    throw std::invalid_argument("BasisConfig: mean/var size mismatch");
  if (count() != 1 + 2 * dim)
    throw std::invalid_argument("BasisConfig: expected 1 + 2*dim coefficients");
  for (int i = 0; i < coef_var.size(); ++i)
    if (!(coef_var[i] > 0.0))
      throw std::invalid_argument("BasisConfig: coefficient variances must be positive");
}

Eigen::MatrixXd BasisConfig::rows(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  Eigen::MatrixXd H(n, 1 + 2 * d);
  H.col(0).setOnes();
  H.middleCols(1, d) = X;
  H.middleCols(1 + d, d) = X.cwiseProduct(X);
  return H;
}

namespace {

std::string nearest_pair_message(const Eigen::MatrixXd& X) {
  double best = std::numeric_limits<double>::infinity();
  int bi = -1, bj = -1;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = i + 1; j < X.rows(); ++j) {
      const double d = (X.row(i) - X.row(j)).norm();
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  std::ostringstream oss;
  oss << "kernel matrix not positive definite after jitter ladder";
  if (bi >= 0)
    oss << "; nearest training rows " << bi << " and " << bj << " at distance " << best
        << " (" << format_point(X.row(bi).transpose()) << " vs "
        << format_point(X.row(bj).transpose()) << ")";
  return oss.str();
}

}  // namespace

GpModel::GpModel(TrainingSet train, GpHyperparams hyper, BasisConfig basis)
    : train_(std::move(train)), hyper_(std::move(hyper)), basis_(std::move(basis)) {
  train_.validate();
  hyper_.validate(train_.dim());
  basis_.validate(train_.dim());

  const int t = train_.size();
  const int q = basis_.count();

  Eigen::MatrixXd K = se_covariance(hyper_, train_.locations, train_.locations);
  const Eigen::VectorXd sn = train_.noise_std.cwiseMax(kNoiseFloor);
  K.diagonal() += sn.cwiseProduct(sn);

  static const double ladder[] = {0.0, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4};
  bool ok = false;
  for (double lam : ladder) {
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += lam * hyper_.signal_var;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) {
      L_ = llt.matrixL();
      jitter_ = lam;
      ok = true;
      break;
    }
  }
  if (!ok && t > 0) throw NumericalError(nearest_pair_message(train_.locations));
  if (t == 0) L_.resize(0, 0);

  const Eigen::MatrixXd H = BasisConfig::rows(train_.locations);
  Ah_ = L_.triangularView<Eigen::Lower>().solve(H);
  ytil_ = L_.triangularView<Eigen::Lower>().solve(train_.values);

  Eigen::MatrixXd W = Ah_.transpose() * Ah_;
  W.diagonal() += basis_.coef_var.cwiseInverse();
  Eigen::LLT<Eigen::MatrixXd> lltw(W);
  if (lltw.info() != Eigen::Success)
    throw NumericalError("basis coefficient system not positive definite");
  Lw_ = lltw.matrixL();

  const Eigen::VectorXd rhs =
      Ah_.transpose() * ytil_ + basis_.coef_mean.cwiseQuotient(basis_.coef_var);
  const Eigen::VectorXd gamma = lltw.solve(rhs);
  gtil_ = Lw_.transpose() * gamma;
  (void)q;
}

GpModel::Factors GpModel::factors(const Eigen::MatrixXd& Q) const {
  if (Q.cols() != dim()) throw std::invalid_argument("GpModel: query dimension mismatch");
  Factors f;
  const Eigen::MatrixXd Kq = se_covariance(hyper_, train_.locations, Q);
  f.v = L_.triangularView<Eigen::Lower>().solve(Kq);
  Eigen::MatrixXd R = BasisConfig::rows(Q).transpose() - Ah_.transpose() * f.v;
  f.e = Lw_.triangularView<Eigen::Lower>().solve(R);
  return f;
}

Eigen::VectorXd GpModel::mean_from(const Factors& f) const {
  return f.v.transpose() * ytil_ + f.e.transpose() * gtil_;
}

Eigen::VectorXd GpModel::var_from(const Factors& f) const {
  Eigen::VectorXd var = Eigen::VectorXd::Constant(f.v.cols(), hyper_.signal_var);
  var -= f.v.colwise().squaredNorm().transpose();
  var += f.e.colwise().squaredNorm().transpose();
  return var.cwiseMax(0.0);
}

Eigen::MatrixXd GpModel::cross_from(const Factors& fa, const Eigen::MatrixXd& A,
                                    const Factors& fb, const Eigen::MatrixXd& B) const {
  return se_covariance(hyper_, A, B) - fa.v.transpose() * fb.v +
         fa.e.transpose() * fb.e;
}

void GpModel::predict(const Eigen::MatrixXd& Q, Eigen::VectorXd& mean,
                      Eigen::MatrixXd& cov) const {
  const Factors f = factors(Q);
  mean = mean_from(f);
  cov = cross_from(f, Q, f, Q);
  cov = 0.5 * (cov + cov.transpose()).eval();
  cov.diagonal() = cov.diagonal().cwiseMax(0.0);
}

void GpModel::predict_marginal(const Eigen::MatrixXd& Q, Eigen::VectorXd& mean,
                               Eigen::VectorXd& var) const {
  const Factors f = factors(Q);
  mean = mean_from(f);
  var = var_from(f);
}

Eigen::MatrixXd GpModel::cross_cov(const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B) const {
  return cross_from(factors(A), A, factors(B), B);
}

double GpModel::mean_at(const Eigen::VectorXd& x) const {
  return mean_from(factors(x.transpose()))[0];
}

double GpModel::var_at(const Eigen::VectorXd& x) const {
  return var_from(factors(x.transpose()))[0];
}

}  // namespace gpsl
