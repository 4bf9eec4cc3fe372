#include "gpsl/lookahead.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "gpsl/errors.hpp"

namespace gpsl {

namespace {

Eigen::VectorXd floored(const Eigen::VectorXd& noise) {
  return noise.cwiseMax(kNoiseFloor);
}

// chol of the pending system C + diag(noise^2), with the same relative jitter
// ladder as model building
Eigen::MatrixXd pending_chol(const GpModel& model, const Eigen::MatrixXd& C,
                             const Eigen::VectorXd& noise) {
  Eigen::MatrixXd S = C;
  const Eigen::VectorXd sn = floored(noise);
  S.diagonal() += sn.cwiseProduct(sn);
  static const double ladder[] = {0.0, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4};
  for (double lam : ladder) {
    Eigen::MatrixXd Sj = S;
    Sj.diagonal().array() += lam * model.hyper().signal_var;
    Eigen::LLT<Eigen::MatrixXd> llt(Sj);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw NumericalError("pending batch system not positive definite (near-duplicate batch points?)");
}

}  // namespace

Batch Batch::empty(int dim) {
  Batch b;
  b.points.resize(0, dim);
  b.noise_std.resize(0);
  return b;
}

void Batch::append(const Eigen::VectorXd& x, double noise) {
  if (x.size() != points.cols())
    throw std::invalid_argument("Batch::append: dimension mismatch");
  const int b = size();
  points.conservativeResize(b + 1, Eigen::NoChange);
  points.row(b) = x.transpose();
  noise_std.conservativeResize(b + 1);
  noise_std[b] = noise;
}

double variance_reduction(const GpModel& model, const Eigen::VectorXd& theta,
                          const Batch& batch) {
  if (batch.size() == 0) return 0.0;
  const Eigen::MatrixXd C = model.cross_cov(batch.points, batch.points);
  const Eigen::MatrixXd L = pending_chol(model, C, batch.noise_std);
  const Eigen::VectorXd c = model.cross_cov(batch.points, theta.transpose()).col(0);
  return L.triangularView<Eigen::Lower>().solve(c).squaredNorm();
}

double lookahead_variance(const GpModel& model, const Eigen::VectorXd& theta,
                          const Batch& batch) {
  return std::max(0.0, model.var_at(theta) - variance_reduction(model, theta, batch));
}

double interaction_term(const GpModel& model, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                        double noise1, double noise2) {
  Eigen::MatrixXd pts(3, theta.size());
  pts.row(0) = theta.transpose();
  pts.row(1) = p1.transpose();
  pts.row(2) = p2.transpose();
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  model.predict(pts, mean, cov);
  const double a = cov(0, 1), b = cov(0, 2), rho = cov(1, 2);
  const double n1 = std::max(noise1, kNoiseFloor), n2 = std::max(noise2, kNoiseFloor);
  const double A = cov(1, 1) + n1 * n1;
  const double B = cov(2, 2) + n2 * n2;
  const double det = A * B - rho * rho;
  return rho * rho * (a * a * B + b * b * A) / (A * B * det) - 2.0 * a * b * rho / det;
}

double extend_reduction(const GpModel& model, const Eigen::VectorXd& theta,
                        const Batch& base, const Eigen::VectorXd& extra,
                        double extra_noise) {
  LookaheadEvaluator ev(model, theta.transpose());
  for (int j = 0; j < base.size(); ++j)
    ev.push_pending(base.points.row(j).transpose(), base.noise_std[j]);
  Eigen::VectorXd out;
  ev.candidate_tau2(extra, extra_noise, out);
  return out[0];
}

struct LookaheadEvaluator::CandidateFactors {
  GpModel::Factors f;
  Eigen::VectorXd var;            // s^2 at candidates
  Eigen::MatrixXd cross_eval;     // c(eval, x), s x k
  Eigen::MatrixXd cross_pending;  // c(pending, x), p x k
};

LookaheadEvaluator::LookaheadEvaluator(const GpModel& model, Eigen::MatrixXd eval_points)
    : model_(&model), pts_(std::move(eval_points)) {
  f_ = model_->factors(pts_);
  mean_ = model_->mean_from(f_);
  var_ = model_->var_from(f_);
  reset_pending();
}

void LookaheadEvaluator::reset_pending() {
  const int s = static_cast<int>(pts_.rows());
  P_.resize(0, pts_.cols());
  Pv_.resize(f_.v.rows(), 0);
  Pe_.resize(f_.e.rows(), 0);
  p_sbar2_.resize(0);
  La_.resize(0, 0);
  Z_.resize(0, s);
  tau2_ = Eigen::VectorXd::Zero(s);
}

void LookaheadEvaluator::factor_candidates(const Eigen::MatrixXd& X,
                                           CandidateFactors& cf) const {
  cf.f = model_->factors(X);
  cf.var = model_->var_from(cf.f);
  cf.cross_eval = se_covariance(model_->hyper(), pts_, X);
  cf.cross_eval.noalias() -= f_.v.transpose() * cf.f.v;
  cf.cross_eval.noalias() += f_.e.transpose() * cf.f.e;
  cf.cross_pending = se_covariance(model_->hyper(), P_, X);
  cf.cross_pending.noalias() -= Pv_.transpose() * cf.f.v;
  cf.cross_pending.noalias() += Pe_.transpose() * cf.f.e;
}

void LookaheadEvaluator::push_pending(const Eigen::VectorXd& x, double noise_std) {
  CandidateFactors cf;
  factor_candidates(x.transpose(), cf);

  const double sn = std::max(noise_std, kNoiseFloor);
  const double sbar2 = cf.var[0] + sn * sn;
  const int p = pending_size();
  const int s = static_cast<int>(pts_.rows());

  const Eigen::VectorXd w = La_.triangularView<Eigen::Lower>().solve(cf.cross_pending.col(0));
  double diag2 = sbar2 - w.squaredNorm();
  const double tiny = 1e-12 * (model_->hyper().signal_var + sn * sn);
  if (diag2 < tiny) diag2 = tiny;  // candidate nearly determined by current pending set
  const double diag = std::sqrt(diag2);

  Eigen::VectorXd zrow = cf.cross_eval.col(0);
  zrow.noalias() -= Z_.transpose() * w;
  zrow /= diag;

  // append to the cached Cholesky and the solved cross block
  La_.conservativeResize(p + 1, p + 1);
  if (p > 0) {
    La_.row(p).head(p) = w.transpose();
    La_.col(p).head(p).setZero();
  }
  La_(p, p) = diag;
  Z_.conservativeResize(p + 1, s);
  Z_.row(p) = zrow.transpose();
  tau2_ += zrow.cwiseProduct(zrow);

  P_.conservativeResize(p + 1, Eigen::NoChange);
  P_.row(p) = x.transpose();
  Pv_.conservativeResize(Eigen::NoChange, p + 1);
  Pv_.col(p) = cf.f.v.col(0);
  Pe_.conservativeResize(Eigen::NoChange, p + 1);
  Pe_.col(p) = cf.f.e.col(0);
  p_sbar2_.conservativeResize(p + 1);
  p_sbar2_[p] = sbar2;
}

void LookaheadEvaluator::candidate_tau2(const Eigen::VectorXd& x, double noise_std,
                                        Eigen::VectorXd& out) const {
  Eigen::MatrixXd block;
  candidate_tau2_block(x.transpose(), noise_std, block);
  out = block.col(0);
}

void LookaheadEvaluator::candidate_tau2_block(const Eigen::MatrixXd& X, double noise_std,
                                              Eigen::MatrixXd& out) const {
  CandidateFactors cf;
  factor_candidates(X, cf);
  const int k = static_cast<int>(X.rows());
  const int s = static_cast<int>(pts_.rows());
  const double sn = std::max(noise_std, kNoiseFloor);
  const double tiny = 1e-12 * (model_->hyper().signal_var + sn * sn);

  const Eigen::MatrixXd W = La_.triangularView<Eigen::Lower>().solve(cf.cross_pending);
  Eigen::MatrixXd cross = cf.cross_eval;
  cross.noalias() -= Z_.transpose() * W;

  out.resize(s, k);
  for (int j = 0; j < k; ++j) {
    const double den = cf.var[j] + sn * sn - W.col(j).squaredNorm();
    if (den < tiny) {
      out.col(j) = tau2_;  // redundant candidate adds nothing
    } else {
      out.col(j) = tau2_ + cross.col(j).cwiseAbs2() / den;
    }
  }
}

void LookaheadEvaluator::candidate_self(const Eigen::VectorXd& x, double& mean_x,
                                        double& var_x, double& tau2_x) const {
  Eigen::VectorXd m, v, t2;
  candidate_self_block(x.transpose(), m, v, t2);
  mean_x = m[0];
  var_x = v[0];
  tau2_x = t2[0];
}

void LookaheadEvaluator::candidate_self_block(const Eigen::MatrixXd& X,
                                              Eigen::VectorXd& mean, Eigen::VectorXd& var,
                                              Eigen::VectorXd& tau2) const {
  CandidateFactors cf;
  factor_candidates(X, cf);
  mean = model_->mean_from(cf.f);
  var = cf.var;
  const Eigen::MatrixXd W = La_.triangularView<Eigen::Lower>().solve(cf.cross_pending);
  tau2 = W.colwise().squaredNorm().transpose();
}

}  // namespace gpsl
