#include "gpsl/design_criteria.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpsl/math.hpp"
#include "gpsl/posterior_estimators.hpp"

namespace gpsl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd prior_at(const LogPrior& prior, const Eigen::MatrixXd& X) {
  Eigen::VectorXd out(X.rows());
  for (int i = 0; i < X.rows(); ++i) out[i] = prior.log_pdf(X.row(i).transpose());
  return out;
}

// validate before touching any pointer; ctor init lists evaluate their
// arguments in unspecified order, so the check cannot live alongside a deref
LookaheadEvaluator checked_lookahead(const CriterionContext& ctx) {
  ctx.validate();
  return LookaheadEvaluator(*ctx.model,
                            is_integrated(ctx.kind)
                                ? ctx.quad->points
                                : Eigen::MatrixXd(0, ctx.model->dim()));
}
}  // namespace

void CriterionContext::validate() const {
  if (!model || !prior) throw std::invalid_argument("CriterionContext: missing model/prior");
  if (model->dim() != prior->dim())
    throw std::invalid_argument("CriterionContext: model/prior dimension mismatch");
  if (is_integrated(kind)) {
    if (!quad || quad->size() == 0)
      throw std::invalid_argument("CriterionContext: integrated criterion needs quadrature points");
    if (quad->dim() != model->dim())
      throw std::invalid_argument("CriterionContext: quadrature dimension mismatch");
  }
  if (!(iqr_u > 0.0)) throw std::invalid_argument("CriterionContext: iqr_u must be positive");
  if (!(pending_noise_std >= 0.0))
    throw std::invalid_argument("CriterionContext: pending noise must be >= 0");
}

CriterionEvaluator::CriterionEvaluator(const CriterionContext& ctx)
    : ctx_(&ctx), ev_(checked_lookahead(ctx)) {
  if (!is_integrated(ctx.kind)) return;

  const Eigen::VectorXd logpi = prior_at(*ctx.prior, ctx.quad->points);
  const Eigen::VectorXd& m = ev_.mean();
  const Eigen::VectorXd& v = ev_.var();
  if (ctx.kind == CriterionKind::Eiv) {
    // log w + 2 log pi + 2 m + 2 s^2; the batch contributes log(1 - e^{tau^2 - s^2})
    base_ = ctx.quad->log_weight + 2.0 * logpi + 2.0 * m + 2.0 * v;
  } else {
    // log w + log pi + m; the batch contributes log(2 sinh(u * s_lookahead))
    base_ = ctx.quad->log_weight + logpi + m;
  }
  empty_loss_ = integrated_from_tau2(Eigen::VectorXd::Zero(ctx.quad->size()));
}

double CriterionEvaluator::integrated_from_tau2(const Eigen::VectorXd& tau2) const {
  const Eigen::VectorXd& v = ev_.var();
  Eigen::VectorXd term(base_.size());
  if (ctx_->kind == CriterionKind::Eiv) {
    for (int i = 0; i < term.size(); ++i) {
      const double gap = tau2[i] - v[i];
      term[i] = (gap < 0.0 && base_[i] > -kInf) ? base_[i] + log1m_exp(gap) : -kInf;
    }
  } else {
    for (int i = 0; i < term.size(); ++i) {
      const double la = v[i] - tau2[i];
      const double s_la = la > 0.0 ? std::sqrt(la) : 0.0;
      term[i] = (base_[i] > -kInf && s_la > 0.0)
                    ? base_[i] + log_2sinh(ctx_->iqr_u * s_la)
                    : -kInf;
    }
  }
  return ctx_->quad->log_volume + log_sum_exp(term);
}

void CriterionEvaluator::push_pending(const Eigen::VectorXd& x) {
  push_pending(x, ctx_->pending_noise_std);
}

void CriterionEvaluator::push_pending(const Eigen::VectorXd& x, double noise_std) {
  ev_.push_pending(x, noise_std);
}

double CriterionEvaluator::pending_loss() const {
  if (!is_integrated(ctx_->kind))
    throw std::invalid_argument("pending_loss: defined for integrated criteria only");
  return integrated_from_tau2(ev_.pending_tau2());
}

double CriterionEvaluator::candidate_value(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out;
  candidate_value_block(x.transpose(), out);
  return out[0];
}

void CriterionEvaluator::candidate_value_block(const Eigen::MatrixXd& X,
                                               Eigen::VectorXd& out) const {
  const int k = static_cast<int>(X.rows());
  out.resize(k);
  if (is_integrated(ctx_->kind)) {
    Eigen::MatrixXd tau2;
    ev_.candidate_tau2_block(X, ctx_->pending_noise_std, tau2);
    for (int j = 0; j < k; ++j) out[j] = integrated_from_tau2(tau2.col(j));
    return;
  }

  // pointwise criteria: minimize the negated greedy objective
  Eigen::VectorXd m, v, tau2;
  ev_.candidate_self_block(X, m, v, tau2);
  for (int j = 0; j < k; ++j) {
    const double logpi = ctx_->prior->log_pdf(X.row(j).transpose());
    if (logpi == -kInf) {
      out[j] = kInf;
      continue;
    }
    double obj;
    if (ctx_->kind == CriterionKind::Maxiqr) {
      const double la = std::max(v[j] - tau2[j], 0.0);
      const double s_la = std::sqrt(la);
      obj = s_la > 0.0 ? logpi + m[j] + log_2sinh(ctx_->iqr_u * s_la) : -kInf;
    } else {
      const double gap = tau2[j] - v[j];
      obj = gap < 0.0 ? 2.0 * logpi + 2.0 * m[j] + 2.0 * v[j] + log1m_exp(gap) : -kInf;
    }
    out[j] = -obj;
  }
}

namespace {
double batch_loss(const CriterionContext& ctx, const Batch& batch) {
  ctx.validate();
  if (batch.size() > 0 && batch.dim() != ctx.model->dim())
    throw std::invalid_argument("batch dimension mismatch");
  CriterionEvaluator ev(ctx);
  for (int i = 0; i < batch.size(); ++i)
    ev.push_pending(batch.points.row(i).transpose(), batch.noise_std[i]);
  return ev.pending_loss();
}
}  // namespace

double eiv_loss(const CriterionContext& ctx, const Batch& batch) {
  if (ctx.kind != CriterionKind::Eiv)
    throw std::invalid_argument("eiv_loss: context kind must be eiv");
  return batch_loss(ctx, batch);
}

double imiqr_loss(const CriterionContext& ctx, const Batch& batch) {
  if (ctx.kind != CriterionKind::Imiqr)
    throw std::invalid_argument("imiqr_loss: context kind must be imiqr");
  return batch_loss(ctx, batch);
}

double maxv_objective(const CriterionContext& ctx, const Eigen::VectorXd& theta) {
  const double logpi = ctx.prior->log_pdf(theta);
  if (logpi == -kInf) return -kInf;
  const double m = ctx.model->mean_at(theta);
  const double s = std::sqrt(ctx.model->var_at(theta));
  return log_unnorm_variance(logpi, m, s);
}

double maxiqr_objective(const CriterionContext& ctx, const Eigen::VectorXd& theta) {
  const double logpi = ctx.prior->log_pdf(theta);
  if (logpi == -kInf) return -kInf;
  const double m = ctx.model->mean_at(theta);
  const double s = std::sqrt(ctx.model->var_at(theta));
  return s > 0.0 ? log_iqr_width(logpi, m, s, ctx.iqr_u) : -kInf;
}

double greedy_pointwise_objective(const CriterionContext& ctx, const Batch& pending,
                                  const Eigen::VectorXd& theta) {
  if (ctx.kind != CriterionKind::Maxv && ctx.kind != CriterionKind::Maxiqr)
    throw std::invalid_argument("greedy_pointwise_objective: pointwise criteria only");
  const double logpi = ctx.prior->log_pdf(theta);
  if (logpi == -kInf) return -kInf;
  const double m = ctx.model->mean_at(theta);
  const double v = ctx.model->var_at(theta);
  const double tau2 = variance_reduction(*ctx.model, theta, pending);
  if (ctx.kind == CriterionKind::Maxiqr) {
    const double s_la = std::sqrt(std::max(v - tau2, 0.0));
    return s_la > 0.0 ? logpi + m + log_2sinh(ctx.iqr_u * s_la) : -kInf;
  }
  const double gap = tau2 - v;
  return gap < 0.0 ? 2.0 * logpi + 2.0 * m + 2.0 * v + log1m_exp(gap) : -kInf;
}

}  // namespace gpsl
