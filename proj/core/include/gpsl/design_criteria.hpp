#pragma once

#include <Eigen/Core>
#include <optional>

#include "gpsl/criterion_kind.hpp"
#include "gpsl/lookahead.hpp"
#include "gpsl/prior.hpp"
#include "gpsl/quadrature.hpp"

namespace gpsl {

struct CriterionContext {
  const GpModel* model = nullptr;
  const LogPrior* prior = nullptr;
  const WeightedPointSet* quad = nullptr;  // required for integrated criteria
  CriterionKind kind = CriterionKind::Imiqr;
  double iqr_u = 0.6744897501960817;  // normal quantile of 0.75
  double pending_noise_std = 1e-2;

  void validate() const;
};

// Expected integrated variance of the posterior estimate after observing the
// batch, as a log integral:
//   log Int pi^2 e^{2m + s^2} (e^{s^2} - e^{tau^2}) dtheta
double eiv_loss(const CriterionContext& ctx, const Batch& batch);

// Median integrated interquantile width after observing the batch:
//   log Int pi e^{m} 2 sinh(u * s_lookahead) dtheta
double imiqr_loss(const CriterionContext& ctx, const Batch& batch);

// Pointwise objectives (to maximize, returned in log form)
double maxv_objective(const CriterionContext& ctx, const Eigen::VectorXd& theta);
double maxiqr_objective(const CriterionContext& ctx, const Eigen::VectorXd& theta);

// Greedy batch version of the pointwise objectives with earlier points pending:
// the IQR variant plugs the lookahead sd into the width, the variance variant
// takes the expected value of the post-batch variance objective. Both reduce
// to the plain objectives for an empty pending set.
double greedy_pointwise_objective(const CriterionContext& ctx, const Batch& pending,
                                  const Eigen::VectorXd& theta);

// Shared evaluation engine for the optimizer: candidate scores are values to
// minimize for every criterion kind (integrated losses directly, pointwise
// objectives negated).
class CriterionEvaluator {
 public:
  explicit CriterionEvaluator(const CriterionContext& ctx);

  const CriterionContext& ctx() const { return *ctx_; }
  // loss of the empty batch; only defined for integrated criteria
  std::optional<double> empty_loss() const { return empty_loss_; }

  int pending_size() const { return ev_.pending_size(); }
  void reset_pending() { ev_.reset_pending(); }
  void push_pending(const Eigen::VectorXd& x);  // with the context pending noise
  void push_pending(const Eigen::VectorXd& x, double noise_std);
  // loss of the batch pushed so far (integrated criteria; equals empty_loss
  // when nothing is pending)
  double pending_loss() const;

  double candidate_value(const Eigen::VectorXd& x) const;
  void candidate_value_block(const Eigen::MatrixXd& X, Eigen::VectorXd& out) const;

 private:
  double integrated_from_tau2(const Eigen::VectorXd& tau2) const;

  const CriterionContext* ctx_;
  LookaheadEvaluator ev_;
  Eigen::VectorXd base_;  // per-quad-point constant part of the log integrand
  std::optional<double> empty_loss_;
};

}  // namespace gpsl
