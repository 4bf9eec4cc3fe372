#pragma once

#include <Eigen/Core>

#include "gpsl/gp_model.hpp"

namespace gpsl {

// Candidate evaluation locations paired with the noise level their future
// observations are assumed to carry (not yet evaluated).
struct Batch {
  Eigen::MatrixXd points;     // b x d, rows are points
  Eigen::VectorXd noise_std;  // b

  static Batch empty(int dim);
  int size() const { return static_cast<int>(noise_std.size()); }
  int dim() const { return static_cast<int>(points.cols()); }
  void append(const Eigen::VectorXd& x, double noise);
};

// Reduction of the predictive variance at theta caused by observing the batch:
// tau^2 = c(theta, B) [C(B, B) + diag(noise^2)]^{-1} c(B, theta).
// Independent of the future observed values; depends only on locations.
double variance_reduction(const GpModel& model, const Eigen::VectorXd& theta,
                          const Batch& batch);

// s^2(theta) - tau^2(theta; batch), clamped at >= 0.
double lookahead_variance(const GpModel& model, const Eigen::VectorXd& theta,
                          const Batch& batch);

// tau^2(theta; {p1, p2}) - tau^2(theta; p1) - tau^2(theta; p2), in closed form.
double interaction_term(const GpModel& model, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& p1, const Eigen::VectorXd& p2,
                        double noise1, double noise2);

// Rank-one update: tau^2 for base extended by one point, without re-solving
// the full (b x b) system.
double extend_reduction(const GpModel& model, const Eigen::VectorXd& theta,
                        const Batch& base, const Eigen::VectorXd& extra,
                        double extra_noise);

// Incremental batch state against a fixed set of evaluation points. Pending
// points are pushed one at a time (greedy construction); candidate extensions
// are scored by the rank-one update in O(s*b) after an O(t^2) solve per
// candidate, or as a block via matrix products.
class LookaheadEvaluator {
 public:
  LookaheadEvaluator(const GpModel& model, Eigen::MatrixXd eval_points);

  const GpModel& model() const { return *model_; }
  const Eigen::MatrixXd& eval_points() const { return pts_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& var() const { return var_; }

  int pending_size() const { return static_cast<int>(p_sbar2_.size()); }
  void reset_pending();
  void push_pending(const Eigen::VectorXd& x, double noise_std);
  const Eigen::VectorXd& pending_tau2() const { return tau2_; }

  // tau^2(eval; pending + {x})
  void candidate_tau2(const Eigen::VectorXd& x, double noise_std,
                      Eigen::VectorXd& out) const;
  void candidate_tau2_block(const Eigen::MatrixXd& X, double noise_std,
                            Eigen::MatrixXd& out) const;

  // mean/variance/tau^2(x; pending) at candidates themselves (pointwise criteria)
  void candidate_self(const Eigen::VectorXd& x, double& mean_x, double& var_x,
                      double& tau2_x) const;
  void candidate_self_block(const Eigen::MatrixXd& X, Eigen::VectorXd& mean,
                            Eigen::VectorXd& var, Eigen::VectorXd& tau2) const;

 private:
  struct CandidateFactors;
  void factor_candidates(const Eigen::MatrixXd& X, CandidateFactors& cf) const;

  const GpModel* model_;
  Eigen::MatrixXd pts_;
  GpModel::Factors f_;
  Eigen::VectorXd mean_, var_;

  Eigen::MatrixXd P_;        // pending points (p x d)
  Eigen::MatrixXd Pv_, Pe_;  // model factors at pending points
  Eigen::VectorXd p_sbar2_;  // s^2 + noise^2 per pending point
  Eigen::MatrixXd La_;       // chol of pending system
  Eigen::MatrixXd Z_;        // La^{-1} C(pending, eval)
  Eigen::VectorXd tau2_;
};

}  // namespace gpsl
