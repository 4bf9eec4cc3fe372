#pragma once

#include <Eigen/Core>

#include "gpsl/covariance.hpp"
#include "gpsl/training_set.hpp"

namespace gpsl {

// Polynomial mean basis h(x) = [1, x_1..x_d, x_1^2..x_d^2] whose Gaussian
// coefficients (mean coef_mean, independent variances coef_var) are
// marginalized analytically into the predictive equations.
struct BasisConfig {
  Eigen::VectorXd coef_mean;
  Eigen::VectorXd coef_var;

  static BasisConfig quadratic(int dim, double coef_sd = 30.0);
  int count() const { return static_cast<int>(coef_mean.size()); }
  void validate(int dim) const;

  // basis rows for a point set (n x d) -> (n x q)
  static Eigen::MatrixXd rows(const Eigen::MatrixXd& X);
};

// Gaussian process regression on noisy function values with heteroskedastic
// Gaussian noise and the marginalized basis above. Training noise variances
// enter the kernel matrix diagonal; a relative jitter ladder covers
// near-singular cases and names the offending near-duplicate rows on failure.
class GpModel {
 public:
  GpModel(TrainingSet train, GpHyperparams hyper, BasisConfig basis);

  int dim() const { return train_.dim(); }
  int size() const { return train_.size(); }
  const TrainingSet& train() const { return train_; }
  const GpHyperparams& hyper() const { return hyper_; }
  const BasisConfig& basis() const { return basis_; }
  double applied_jitter() const { return jitter_; }

  // Solved query factors; columns correspond to query points.
  struct Factors {
    Eigen::MatrixXd v;  // t x n: L^{-1} k(train, Q)
    Eigen::MatrixXd e;  // q x n: Lw^{-1} (h(Q)' - Ah' v)
  };
  Factors factors(const Eigen::MatrixXd& Q) const;

  Eigen::VectorXd mean_from(const Factors& f) const;
  Eigen::VectorXd var_from(const Factors& f) const;  // clamped at >= 0
  // posterior covariance block between two solved query sets
  Eigen::MatrixXd cross_from(const Factors& fa, const Eigen::MatrixXd& A,
                             const Factors& fb, const Eigen::MatrixXd& B) const;

  void predict(const Eigen::MatrixXd& Q, Eigen::VectorXd& mean,
               Eigen::MatrixXd& cov) const;
  void predict_marginal(const Eigen::MatrixXd& Q, Eigen::VectorXd& mean,
                        Eigen::VectorXd& var) const;
  Eigen::MatrixXd cross_cov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const;
  double mean_at(const Eigen::VectorXd& x) const;
  double var_at(const Eigen::VectorXd& x) const;

 private:
  TrainingSet train_;
  GpHyperparams hyper_;
  BasisConfig basis_;
  double jitter_ = 0.0;

  Eigen::MatrixXd L_;     // chol(K), K = k(X,X) + diag(noise^2) (+ jitter)
  Eigen::MatrixXd Ah_;    // L^{-1} H  (t x q), H = basis rows of training set
  Eigen::MatrixXd Lw_;    // chol(B^{-1} + Ah' Ah)
  Eigen::VectorXd ytil_;  // L^{-1} y
  Eigen::VectorXd gtil_;  // Lw' gamma_bar, so that mean = v' ytil + e' gtil
};

constexpr double kNoiseFloor = 1e-6;

}  // namespace gpsl
