#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "gpsl/box.hpp"
#include "gpsl/criterion_kind.hpp"
#include "gpsl/gp_model.hpp"
#include "gpsl/mcmc.hpp"
#include "gpsl/prior.hpp"

namespace gpsl {

// Points with normalized weights (log-weights sum to one) plus the reference
// volume, so that log_integral estimates log of the true integral.
struct WeightedPointSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd log_weight;
  double log_volume = 0.0;
  bool fallback = false;  // importance sampler degenerated to prior draws

  int size() const { return static_cast<int>(log_weight.size()); }
  int dim() const { return static_cast<int>(points.cols()); }
  double log_integral(const Eigen::VectorXd& log_values) const;
};

// Midpoint-rule tensor grid with uniform weights; one cell count per
// dimension, or a single count shared by all of them.
WeightedPointSet grid_points(const Box& box, const std::vector<int>& resolution);
WeightedPointSet grid_points(const Box& box, int resolution);

struct ImportanceConfig {
  int n_points = 1000;
  int chains = 4;
  int burn = 2000;
  int keep = 2500;  // per chain, before thinning
  double min_acceptance = 0.01;
  McmcConfig mcmc;
  std::uint64_t seed = 0;
};

// Proposal density for self-normalized importance sampling: the current
// pointwise loss (variance of the posterior estimate for the variance-based
// criteria, the L1 risk integrand for the IQR-based ones), restricted to the
// prior support.
double loss_proposal_logpdf(const GpModel& model, const LogPrior& prior,
                            CriterionKind kind, const Eigen::VectorXd& theta);

// Draw from the proposal by adaptive MCMC started at the best training points,
// thin to n_points, and weight each point by the reciprocal proposal density
// (self-normalized). Falls back to i.i.d. prior draws with uniform weights if
// the chains essentially stop moving.
WeightedPointSet importance_points(const GpModel& model, const LogPrior& prior,
                                   CriterionKind kind, const ImportanceConfig& cfg);

}  // namespace gpsl
