#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "gpsl/box.hpp"
#include "gpsl/gp_model.hpp"
#include "gpsl/prior.hpp"

namespace gpsl {

struct McmcConfig {
  double initial_step_frac = 0.05;  // initial proposal sd as fraction of box side
  int adapt_start = 200;            // steps before covariance adaptation kicks in
  double adapt_reg = 1e-8;
  double burn_frac = 0.25;
  int chains = 4;
  std::uint64_t seed = 0;
};

struct Chain {
  Eigen::MatrixXd samples;      // n x d
  Eigen::VectorXd log_density;  // n
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
};

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

// Gaussian random-walk Metropolis whose proposal covariance adapts to the
// running sample covariance (scaled by 2.38^2/d) once adapt_start steps have
// been recorded. Proposals outside the box are rejected. A NaN log-density is
// a hard error; -inf is a regular rejection.
Chain adaptive_metropolis(const LogDensity& logpdf, const Box& box,
                          const Eigen::VectorXd& x0, int n_steps,
                          const McmcConfig& cfg, std::uint64_t seed);

// k best distinct training locations under a target density; used to start
// chains. Throws if no training point has finite density.
std::vector<Eigen::VectorXd> best_training_starts(const GpModel& model,
                                                  const LogDensity& target, int k);

enum class PointEstimatorKind { Median, Mean };

// Log-density of the model-induced point estimate of the posterior:
// logpi + m (median) or logpi + m + s^2/2 (mean).
double point_posterior_logpdf(const GpModel& model, const LogPrior& prior,
                              PointEstimatorKind kind, const Eigen::VectorXd& theta);

// Multi-chain sampling of the point estimate; chains start from the best
// distinct training locations, first burn_frac of each chain is dropped, and
// the kept portions are concatenated.
Chain sample_point_posterior(const GpModel& model, const LogPrior& prior,
                             PointEstimatorKind kind, int n_samples,
                             const McmcConfig& cfg);

}  // namespace gpsl
