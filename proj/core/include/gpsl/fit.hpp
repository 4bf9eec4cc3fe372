#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "gpsl/box.hpp"
#include "gpsl/gp_model.hpp"
#include "gpsl/training_set.hpp"

namespace gpsl {

// Log-normal hyperpriors, parameterized by the median on the natural scale
// and the standard deviation of the log.
struct HyperPriorConfig {
  double sf_log_median = 0.0;
  double sf_log_sd = 1.5;
  Eigen::VectorXd len_log_median;
  double len_log_sd = 1.5;
  double noise_log_median = 0.0;  // only used when a constant noise is co-estimated
  double noise_log_sd = 2.0;

  // medians: sd(y) for the signal, a quarter of each domain side for the
  // lengthscales, sd(y)/10 for co-estimated noise
  static HyperPriorConfig defaults(const TrainingSet& train, const Box& domain);
};

struct FitOptions {
  int restarts = 10;
  int max_evals = 500;  // objective evaluations per restart
  std::uint64_t seed = 0;
  bool estimate_noise = false;
  std::optional<Eigen::VectorXd> warm_start;  // log-space point, used as first start
};

struct FitResult {
  GpHyperparams hyper;
  std::optional<double> noise_std;  // present when estimate_noise
  bool converged = true;            // false: fell back to best evaluated point
  double objective = 0.0;           // maximized MAP objective
  Eigen::VectorXd log_point;        // optimum in log space, reusable as warm start
};

// Optimization variables are logs of [sigma_f, l_1..l_d (, sigma_n)].
Box default_fit_bounds(const TrainingSet& train, const Box& domain, bool estimate_noise);

// Marginal likelihood of the data with basis coefficients integrated out,
// plus hyperprior terms; the quantity fit_map maximizes.
double fit_objective(const TrainingSet& train, const BasisConfig& basis,
                     const HyperPriorConfig& hp, const Eigen::VectorXd& log_point,
                     bool estimate_noise);

FitResult fit_map(const TrainingSet& train, const BasisConfig& basis,
                  const Box& log_bounds, const FitOptions& opts,
                  const HyperPriorConfig& hp);

}  // namespace gpsl
