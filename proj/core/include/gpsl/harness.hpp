#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gpsl/batch_optimizer.hpp"
#include "gpsl/criterion_kind.hpp"
#include "gpsl/fit.hpp"
#include "gpsl/gp_model.hpp"
#include "gpsl/mcmc.hpp"
#include "gpsl/prior.hpp"
#include "gpsl/simulators.hpp"
#include "gpsl/synthetic_likelihood.hpp"
#include "gpsl/training_set.hpp"

namespace gpsl {

// Full description of one inference run; mirrors the JSON config documents
// accepted by the command-line tools field for field.
struct RunConfig {
  std::string model;             // toy density or simulator name
  std::string oracle = "exact";  // "exact" (toys) or "sl" (simulators)
  double exact_noise_std = 1.0;  // observation noise of the exact oracle
  int n_repeats = 100;           // simulator repeats per log-SL evaluation
  int n_boot = 2000;             // bootstrap resamples for the noise estimate
  std::string criterion = "imiqr";
  std::string batch_mode = "sequential";  // sequential | greedy | joint
  int batch_size = 1;
  int initial_design = 10;
  int iter_max = 0;
  std::string quadrature = "auto";  // auto (grid when 2D) | grid | is
  int grid_resolution = 50;
  int is_points = 1000;
  int is_chains = 4;
  int is_burn = 2000;
  int is_keep = 2500;
  int mcmc_samples = 50000;  // final posterior chain, total kept
  int mcmc_chains = 4;
  bool estimate_noise = false;  // co-estimate a constant noise level by MAP
  int fit_restarts = 10;
  int fit_max_evals = 500;
  int opt_n_random = 2000;
  int opt_n_refine = 10;
  int opt_refine_evals = 200;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;    // empty: nothing persisted
  bool tv_trace = false;  // record TV against the exact density (2D toys)
  int tv_resolution = 100;

  void validate() const;
  CriterionKind criterion_kind() const;
};

std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

struct IterationRecord {
  int iteration = 0;  // 1-based design iterations
  int n_evals = 0;    // training size after the iteration
  double criterion_value = 0.0;
  GpHyperparams hyper;          // MAP fit the iteration used
  double fitted_noise_std = 0;  // NaN unless noise is co-estimated
  double tv = 0;                // NaN unless traced
  std::uint64_t training_hash = 0;
  double wall_ms = 0.0;
};

struct RunResult {
  TrainingSet training;
  std::vector<IterationRecord> iterations;
  std::vector<Batch> designs;  // chosen batch per iteration
  GpHyperparams final_hyper;
  double final_noise_std = 0;  // NaN unless co-estimated
  Chain chain;                 // final posterior samples
  bool aborted = false;
  std::string abort_reason;
  int completed_iterations = 0;
};

// The model target the run infers: prior box, exact density when available,
// and the noisy log-likelihood oracle.
struct Problem {
  LogPrior prior;
  std::unique_ptr<LoglikOracle> oracle;
  std::function<double(const Eigen::VectorXd&)> exact_loglik;  // null for simulators
  Eigen::VectorXd true_theta;  // empty for toys
};

Problem make_problem(const RunConfig& config);

// Sequential surrogate-based inference: initial design from the prior, then
// iter_max rounds of MAP refit, quadrature, batch design and parallel
// evaluation, finished by a final refit and an MCMC run on the marginal
// median estimate. Deterministic in the master seed, independent of workers.
// A failing iteration is retried once with fresh sub-seeds; a second failure
// aborts with the partial result persisted (when out_dir is set) and the
// aborted flag raised.
RunResult run_inference(const RunConfig& config);

// GP surrogate rebuilt from a finished run exactly as the final MCMC saw it.
GpModel rebuild_final_model(const RunConfig& config, const RunResult& result);

// FNV-1a over the raw bytes of the training matrices, for snapshot records.
std::uint64_t training_set_hash(const TrainingSet& train);

void persist_run(const RunConfig& config, const RunResult& result);

// Reads a persisted run back (training set, final chain and manifest fields;
// per-iteration records stay in iterations.csv).
RunResult load_run(const std::string& dir, RunConfig* config = nullptr);

}  // namespace gpsl
