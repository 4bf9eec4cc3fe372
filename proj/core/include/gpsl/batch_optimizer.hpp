#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gpsl/design_criteria.hpp"

namespace gpsl {

struct OptimizerConfig {
  int n_random = 2000;     // random-search candidates per subproblem
  int n_refine = 10;       // best candidates refined by the simplex method
  int refine_evals = 200;  // objective evaluations per refinement
  std::uint64_t seed = 0;
};

struct DesignResult {
  Batch batch;
  // integrated criteria: loss of the returned batch; pointwise criteria: the
  // last greedy objective value (log scale)
  double criterion_value = 0.0;
  std::vector<double> stage_values;  // minimized value per greedy stage
};

// One point: random search over the prior plus the supplied pool, then
// simplex refinement of the best starts. Deterministic for a given seed,
// ties resolved in first-found order.
DesignResult optimize_sequential(const CriterionContext& ctx, const OptimizerConfig& cfg,
                                 const Eigen::MatrixXd& extra_pool = Eigen::MatrixXd());

// Batch built one point at a time with earlier picks pending; the first point
// coincides with optimize_sequential under the same seed, and every chosen
// point joins the candidate pool of later stages.
DesignResult optimize_greedy_batch(const CriterionContext& ctx, int batch_size,
                                   const OptimizerConfig& cfg,
                                   const Eigen::MatrixXd& extra_pool = Eigen::MatrixXd());

// All b points optimized together over the product space (integrated criteria
// only; dimension*batch_size capped at 12). extra_batches are injected into
// the random-search pool.
DesignResult optimize_joint_batch(const CriterionContext& ctx, int batch_size,
                                  const OptimizerConfig& cfg,
                                  const std::vector<Batch>& extra_batches = {});

}  // namespace gpsl
