#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace gpsl {

class WorkerPool;

// Summaries of N repeated simulator runs at one parameter, plus the observed
// data summary they are compared against.
struct SummaryBlock {
  Eigen::MatrixXd summaries;  // N x p, one row per repeat
  Eigen::VectorXd observed;   // p
  Eigen::VectorXd theta;

  int repeats() const { return static_cast<int>(summaries.rows()); }
  int summary_dim() const { return static_cast<int>(observed.size()); }
  void validate() const;  // finite entries, N >= p + 2
};

// Gaussian log-density of the observed summary under the ML plug-in fit of
// the repeat summaries (mean and N-1 divisor covariance, with a relative
// jitter of 1e-10 * trace/p on the diagonal). Throws DegenerateSummaries
// when the fitted covariance is not positive definite.
double log_sl(const SummaryBlock& block);

// Standard deviation of log_sl over blocks resampled with replacement from
// the repeat rows. Degenerate resamples are skipped; more than 10% of them
// is an error. The result is floored at 1e-6.
double bootstrap_noise_std(const SummaryBlock& block, int n_boot, std::uint64_t seed);

enum class OracleKind { SyntheticLikelihood, ExactPlusNoise };

struct NoisyEvaluation {
  double y = 0.0;
  double noise_std = 0.0;  // floored at 1e-6
  Eigen::VectorXd theta;
  OracleKind kind = OracleKind::ExactPlusNoise;
  int n_repeats = 0;  // simulator runs consumed by this evaluation
};

// A source of noisy log-likelihood values. Deterministic in (theta, seed),
// independent of the worker pool used for internal fan-out.
class LoglikOracle {
 public:
  virtual ~LoglikOracle() = default;
  virtual NoisyEvaluation evaluate(const Eigen::VectorXd& theta, std::uint64_t seed,
                                   const WorkerPool* pool = nullptr) const = 0;
  // simulator runs consumed per evaluation (0 for exact oracles)
  virtual int repeats() const = 0;
};

// One simulator run: summary vector for (theta, seed).
using SummaryFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& theta, std::uint64_t seed)>;

// log-SL oracle: N simulator repeats with sub-seeds derived from the
// evaluation seed, then log_sl and a bootstrap noise estimate.
class SyntheticLikelihood final : public LoglikOracle {
 public:
  SyntheticLikelihood(SummaryFn simulator, Eigen::VectorXd observed, int n_repeats,
                      int n_boot = 2000);

  NoisyEvaluation evaluate(const Eigen::VectorXd& theta, std::uint64_t seed,
                           const WorkerPool* pool = nullptr) const override;
  int repeats() const override { return n_repeats_; }

  // the raw block behind an evaluation, for audit dumps
  SummaryBlock simulate_block(const Eigen::VectorXd& theta, std::uint64_t seed,
                              const WorkerPool* pool = nullptr) const;

 private:
  SummaryFn simulator_;
  Eigen::VectorXd observed_;
  int n_repeats_;
  int n_boot_;
};

// Exact log-density plus Gaussian noise of known standard deviation; the toy
// benchmark mode where the log-likelihood itself is available.
class ExactPlusNoise final : public LoglikOracle {
 public:
  ExactPlusNoise(std::function<double(const Eigen::VectorXd&)> exact_logpdf,
                 double noise_std);

  NoisyEvaluation evaluate(const Eigen::VectorXd& theta, std::uint64_t seed,
                           const WorkerPool* pool = nullptr) const override;
  int repeats() const override { return 0; }

 private:
  std::function<double(const Eigen::VectorXd&)> exact_;
  double noise_std_;
};

struct EvalTask {
  Eigen::VectorXd theta;
  std::uint64_t seed;
};

// Evaluates every task, results in task order. Each evaluation fans its
// repeats out over the pool; errors carry theta and propagate to the caller.
std::vector<NoisyEvaluation> dispatch_batch(const LoglikOracle& oracle,
                                            const std::vector<EvalTask>& tasks,
                                            const WorkerPool* pool = nullptr);

}  // namespace gpsl
