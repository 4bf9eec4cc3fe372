#include "gpsl/synthetic_likelihood.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "gpsl/dispatch.hpp"
#include "gpsl/errors.hpp"
#include "gpsl/gp_model.hpp"
#include "gpsl/math.hpp"

namespace gpsl {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr std::uint64_t kBootstrapTag = 0x626f6f74;  // keeps repeat seeds distinct

// log N(observed | mean, cov) of the rows in S, or nullopt when the fitted
// covariance fails to factor even after the jitter.
std::optional<double> gaussian_fit_logpdf(const Eigen::MatrixXd& S,
                                          const Eigen::VectorXd& observed) {
  const int n = static_cast<int>(S.rows());
  const int p = static_cast<int>(S.cols());
  const Eigen::VectorXd mean = S.colwise().mean();
  const Eigen::MatrixXd centered = S.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  cov.diagonal().array() += 1e-10 * cov.trace() / p;

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd L = llt.matrixL();
  const double log_det_half = L.diagonal().array().log().sum();
  if (!std::isfinite(log_det_half)) return std::nullopt;
  const Eigen::VectorXd z = L.triangularView<Eigen::Lower>().solve(observed - mean);
  return -0.5 * p * kLog2Pi - log_det_half - 0.5 * z.squaredNorm();
}

}  // namespace

void SummaryBlock::validate() const {
  const int n = repeats();
  const int p = summary_dim();
  if (p < 1) throw std::invalid_argument("SummaryBlock: empty observed summary");
  if (summaries.cols() != p)
    throw std::invalid_argument("SummaryBlock: summary width does not match observed");
  if (n < p + 2)
    throw std::invalid_argument("SummaryBlock: need at least p + 2 repeats");
  if (!summaries.allFinite() || !observed.allFinite())
    throw std::invalid_argument("SummaryBlock: non-finite entries");
}

double log_sl(const SummaryBlock& block) {
  block.validate();
  const auto value = gaussian_fit_logpdf(block.summaries, block.observed);
  if (!value)
    throw DegenerateSummaries("summary covariance is singular", block.theta);
  return *value;
}

double bootstrap_noise_std(const SummaryBlock& block, int n_boot, std::uint64_t seed) {
  block.validate();
  if (n_boot < 1) throw std::invalid_argument("bootstrap_noise_std: n_boot >= 1");

  const int n = block.repeats();
  Rng rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  Eigen::MatrixXd resampled(n, block.summary_dim());
  std::vector<double> values;
  values.reserve(n_boot);
  int skipped = 0;
  for (int b = 0; b < n_boot; ++b) {
    for (int i = 0; i < n; ++i) resampled.row(i) = block.summaries.row(pick(rng));
    const auto value = gaussian_fit_logpdf(resampled, block.observed);
    if (value)
      values.push_back(*value);
    else
      ++skipped;
  }
  if (skipped * 10 > n_boot)
    throw DegenerateSummaries("more than 10% of bootstrap resamples degenerate",
                              block.theta);

  if (values.size() < 2) return kNoiseFloor;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return std::max(sd, kNoiseFloor);
}

SyntheticLikelihood::SyntheticLikelihood(SummaryFn simulator, Eigen::VectorXd observed,
                                         int n_repeats, int n_boot)
    : simulator_(std::move(simulator)),
      observed_(std::move(observed)),
      n_repeats_(n_repeats),
      n_boot_(n_boot) {
  if (!simulator_) throw std::invalid_argument("SyntheticLikelihood: null simulator");
  if (observed_.size() < 1)
    throw std::invalid_argument("SyntheticLikelihood: empty observed summary");
  if (n_repeats_ < static_cast<int>(observed_.size()) + 2)
    throw std::invalid_argument("SyntheticLikelihood: need at least p + 2 repeats");
  if (n_boot_ < 1) throw std::invalid_argument("SyntheticLikelihood: n_boot >= 1");
}

SummaryBlock SyntheticLikelihood::simulate_block(const Eigen::VectorXd& theta,
                                                 std::uint64_t seed,
                                                 const WorkerPool* pool) const {
  SummaryBlock block;
  block.theta = theta;
  block.observed = observed_;
  block.summaries.resize(n_repeats_, observed_.size());

  run_indexed(pool, n_repeats_, [&](int r) {
    const Eigen::VectorXd s = simulator_(theta, mix_seed(seed, static_cast<std::uint64_t>(r)));
    if (s.size() != observed_.size())
      throw SimulatorError("summary dimension does not match observed data", theta);
    block.summaries.row(r) = s;
  });

  if (!block.summaries.allFinite())
    throw SimulatorError("simulator produced non-finite summaries", theta);
  return block;
}

NoisyEvaluation SyntheticLikelihood::evaluate(const Eigen::VectorXd& theta,
                                              std::uint64_t seed,
                                              const WorkerPool* pool) const {
  const SummaryBlock block = simulate_block(theta, seed, pool);
  NoisyEvaluation out;
  out.y = log_sl(block);
  out.noise_std = bootstrap_noise_std(block, n_boot_, mix_seed(seed, kBootstrapTag));
  out.theta = theta;
  out.kind = OracleKind::SyntheticLikelihood;
  out.n_repeats = n_repeats_;
  return out;
}

ExactPlusNoise::ExactPlusNoise(std::function<double(const Eigen::VectorXd&)> exact_logpdf,
                               double noise_std)
    : exact_(std::move(exact_logpdf)), noise_std_(noise_std) {
  if (!exact_) throw std::invalid_argument("ExactPlusNoise: null log-density");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("ExactPlusNoise: noise_std >= 0");
}

NoisyEvaluation ExactPlusNoise::evaluate(const Eigen::VectorXd& theta, std::uint64_t seed,
                                         const WorkerPool*) const {
  const double exact = exact_(theta);
  if (!std::isfinite(exact))
    throw SimulatorError("exact log-density is not finite", theta);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  NoisyEvaluation out;
  out.y = exact + noise_std_ * normal(rng);
  out.noise_std = std::max(noise_std_, kNoiseFloor);
  out.theta = theta;
  out.kind = OracleKind::ExactPlusNoise;
  out.n_repeats = 0;
  return out;
}

std::vector<NoisyEvaluation> dispatch_batch(const LoglikOracle& oracle,
                                            const std::vector<EvalTask>& tasks,
                                            const WorkerPool* pool) {
  if (tasks.empty()) throw std::invalid_argument("dispatch_batch: no tasks");
  std::vector<NoisyEvaluation> out;
  out.reserve(tasks.size());
  for (const EvalTask& task : tasks) out.push_back(oracle.evaluate(task.theta, task.seed, pool));
  return out;
}

}  // namespace gpsl
