// Microbenchmarks of the paths the inference loop leans on: model refits,
// batch variance bookkeeping, criterion integrals and the simulators.

#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <cmath>

#include "gpsl/box.hpp"
#include "gpsl/design_criteria.hpp"
#include "gpsl/fit.hpp"
#include "gpsl/gp_model.hpp"
#include "gpsl/lookahead.hpp"
#include "gpsl/math.hpp"
#include "gpsl/prior.hpp"
#include "gpsl/quadrature.hpp"
#include "gpsl/simulators.hpp"
#include "gpsl/synthetic_likelihood.hpp"

namespace {

using namespace gpsl;

// smooth 2D test function with noisy observations
TrainingSet make_train(int t, Rng& rng) {
  const Box box = Box::cube(-3.0, 3.0, 2);
  TrainingSet train(2);
  std::normal_distribution<double> nd;
  for (int i = 0; i < t; ++i) {
    const Eigen::VectorXd x = box.sample(rng);
    const double y = -0.5 * x.squaredNorm() + 0.3 * std::sin(2.0 * x[0]);
    train.append(x, y + 0.1 * nd(rng), 0.1);
  }
  return train;
}

GpHyperparams make_hyper() {
  GpHyperparams hyper;
  hyper.signal_var = 4.0;
  hyper.lengthscales = Eigen::VectorXd::Constant(2, 1.2);
  return hyper;
}

void bm_model_build(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  Rng rng(42);
  const TrainingSet train = make_train(t, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(GpModel(train, make_hyper(), BasisConfig::quadratic(2)));
}
BENCHMARK(bm_model_build)->Arg(50)->Arg(200)->Arg(500);

void bm_predict_block(benchmark::State& state) {
  Rng rng(42);
  const GpModel model(make_train(static_cast<int>(state.range(0)), rng), make_hyper(),
                      BasisConfig::quadratic(2));
  const Eigen::MatrixXd q = Box::cube(-3.0, 3.0, 2).sample_n(rng, 400);
  Eigen::VectorXd mean, var;
  for (auto _ : state) {
    model.predict_marginal(q, mean, var);
    benchmark::DoNotOptimize(mean);
  }
}
BENCHMARK(bm_predict_block)->Arg(50)->Arg(200)->Arg(500);

void bm_fit_objective(benchmark::State& state) {
  Rng rng(7);
  const TrainingSet train = make_train(200, rng);
  const Box box = Box::cube(-3.0, 3.0, 2);
  const auto hp = HyperPriorConfig::defaults(train, box);
  Eigen::VectorXd point(3);
  point << std::log(2.0), std::log(1.2), std::log(1.2);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        fit_objective(train, BasisConfig::quadratic(2), hp, point, false));
}
BENCHMARK(bm_fit_objective);

void bm_candidate_tau2_block(benchmark::State& state) {
  Rng rng(42);
  const GpModel model(make_train(200, rng), make_hyper(), BasisConfig::quadratic(2));
  const Box box = Box::cube(-3.0, 3.0, 2);
  const WeightedPointSet quad = grid_points(box, 20);
  LookaheadEvaluator ev(model, quad.points);
  ev.push_pending(box.center(), 0.1);
  const Eigen::MatrixXd cands = box.sample_n(rng, 128);
  Eigen::MatrixXd tau2;
  for (auto _ : state) {
    ev.candidate_tau2_block(cands, 0.1, tau2);
    benchmark::DoNotOptimize(tau2);
  }
}
BENCHMARK(bm_candidate_tau2_block);

void bm_integrated_loss(benchmark::State& state) {
  Rng rng(42);
  const GpModel model(make_train(200, rng), make_hyper(), BasisConfig::quadratic(2));
  const Box box = Box::cube(-3.0, 3.0, 2);
  const LogPrior prior = LogPrior::uniform(box);
  const WeightedPointSet quad = grid_points(box, 20);
  CriterionContext ctx;
  ctx.model = &model;
  ctx.prior = &prior;
  ctx.quad = &quad;
  ctx.kind = CriterionKind::Imiqr;
  Batch batch = Batch::empty(2);
  batch.append(box.center(), 0.1);
  batch.append(box.center() * 0.5, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(imiqr_loss(ctx, batch));
}
BENCHMARK(bm_integrated_loss);

void bm_log_sl(benchmark::State& state) {
  Rng rng(9);
  std::normal_distribution<double> nd;
  SummaryBlock block;
  block.summaries.resize(100, 13);
  for (int i = 0; i < block.summaries.size(); ++i)
    block.summaries.data()[i] = nd(rng);
  block.observed = Eigen::VectorXd::Zero(13);
  for (auto _ : state) benchmark::DoNotOptimize(log_sl(block));
}
BENCHMARK(bm_log_sl);

void bm_ricker(benchmark::State& state) {
  Eigen::Vector3d theta(3.8, 10.0, 0.3);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ricker_summaries(theta, seed++));
}
BENCHMARK(bm_ricker);

void bm_gk(benchmark::State& state) {
  Eigen::Vector4d theta(3.0, 1.0, 2.0, 0.5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gk_summaries(theta, seed++));
}
BENCHMARK(bm_gk);

void bm_lorenz(benchmark::State& state) {
  Eigen::Vector2d theta(2.0, 0.1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lorenz_summaries(theta, seed++));
}
BENCHMARK(bm_lorenz);

}  // namespace

BENCHMARK_MAIN();
