// Command line front end: run inference jobs from JSON configs, evaluate
// finished runs against a ground truth, dump simulator summaries, and sweep
// batch sizes at a fixed evaluation budget.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpsl/csv.hpp"
#include "gpsl/harness.hpp"
#include "gpsl/math.hpp"
#include "gpsl/mcmc.hpp"
#include "gpsl/simulators.hpp"
#include "gpsl/tv.hpp"

namespace {

using namespace gpsl;

// Distance of the run's median posterior estimate to the analytic toy
// density; only defined for finished runs on 2D toys.
std::optional<double> analytic_tv(const RunConfig& cfg, const RunResult& res) {
  ToyName toy;
  try {
    toy = parse_toy(cfg.model);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  const Box box = toy_box(toy);
  if (box.dim() != 2 || res.aborted || res.training.size() == 0) return std::nullopt;
  const GpModel model = rebuild_final_model(cfg, res);
  const LogPrior prior = LogPrior::uniform(box);
  const auto surrogate = [&](const Eigen::VectorXd& th) {
    return point_posterior_logpdf(model, prior, PointEstimatorKind::Median, th);
  };
  const auto exact = [&](const Eigen::VectorXd& th) { return toy_logpdf(toy, th); };
  return tv_grid(surrogate, exact, box, cfg.tv_resolution);
}

Box domain_of(const std::string& model) {
  try {
    return toy_box(parse_toy(model));
  } catch (const std::exception&) {
    return find_simulator(model).domain;
  }
}

void report_run(const RunResult& res) {
  std::printf("evaluations: %d\n", res.training.size());
  std::printf("iterations: %d\n", res.completed_iterations);
  if (!res.iterations.empty())
    std::printf("last criterion value: %s\n",
                format_double(res.iterations.back().criterion_value).c_str());
  std::printf("posterior samples: %d\n", static_cast<int>(res.chain.samples.rows()));
  if (res.aborted) std::printf("aborted: %s\n", res.abort_reason.c_str());
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, std::optional<int> workers) {
  RunConfig cfg = load_run_config(config_path);
  cfg.out_dir = out_dir;
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  cfg.validate();
  const RunResult res = run_inference(cfg);
  report_run(res);
  std::printf("run written to %s\n", cfg.out_dir.c_str());
  return res.aborted ? 2 : 0;
}

int cmd_evaluate(const std::string& run_dir, const std::vector<std::string>& truth) {
  RunConfig cfg;
  const RunResult res = load_run(run_dir, &cfg);
  if (truth.at(0) == "analytic") {
    const auto tv = analytic_tv(cfg, res);
    if (!tv) {
      std::fprintf(stderr,
                   "evaluate: analytic ground truth needs a finished run on a "
                   "2D toy density; use --truth samples <csv> instead\n");
      return 1;
    }
    std::printf("tv %s\n", format_double(*tv).c_str());
    return 0;
  }
  if (truth[0] != "samples" || truth.size() != 2) {
    std::fprintf(stderr, "evaluate: --truth takes 'analytic' or 'samples <csv>'\n");
    return 1;
  }
  if (res.chain.samples.rows() == 0) {
    std::fprintf(stderr, "evaluate: run has no posterior samples\n");
    return 1;
  }
  const Box box = domain_of(cfg.model);
  Eigen::MatrixXd ref = read_csv(truth[1]);
  if (ref.cols() == box.dim() + 1) ref = ref.leftCols(box.dim()).eval();
  if (ref.cols() != box.dim())
    throw std::invalid_argument("evaluate: reference sample has " +
                                std::to_string(ref.cols()) + " columns, expected " +
                                std::to_string(box.dim()));
  std::printf("marginal_tv %s\n",
              format_double(marginal_tv(res.chain.samples, ref, box)).c_str());
  return 0;
}

int cmd_simulate(const std::string& model, const std::vector<double>& theta_values,
                 int n, std::uint64_t seed) {
  const SimulatorSpec& spec = find_simulator(model);
  Eigen::VectorXd theta(theta_values.size());
  for (std::size_t i = 0; i < theta_values.size(); ++i) theta[i] = theta_values[i];
  if (theta.size() != spec.domain.dim())
    throw std::invalid_argument("simulate: " + model + " expects " +
                                std::to_string(spec.domain.dim()) + " parameters");
  std::string header = "repeat";
  for (int j = 0; j < spec.summary_dim; ++j) header += ",s" + std::to_string(j);
  std::printf("%s\n", header.c_str());
  for (int r = 0; r < n; ++r) {
    const Eigen::VectorXd s = spec.summaries(theta, mix_seed(seed, r));
    std::string line = std::to_string(r);
    for (int j = 0; j < s.size(); ++j) line += "," + format_double(s[j]);
    std::printf("%s\n", line.c_str());
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<int>& batch_sizes,
              int repeats, const std::string& out_dir, std::optional<int> workers) {
  const RunConfig base = load_run_config(config_path);
  // hold the total evaluation budget of the base config fixed across sizes
  const int budget = base.iter_max * base.batch_size;
  std::printf("batch_size,repeat,seed,n_evals,iterations,seconds,tv,aborted\n");
  bool any_aborted = false;
  for (int b : batch_sizes) {
    if (b < 1) throw std::invalid_argument("sweep: batch sizes must be >= 1");
    for (int rep = 0; rep < repeats; ++rep) {
      RunConfig cfg = base;
      cfg.batch_size = b;
      if (b == 1)
        cfg.batch_mode = "sequential";
      else if (cfg.batch_mode == "sequential")
        cfg.batch_mode = "greedy";
      cfg.iter_max = budget / b;
      cfg.seed = mix_seed(base.seed, static_cast<std::uint64_t>(b),
                          static_cast<std::uint64_t>(rep));
      if (workers) cfg.workers = *workers;
      cfg.out_dir.clear();
      if (!out_dir.empty())
        cfg.out_dir = (std::filesystem::path(out_dir) /
                       ("b" + std::to_string(b) + "_r" + std::to_string(rep)))
                          .string();
      cfg.validate();
      const auto t0 = std::chrono::steady_clock::now();
      const RunResult res = run_inference(cfg);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto tv = analytic_tv(cfg, res);
      std::printf("%d,%d,%llu,%d,%d,%.3f,%s,%d\n", b, rep,
                  static_cast<unsigned long long>(cfg.seed), res.training.size(),
                  res.completed_iterations, secs,
                  tv ? format_double(*tv).c_str() : "nan", res.aborted ? 1 : 0);
      std::fflush(stdout);
      any_aborted = any_aborted || res.aborted;
    }
  }
  return any_aborted ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surrogate-based posterior inference for expensive likelihoods"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one inference job from a JSON config");
  std::string run_config, run_out;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_workers;
  run->add_option("--config", run_config, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "output directory for the run artifacts")
      ->required();
  run->add_option("--seed", run_seed, "override the config seed");
  run->add_option("--workers", run_workers, "override the config worker count");

  auto* evaluate =
      app.add_subcommand("evaluate", "measure a finished run against ground truth");
  std::string eval_run;
  std::vector<std::string> eval_truth;
  evaluate->add_option("--run", eval_run, "run directory written by 'run'")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate
      ->add_option("--truth", eval_truth,
                   "'analytic' (2D toys) or 'samples <csv>' with reference "
                   "posterior draws")
      ->required()
      ->expected(1, 2);

  auto* simulate =
      app.add_subcommand("simulate", "dump simulator summaries at a parameter");
  std::string sim_model;
  std::vector<double> sim_theta;
  int sim_n = 100;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--model", sim_model, "simulator name")->required();
  simulate->add_option("--theta", sim_theta, "parameter values, comma separated")
      ->required()
      ->delimiter(',');
  simulate->add_option("--n", sim_n, "number of repeats")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "master seed");

  auto* sweep = app.add_subcommand(
      "sweep", "repeat a config across batch sizes at a fixed evaluation budget");
  std::string sweep_config, sweep_out;
  std::vector<int> sweep_sizes;
  int sweep_repeats = 1;
  std::optional<int> sweep_workers;
  sweep->add_option("--config", sweep_config, "JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--batch-sizes", sweep_sizes, "batch sizes, comma separated")
      ->required()
      ->delimiter(',');
  sweep->add_option("--repeats", sweep_repeats, "independent repeats per size")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "persist each run under this directory");
  sweep->add_option("--workers", sweep_workers, "override the config worker count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, run_out, run_seed, run_workers);
    if (evaluate->parsed()) return cmd_evaluate(eval_run, eval_truth);
    if (simulate->parsed()) return cmd_simulate(sim_model, sim_theta, sim_n, sim_seed);
    if (sweep->parsed())
      return cmd_sweep(sweep_config, sweep_sizes, sweep_repeats, sweep_out,
                       sweep_workers);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
