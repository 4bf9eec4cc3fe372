#include "gpsl/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gpsl/csv.hpp"
#include "gpsl/dispatch.hpp"
#include "gpsl/math.hpp"
#include "gpsl/quadrature.hpp"
#include "gpsl/tv.hpp"
#include "json.hpp"

namespace gpsl {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// second-level seed tags; batch indices stay far below the smallest of these
constexpr std::uint64_t kInitDesignTag = 0x1de5;
constexpr std::uint64_t kDataTag = 0xda7a;
constexpr std::uint64_t kFitTag = 0xf17;
constexpr std::uint64_t kQuadTag = 0x4a2d;
constexpr std::uint64_t kDesignTag = 0xde51;
constexpr std::uint64_t kRetryTag = 0x9e729;
constexpr std::uint64_t kFinalMcmcTag = 0x3c3c;

json hyper_to_json(const GpHyperparams& hyper) {
  json j;
  j["signal_var"] = hyper.signal_var;
  j["lengthscales"] = std::vector<double>(
      hyper.lengthscales.data(), hyper.lengthscales.data() + hyper.lengthscales.size());
  return j;
}

GpHyperparams hyper_from_json(const json& j) {
  GpHyperparams hyper;
  hyper.signal_var = j.at("signal_var").get<double>();
  const auto lens = j.at("lengthscales").get<std::vector<double>>();
  hyper.lengthscales = Eigen::Map<const Eigen::VectorXd>(lens.data(), lens.size());
  return hyper;
}

json config_to_json_obj(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["oracle"] = c.oracle;
  j["exact_noise_std"] = c.exact_noise_std;
  j["n_repeats"] = c.n_repeats;
  j["n_boot"] = c.n_boot;
  j["criterion"] = c.criterion;
  j["batch_mode"] = c.batch_mode;
  j["batch_size"] = c.batch_size;
  j["initial_design"] = c.initial_design;
  j["iter_max"] = c.iter_max;
  j["quadrature"] = c.quadrature;
  j["grid_resolution"] = c.grid_resolution;
  j["is_points"] = c.is_points;
  j["is_chains"] = c.is_chains;
  j["is_burn"] = c.is_burn;
  j["is_keep"] = c.is_keep;
  j["mcmc_samples"] = c.mcmc_samples;
  j["mcmc_chains"] = c.mcmc_chains;
  j["estimate_noise"] = c.estimate_noise;
  j["fit_restarts"] = c.fit_restarts;
  j["fit_max_evals"] = c.fit_max_evals;
  j["opt_n_random"] = c.opt_n_random;
  j["opt_n_refine"] = c.opt_n_refine;
  j["opt_refine_evals"] = c.opt_refine_evals;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  j["tv_trace"] = c.tv_trace;
  j["tv_resolution"] = c.tv_resolution;
  return j;
}

RunConfig config_from_json_obj(const json& j) {
  RunConfig c;  // absent fields keep their defaults
  c.model = j.value("model", c.model);
  c.oracle = j.value("oracle", c.oracle);
  c.exact_noise_std = j.value("exact_noise_std", c.exact_noise_std);
  c.n_repeats = j.value("n_repeats", c.n_repeats);
  c.n_boot = j.value("n_boot", c.n_boot);
  c.criterion = j.value("criterion", c.criterion);
  c.batch_mode = j.value("batch_mode", c.batch_mode);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.initial_design = j.value("initial_design", c.initial_design);
  c.iter_max = j.value("iter_max", c.iter_max);
  c.quadrature = j.value("quadrature", c.quadrature);
  c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
  c.is_points = j.value("is_points", c.is_points);
  c.is_chains = j.value("is_chains", c.is_chains);
  c.is_burn = j.value("is_burn", c.is_burn);
  c.is_keep = j.value("is_keep", c.is_keep);
  c.mcmc_samples = j.value("mcmc_samples", c.mcmc_samples);
  c.mcmc_chains = j.value("mcmc_chains", c.mcmc_chains);
  c.estimate_noise = j.value("estimate_noise", c.estimate_noise);
  c.fit_restarts = j.value("fit_restarts", c.fit_restarts);
  c.fit_max_evals = j.value("fit_max_evals", c.fit_max_evals);
  c.opt_n_random = j.value("opt_n_random", c.opt_n_random);
  c.opt_n_refine = j.value("opt_n_refine", c.opt_n_refine);
  c.opt_refine_evals = j.value("opt_refine_evals", c.opt_refine_evals);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.tv_trace = j.value("tv_trace", c.tv_trace);
  c.tv_resolution = j.value("tv_resolution", c.tv_resolution);
  return c;
}

bool uses_grid(const RunConfig& config, int dim) {
  if (config.quadrature == "grid") return true;
  if (config.quadrature == "is") return false;
  return dim <= 2;
}

void hash_bytes(std::uint64_t& h, const double* data, std::ptrdiff_t n) {
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ull;
    }
  }
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (model.empty()) throw std::invalid_argument("config: model is required");
  if (oracle != "exact" && oracle != "sl")
    throw std::invalid_argument("config: oracle must be 'exact' or 'sl'");
  parse_criterion(criterion);
  if (batch_mode != "sequential" && batch_mode != "greedy" && batch_mode != "joint")
    throw std::invalid_argument("config: batch_mode must be sequential, greedy or joint");
  if (batch_size < 1) throw std::invalid_argument("config: batch_size >= 1");
  if (batch_mode == "sequential" && batch_size != 1)
    throw std::invalid_argument("config: sequential mode implies batch_size 1");
  if (initial_design < 1) throw std::invalid_argument("config: initial_design >= 1");
  if (iter_max < 0) throw std::invalid_argument("config: iter_max >= 0");
  if (quadrature != "auto" && quadrature != "grid" && quadrature != "is")
    throw std::invalid_argument("config: quadrature must be auto, grid or is");
  if (grid_resolution < 2) throw std::invalid_argument("config: grid_resolution >= 2");
  if (is_points < 10) throw std::invalid_argument("config: is_points >= 10");
  if (mcmc_samples < 1) throw std::invalid_argument("config: mcmc_samples >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers >= 1");
  if (!(exact_noise_std >= 0)) throw std::invalid_argument("config: exact_noise_std >= 0");
}

CriterionKind RunConfig::criterion_kind() const { return parse_criterion(criterion); }

std::string run_config_to_json(const RunConfig& config) {
  return config_to_json_obj(config).dump(2);
}

RunConfig run_config_from_json(const std::string& json_text) {
  return config_from_json_obj(json::parse(json_text));
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return run_config_from_json(buf.str());
}

Problem make_problem(const RunConfig& config) {
  config.validate();
  Problem prob;
  if (config.oracle == "exact") {
    const ToyName toy = parse_toy(config.model);
    prob.prior = LogPrior::uniform(toy_box(toy));
    prob.exact_loglik = [toy](const Eigen::VectorXd& t) { return toy_logpdf(toy, t); };
    prob.oracle =
        std::make_unique<ExactPlusNoise>(prob.exact_loglik, config.exact_noise_std);
  } else {
    const SimulatorSpec& spec = find_simulator(config.model);
    prob.prior = LogPrior::uniform(spec.domain);
    prob.true_theta = spec.true_theta;
    const Eigen::VectorXd observed =
        spec.summaries(spec.true_theta, mix_seed(config.seed, kDataTag));
    prob.oracle = std::make_unique<SyntheticLikelihood>(spec.summaries, observed,
                                                        config.n_repeats, config.n_boot);
  }
  return prob;
}

std::uint64_t training_set_hash(const TrainingSet& train) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  // row-major over locations so the hash is layout-independent
  for (int i = 0; i < train.size(); ++i)
    for (int j = 0; j < train.dim(); ++j) {
      const double v = train.locations(i, j);
      hash_bytes(h, &v, 1);
    }
  hash_bytes(h, train.values.data(), train.values.size());
  hash_bytes(h, train.noise_std.data(), train.noise_std.size());
  return h;
}

namespace {

struct IterationOutcome {
  FitResult fit;
  DesignResult design;
  std::vector<NoisyEvaluation> evals;
  double tv = kNaN;
};

class Runner {
 public:
  Runner(const RunConfig& config)
      : config_(config),
        problem_(make_problem(config)),
        pool_(config.workers),
        basis_(BasisConfig::quadratic(problem_.prior.dim())) {}

  RunResult run() {
    const Box& box = problem_.prior.box();
    result_.training = TrainingSet(box.dim());
    result_.final_noise_std = kNaN;

    if (!initial_design()) return result_;

    for (int iter = 1; iter <= config_.iter_max; ++iter) {
      const auto t0 = std::chrono::steady_clock::now();
      IterationOutcome out;
      if (!with_retry([&](int attempt) { out = run_iteration(iter, attempt); },
                      "iteration " + std::to_string(iter)))
        return result_;

      for (const NoisyEvaluation& ev : out.evals)
        result_.training.append(ev.theta, ev.y, ev.noise_std);
      warm_start_ = out.fit.log_point;

      IterationRecord rec;
      rec.iteration = iter;
      rec.n_evals = result_.training.size();
      rec.criterion_value = out.design.criterion_value;
      rec.hyper = out.fit.hyper;
      rec.fitted_noise_std = out.fit.noise_std ? *out.fit.noise_std : kNaN;
      rec.tv = out.tv;
      rec.training_hash = training_set_hash(result_.training);
      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      result_.iterations.push_back(rec);
      result_.designs.push_back(out.design.batch);
      result_.completed_iterations = iter;
    }

    FitResult final_fit;
    if (!with_retry(
            [&](int attempt) { final_fit = fit_surrogate(config_.iter_max + 1, attempt); },
            "final fit"))
      return result_;
    result_.final_hyper = final_fit.hyper;
    result_.final_noise_std = final_fit.noise_std ? *final_fit.noise_std : kNaN;

    const GpModel model = build_model(final_fit);
    McmcConfig mc;
    mc.chains = config_.mcmc_chains;
    mc.seed = mix_seed(config_.seed, kFinalMcmcTag);
    result_.chain = sample_point_posterior(model, problem_.prior,
                                           PointEstimatorKind::Median,
                                           config_.mcmc_samples, mc);
    if (!config_.out_dir.empty()) persist_run(config_, result_);
    return result_;
  }

 private:
  // false: aborted (partial result persisted)
  bool with_retry(const std::function<void(int)>& step, const std::string& what) {
    try {
      step(0);
      return true;
    } catch (const std::exception& first) {
      try {
        step(1);
        return true;
      } catch (const std::exception& second) {
        result_.aborted = true;
        result_.abort_reason = what + " failed twice: first [" + first.what() +
                               "], retry [" + second.what() + "]";
        if (!config_.out_dir.empty()) {
          try {
            persist_run(config_, result_);
          } catch (const std::exception& persist) {
            result_.abort_reason += "; persisting also failed [" + std::string(persist.what()) + "]";
          }
        }
        return false;
      }
    }
  }

  bool initial_design() {
    Rng rng(mix_seed(config_.seed, kInitDesignTag));
    Eigen::MatrixXd points(config_.initial_design, problem_.prior.dim());
    for (int i = 0; i < points.rows(); ++i)
      points.row(i) = problem_.prior.sample(rng);

    std::vector<NoisyEvaluation> evals;
    const bool ok = with_retry(
        [&](int attempt) {
          std::vector<EvalTask> tasks;
          tasks.reserve(points.rows());
          for (int i = 0; i < points.rows(); ++i)
            tasks.push_back({points.row(i).transpose(), task_seed(0, i, attempt)});
          evals = dispatch_batch(*problem_.oracle, tasks, &pool_);
        },
        "initial design");
    if (!ok) return false;
    for (const NoisyEvaluation& ev : evals)
      result_.training.append(ev.theta, ev.y, ev.noise_std);
    return true;
  }

  std::uint64_t task_seed(int iteration, int batch_index, int attempt) const {
    const std::uint64_t base =
        mix_seed(config_.seed, static_cast<std::uint64_t>(iteration),
                 static_cast<std::uint64_t>(batch_index));
    return attempt == 0 ? base : mix_seed(base, kRetryTag);
  }

  FitResult fit_surrogate(int iteration, int attempt) {
    FitOptions opts;
    opts.restarts = config_.fit_restarts;
    opts.max_evals = config_.fit_max_evals;
    opts.seed = mix_seed(config_.seed, static_cast<std::uint64_t>(iteration), kFitTag,
                         static_cast<std::uint64_t>(attempt));
    opts.estimate_noise = config_.estimate_noise;
    opts.warm_start = warm_start_;
    const Box& box = problem_.prior.box();
    const HyperPriorConfig hp = HyperPriorConfig::defaults(result_.training, box);
    const Box bounds = default_fit_bounds(result_.training, box, config_.estimate_noise);
    return fit_map(result_.training, basis_, bounds, opts, hp);
  }

  GpModel build_model(const FitResult& fit) const {
    TrainingSet train = result_.training;
    if (config_.estimate_noise && fit.noise_std)
      train.noise_std.setConstant(*fit.noise_std);
    return GpModel(train, fit.hyper, basis_);
  }

  IterationOutcome run_iteration(int iter, int attempt) {
    IterationOutcome out;
    out.fit = fit_surrogate(iter, attempt);
    const GpModel model = build_model(out.fit);
    const Box& box = problem_.prior.box();
    const CriterionKind kind = config_.criterion_kind();

    std::optional<WeightedPointSet> quad;
    if (is_integrated(kind)) {
      if (uses_grid(config_, box.dim())) {
        quad = grid_points(box, config_.grid_resolution);
      } else {
        ImportanceConfig ic;
        ic.n_points = config_.is_points;
        ic.chains = config_.is_chains;
        ic.burn = config_.is_burn;
        ic.keep = config_.is_keep;
        ic.seed = mix_seed(config_.seed, static_cast<std::uint64_t>(iter), kQuadTag,
                           static_cast<std::uint64_t>(attempt));
        quad = importance_points(model, problem_.prior, kind, ic);
      }
    }

    CriterionContext ctx;
    ctx.model = &model;
    ctx.prior = &problem_.prior;
    ctx.quad = quad ? &*quad : nullptr;
    ctx.kind = kind;

    OptimizerConfig oc;
    oc.n_random = config_.opt_n_random;
    oc.n_refine = config_.opt_n_refine;
    oc.refine_evals = config_.opt_refine_evals;
    oc.seed = mix_seed(config_.seed, static_cast<std::uint64_t>(iter), kDesignTag,
                       static_cast<std::uint64_t>(attempt));

    if (config_.batch_mode == "sequential")
      out.design = optimize_sequential(ctx, oc);
    else if (config_.batch_mode == "greedy")
      out.design = optimize_greedy_batch(ctx, config_.batch_size, oc);
    else
      out.design = optimize_joint_batch(ctx, config_.batch_size, oc);

    if (config_.tv_trace && problem_.exact_loglik && box.dim() == 2) {
      const auto estimate = [&](const Eigen::VectorXd& t) {
        return point_posterior_logpdf(model, problem_.prior, PointEstimatorKind::Median, t);
      };
      const auto target = [&](const Eigen::VectorXd& t) {
        return problem_.prior.log_pdf(t) + problem_.exact_loglik(t);
      };
      out.tv = tv_grid(target, estimate, box, config_.tv_resolution);
    }

    std::vector<EvalTask> tasks;
    tasks.reserve(out.design.batch.size());
    for (int j = 0; j < out.design.batch.size(); ++j)
      tasks.push_back(
          {out.design.batch.points.row(j).transpose(), task_seed(iter, j, attempt)});
    out.evals = dispatch_batch(*problem_.oracle, tasks, &pool_);
    return out;
  }

  RunConfig config_;
  Problem problem_;
  WorkerPool pool_;
  BasisConfig basis_;
  RunResult result_;
  std::optional<Eigen::VectorXd> warm_start_;
};

}  // namespace

RunResult run_inference(const RunConfig& config) {
  config.validate();
  Runner runner(config);
  return runner.run();
}

GpModel rebuild_final_model(const RunConfig& config, const RunResult& result) {
  TrainingSet train = result.training;
  if (config.estimate_noise && std::isfinite(result.final_noise_std))
    train.noise_std.setConstant(result.final_noise_std);
  return GpModel(train, result.final_hyper, BasisConfig::quadratic(train.dim()));
}

void persist_run(const RunConfig& config, const RunResult& result) {
  namespace fs = std::filesystem;
  if (config.out_dir.empty()) throw std::invalid_argument("persist_run: out_dir not set");
  fs::create_directories(config.out_dir);
  const fs::path dir(config.out_dir);

  write_training_csv((dir / "training.csv").string(), result.training);
  if (result.chain.samples.rows() > 0)
    write_samples_csv((dir / "samples.csv").string(), result.chain.samples,
                      result.chain.log_density);

  {
    std::ofstream out(dir / "iterations.csv");
    if (!out) throw std::invalid_argument("cannot write iterations.csv");
    const int d = result.training.dim();
    out << "iter,n_evals,criterion_value,signal_var";
    for (int j = 0; j < d; ++j) out << ",lengthscale_" << j;
    out << ",fitted_noise_std,tv,training_hash,wall_ms\n";
    for (const IterationRecord& rec : result.iterations) {
      out << rec.iteration << ',' << rec.n_evals << ','
          << format_double(rec.criterion_value) << ','
          << format_double(rec.hyper.signal_var);
      for (int j = 0; j < d; ++j) out << ',' << format_double(rec.hyper.lengthscales[j]);
      out << ',' << format_double(rec.fitted_noise_std) << ',' << format_double(rec.tv)
          << ',' << hex64(rec.training_hash) << ',' << format_double(rec.wall_ms) << '\n';
    }
  }

  json manifest;
  manifest["config"] = json::parse(run_config_to_json(config));
  manifest["version"] = "0.1.0";
  manifest["aborted"] = result.aborted;
  manifest["abort_reason"] = result.abort_reason;
  manifest["completed_iterations"] = result.completed_iterations;
  manifest["training_hash"] = hex64(training_set_hash(result.training));
  manifest["chain_acceptance_rate"] = result.chain.acceptance_rate;
  if (result.final_hyper.lengthscales.size() > 0)
    manifest["final_hyper"] = hyper_to_json(result.final_hyper);
  if (std::isfinite(result.final_noise_std))
    manifest["final_noise_std"] = result.final_noise_std;

  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::invalid_argument("cannot write manifest.json");
  out << manifest.dump(2) << '\n';
}

RunResult load_run(const std::string& dir, RunConfig* config) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  std::ifstream in(base / "manifest.json");
  if (!in) throw std::invalid_argument("cannot open manifest.json in '" + dir + "'");
  json manifest = json::parse(in);

  if (config) *config = config_from_json_obj(manifest.at("config"));

  RunResult result;
  result.training = read_training_csv((base / "training.csv").string());
  result.aborted = manifest.value("aborted", false);
  result.abort_reason = manifest.value("abort_reason", std::string());
  result.completed_iterations = manifest.value("completed_iterations", 0);
  result.final_noise_std = manifest.value("final_noise_std", kNaN);
  if (manifest.contains("final_hyper"))
    result.final_hyper = hyper_from_json(manifest.at("final_hyper"));
  if (fs::exists(base / "samples.csv")) {
    Eigen::VectorXd logd;
    result.chain.samples = read_samples_csv((base / "samples.csv").string(), &logd);
    result.chain.log_density = logd;
  }
  return result;
}

}  // namespace gpsl
