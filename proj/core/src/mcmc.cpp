#include "gpsl/mcmc.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gpsl/errors.hpp"

namespace gpsl {

Chain adaptive_metropolis(const LogDensity& logpdf, const Box& box,
                          const Eigen::VectorXd& x0, int n_steps,
                          const McmcConfig& cfg, std::uint64_t seed) {
  const int d = box.dim();
  if (!box.contains(x0))
    throw std::invalid_argument("adaptive_metropolis: start point outside the box");

  Chain chain;
  chain.seed = seed;
  chain.samples.resize(n_steps, d);
  chain.log_density.resize(n_steps);
  if (n_steps == 0) return chain;

  double lp = logpdf(x0);
  if (std::isnan(lp))
    throw NumericalError("log-density is NaN at " + format_point(x0));
  if (lp == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("adaptive_metropolis: start point has zero density");

  Eigen::MatrixXd Lprop = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    Lprop(i, i) = std::max(cfg.initial_step_frac * box.side(i), 1e-12);

  // running mean and scatter for the adapted covariance
  Eigen::VectorXd x = x0;
  Eigen::VectorXd mu = x0;
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  long n_seen = 1;

  const double sd = 2.38 * 2.38 / d;
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  long accepted = 0;
  Eigen::VectorXd z(d), prop(d);
  for (int step = 0; step < n_steps; ++step) {
    for (int i = 0; i < d; ++i) z[i] = normal(rng);
    prop = x + Lprop * z;
    const double u = unif(rng);
    if (box.contains(prop)) {
      const double lp_prop = logpdf(prop);
      if (std::isnan(lp_prop))
        throw NumericalError("log-density is NaN at " + format_point(prop));
      if (std::log(u) < lp_prop - lp) {
        x = prop;
        lp = lp_prop;
        ++accepted;
      }
    }
    chain.samples.row(step) = x.transpose();
    chain.log_density[step] = lp;

    ++n_seen;
    const Eigen::VectorXd delta = x - mu;
    mu += delta / n_seen;
    scatter.noalias() += delta * (x - mu).transpose();

    if (step + 1 >= cfg.adapt_start && n_seen > 2) {
      Eigen::MatrixXd C = sd * (scatter / (n_seen - 1));
      C.diagonal().array() += sd * cfg.adapt_reg;
      Eigen::LLT<Eigen::MatrixXd> llt(C);
      if (llt.info() == Eigen::Success) Lprop = llt.matrixL();
    }
  }
  chain.acceptance_rate = static_cast<double>(accepted) / n_steps;
  return chain;
}

double point_posterior_logpdf(const GpModel& model, const LogPrior& prior,
                              PointEstimatorKind kind, const Eigen::VectorXd& theta) {
  const double logpi = prior.log_pdf(theta);
  if (logpi == -std::numeric_limits<double>::infinity()) return logpi;
  double v = logpi + model.mean_at(theta);
  if (kind == PointEstimatorKind::Mean) v += 0.5 * model.var_at(theta);
  return v;
}

// best distinct training locations by target density, padded with the best
std::vector<Eigen::VectorXd> best_training_starts(const GpModel& model,
                                                  const LogDensity& target, int k) {
  const Eigen::MatrixXd& X = model.train().locations;
  const int t = static_cast<int>(X.rows());
  std::vector<int> idx(t);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> val(t);
  for (int i = 0; i < t; ++i) val[i] = target(X.row(i).transpose());
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return val[a] > val[b]; });

  std::vector<int> out;
  for (int i : idx) {
    if (static_cast<int>(out.size()) == k) break;
    if (!std::isfinite(val[i])) continue;
    bool dup = false;
    for (int j : out) dup = dup || (X.row(i) - X.row(j)).norm() == 0.0;
    if (!dup) out.push_back(i);
  }
  if (out.empty())
    throw NumericalError("no finite-density training point to start a chain from");
  while (static_cast<int>(out.size()) < k) out.push_back(out.front());

  std::vector<Eigen::VectorXd> pts;
  pts.reserve(out.size());
  for (int i : out) pts.push_back(X.row(i).transpose());
  return pts;
}

Chain sample_point_posterior(const GpModel& model, const LogPrior& prior,
                             PointEstimatorKind kind, int n_samples,
                             const McmcConfig& cfg) {
  if (n_samples <= 0 || cfg.chains <= 0)
    throw std::invalid_argument("sample_point_posterior: need positive sample/chain counts");
  LogDensity target = [&](const Eigen::VectorXd& th) {
    return point_posterior_logpdf(model, prior, kind, th);
  };
  const std::vector<Eigen::VectorXd> starts =
      best_training_starts(model, target, cfg.chains);

  Chain out;
  out.seed = cfg.seed;
  out.samples.resize(n_samples, model.dim());
  out.log_density.resize(n_samples);
  long row = 0, total_steps = 0;
  double acc_steps = 0.0;
  for (int c = 0; c < cfg.chains; ++c) {
    const int kept = n_samples / cfg.chains + (c < n_samples % cfg.chains ? 1 : 0);
    if (kept == 0) continue;
    const int total = static_cast<int>(std::ceil(kept / (1.0 - cfg.burn_frac)));
    const Chain ch = adaptive_metropolis(target, prior.box(), starts[c], total, cfg,
                                         mix_seed(cfg.seed, 0x5eedULL, c));
    out.samples.middleRows(row, kept) = ch.samples.bottomRows(kept);
    out.log_density.segment(row, kept) = ch.log_density.tail(kept);
    row += kept;
    total_steps += total;
    acc_steps += ch.acceptance_rate * total;
  }
  out.acceptance_rate = total_steps > 0 ? acc_steps / total_steps : 0.0;
  return out;
}

}  // namespace gpsl
