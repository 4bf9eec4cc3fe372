#include "gpsl/fit.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gpsl/covariance.hpp"
#include "gpsl/nelder_mead.hpp"

namespace gpsl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double value_sd(const Eigen::VectorXd& y) {
  if (y.size() < 2) return 1.0;
  const double m = y.mean();
  const double v = (y.array() - m).square().sum() / (y.size() - 1);
  return std::sqrt(std::max(v, 1e-16));
}

double log_normal_logpdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}
}  // namespace

HyperPriorConfig HyperPriorConfig::defaults(const TrainingSet& train, const Box& domain) {
  HyperPriorConfig hp;
  const double s = value_sd(train.values);
  hp.sf_log_median = std::log(s);
  hp.len_log_median = (domain.sides() / 4.0).array().log();
  hp.noise_log_median = std::log(std::max(s / 10.0, 1e-3));
  return hp;
}

Box default_fit_bounds(const TrainingSet& train, const Box& domain, bool estimate_noise) {
  const int d = domain.dim();
  const double s = value_sd(train.values);
  const int n = 1 + d + (estimate_noise ? 1 : 0);
  Eigen::VectorXd lo(n), up(n);
  lo[0] = std::log(1e-3 * s);
  up[0] = std::log(1e3 * s);
  for (int i = 0; i < d; ++i) {
    const double side = std::max(domain.side(i), 1e-12);
    lo[1 + i] = std::log(1e-2 * side);
    up[1 + i] = std::log(10.0 * side);
  }
  if (estimate_noise) {
    lo[n - 1] = std::log(1e-6);
    up[n - 1] = std::log(std::max(10.0 * s, 1e-5));
  }
  return Box(lo, up);
}

double fit_objective(const TrainingSet& train, const BasisConfig& basis,
                     const HyperPriorConfig& hp, const Eigen::VectorXd& log_point,
                     bool estimate_noise) {
  const int d = train.dim();
  const int t = train.size();
  if (log_point.size() != 1 + d + (estimate_noise ? 1 : 0))
    throw std::invalid_argument("fit_objective: log_point size mismatch");

  GpHyperparams hyper;
  const double sf = std::exp(log_point[0]);
  hyper.signal_var = sf * sf;
  hyper.lengthscales = log_point.segment(1, d).array().exp();

  Eigen::VectorXd sn = train.noise_std;
  if (estimate_noise) sn.setConstant(std::exp(log_point[1 + d]));
  sn = sn.cwiseMax(kNoiseFloor);

  // y ~ N(H b, K + diag(sn^2) + H diag(Bvar) H')
  Eigen::MatrixXd K = se_covariance(hyper, train.locations, train.locations);
  K.diagonal() += sn.cwiseProduct(sn);
  const Eigen::MatrixXd H = BasisConfig::rows(train.locations);
  K.noalias() += H * basis.coef_var.asDiagonal() * H.transpose();

  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return -kInf;
  const Eigen::VectorXd r = train.values - H * basis.coef_mean;
  const Eigen::VectorXd w = llt.matrixL().solve(r);
  double logml = -0.5 * w.squaredNorm() - 0.5 * t * std::log(2.0 * M_PI);
  logml -= Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();

  double logprior = log_normal_logpdf(log_point[0], hp.sf_log_median, hp.sf_log_sd);
  for (int i = 0; i < d; ++i)
    logprior += log_normal_logpdf(log_point[1 + i], hp.len_log_median[i], hp.len_log_sd);
  if (estimate_noise)
    logprior += log_normal_logpdf(log_point[1 + d], hp.noise_log_median, hp.noise_log_sd);

  const double v = logml + logprior;
  return std::isfinite(v) ? v : -kInf;
}

FitResult fit_map(const TrainingSet& train, const BasisConfig& basis,
                  const Box& log_bounds, const FitOptions& opts,
                  const HyperPriorConfig& hp) {
  const int d = train.dim();
  const int n = 1 + d + (opts.estimate_noise ? 1 : 0);
  if (log_bounds.dim() != n)
    throw std::invalid_argument("fit_map: bounds dimension mismatch");
  if (train.size() < 1) throw std::invalid_argument("fit_map: empty training set");

  // track the best point seen anywhere, as the fallback
  Eigen::VectorXd best_x = log_bounds.center();
  double best_f = -kInf;
  auto neg_obj = [&](const Eigen::VectorXd& x) {
    const double v = fit_objective(train, basis, hp, x, opts.estimate_noise);
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
    return -v;
  };

  std::vector<Eigen::VectorXd> starts;
  if (opts.warm_start) starts.push_back(log_bounds.clamp(*opts.warm_start));
  Rng rng(opts.seed);
  const int n_lhs = std::max(opts.restarts - static_cast<int>(starts.size()), 0);
  if (n_lhs > 0) {
    const Eigen::MatrixXd lhs = log_bounds.latin_hypercube(rng, n_lhs);
    for (int i = 0; i < n_lhs; ++i) starts.push_back(lhs.row(i).transpose());
  }

  NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  double best_nm = kInf;
  Eigen::VectorXd best_nm_x;
  for (const auto& s : starts) {
    const NelderMeadResult r = nelder_mead_box(neg_obj, log_bounds, s, nm);
    if (r.value < best_nm) {
      best_nm = r.value;
      best_nm_x = r.x;
    }
  }

  FitResult res;
  if (std::isfinite(best_nm)) {
    res.converged = true;
    res.log_point = best_nm_x;
    res.objective = -best_nm;
  } else {
    res.converged = false;
    res.log_point = best_x;
    res.objective = best_f;
  }
  const double sf = std::exp(res.log_point[0]);
  res.hyper.signal_var = sf * sf;
  res.hyper.lengthscales = res.log_point.segment(1, d).array().exp();
  if (opts.estimate_noise) res.noise_std = std::exp(res.log_point[1 + d]);
  return res;
}

}  // namespace gpsl
