#include "gpsl/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gpsl/math.hpp"
#include "gpsl/posterior_estimators.hpp"

namespace gpsl {

std::string criterion_name(CriterionKind k) {
  switch (k) {
    case CriterionKind::Eiv: return "eiv";
    case CriterionKind::Imiqr: return "imiqr";
    case CriterionKind::Maxv: return "maxv";
    case CriterionKind::Maxiqr: return "maxiqr";
  }
  return "?";
}

CriterionKind parse_criterion(const std::string& name) {
  if (name == "eiv") return CriterionKind::Eiv;
  if (name == "imiqr") return CriterionKind::Imiqr;
  if (name == "maxv") return CriterionKind::Maxv;
  if (name == "maxiqr") return CriterionKind::Maxiqr;
  throw std::invalid_argument("unknown criterion: " + name);
}

double WeightedPointSet::log_integral(const Eigen::VectorXd& log_values) const {
  if (log_values.size() != log_weight.size())
    throw std::invalid_argument("WeightedPointSet::log_integral: size mismatch");
  return log_volume + log_sum_exp(log_weight + log_values);
}

WeightedPointSet grid_points(const Box& box, const std::vector<int>& resolution) {
  const int d = box.dim();
  if (static_cast<int>(resolution.size()) != d)
    throw std::invalid_argument("grid_points: one resolution per dimension");
  if (!(box.volume() > 0.0))
    throw std::invalid_argument("grid_points: box has zero volume");
  double total_d = 1.0, log_cells = 0.0;
  for (int r : resolution) {
    if (r < 1) throw std::invalid_argument("grid_points: resolution must be >= 1");
    total_d *= r;
    log_cells += std::log(static_cast<double>(r));
  }
  if (total_d > 1e7)
    throw std::invalid_argument("grid_points: grid too large; use importance sampling");
  const long total = static_cast<long>(total_d);

  WeightedPointSet out;
  out.points.resize(total, d);
  out.log_weight = Eigen::VectorXd::Constant(total, -log_cells);
  out.log_volume = box.log_volume();

  std::vector<int> idx(d, 0);
  for (long r = 0; r < total; ++r) {
    for (int j = 0; j < d; ++j)
      out.points(r, j) = box.lower[j] + box.side(j) * ((idx[j] + 0.5) / resolution[j]);
    for (int j = d - 1; j >= 0; --j) {  // odometer, last dimension fastest
      if (++idx[j] < resolution[j]) break;
      idx[j] = 0;
    }
  }
  return out;
}

WeightedPointSet grid_points(const Box& box, int resolution) {
  return grid_points(box, std::vector<int>(box.dim(), resolution));
}

double loss_proposal_logpdf(const GpModel& model, const LogPrior& prior,
                            CriterionKind kind, const Eigen::VectorXd& theta) {
  const double logpi = prior.log_pdf(theta);
  if (logpi == -std::numeric_limits<double>::infinity()) return logpi;
  const double m = model.mean_at(theta);
  const double s = std::sqrt(model.var_at(theta));
  if (kind == CriterionKind::Eiv || kind == CriterionKind::Maxv)
    return log_unnorm_variance(logpi, m, s);
  return log_l1_risk_integrand(logpi, m, s);
}

WeightedPointSet importance_points(const GpModel& model, const LogPrior& prior,
                                   CriterionKind kind, const ImportanceConfig& cfg) {
  if (cfg.n_points < 1 || cfg.chains < 1)
    throw std::invalid_argument("importance_points: need positive counts");
  const long kept_total = static_cast<long>(cfg.chains) * cfg.keep;
  if (kept_total < cfg.n_points)
    throw std::invalid_argument("importance_points: chains*keep < n_points");

  LogDensity target = [&](const Eigen::VectorXd& th) {
    return loss_proposal_logpdf(model, prior, kind, th);
  };
  const std::vector<Eigen::VectorXd> starts =
      best_training_starts(model, target, cfg.chains);

  Eigen::MatrixXd pool(kept_total, model.dim());
  Eigen::VectorXd pool_logq(kept_total);
  double acc = 0.0;
  for (int c = 0; c < cfg.chains; ++c) {
    const Chain ch = adaptive_metropolis(target, prior.box(), starts[c],
                                         cfg.burn + cfg.keep, cfg.mcmc,
                                         mix_seed(cfg.seed, 0x15c4a1ULL, c));
    pool.middleRows(static_cast<long>(c) * cfg.keep, cfg.keep) =
        ch.samples.bottomRows(cfg.keep);
    pool_logq.segment(static_cast<long>(c) * cfg.keep, cfg.keep) =
        ch.log_density.tail(cfg.keep);
    acc += ch.acceptance_rate / cfg.chains;
  }

  WeightedPointSet out;
  out.log_volume = prior.box().log_volume();
  if (acc < cfg.min_acceptance) {
    // chains stuck: fall back to prior draws, which under the reciprocal
    // weighting reduce to uniform weights
    Rng rng(mix_seed(cfg.seed, 0xfa11bacULL));
    out.points = prior.box().sample_n(rng, cfg.n_points);
    out.log_weight =
        Eigen::VectorXd::Constant(cfg.n_points, -std::log(double(cfg.n_points)));
    out.fallback = true;
    return out;
  }

  out.points.resize(cfg.n_points, model.dim());
  out.log_weight.resize(cfg.n_points);
  for (int j = 0; j < cfg.n_points; ++j) {
    const long src = (static_cast<long>(j) * kept_total) / cfg.n_points;
    out.points.row(j) = pool.row(src);
    out.log_weight[j] = -pool_logq[src];
  }
  out.log_weight.array() -= log_sum_exp(out.log_weight);
  return out;
}

}  // namespace gpsl
