#include "gpsl/batch_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gpsl/errors.hpp"
#include "gpsl/math.hpp"
#include "gpsl/nelder_mead.hpp"

namespace gpsl {

namespace {

constexpr int kChunk = 256;

// NaN and +-inf criterion values mean the candidate is unusable (degenerate
// integrand, zero prior); map them to +inf so they sort last and are never
// selected.
void discard_nonfinite(Eigen::VectorXd& values) {
  for (int i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) values[i] = std::numeric_limits<double>::infinity();
}

// indices of the k smallest values, ties in first-found order
std::vector<int> best_indices(const Eigen::VectorXd& values, int k) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  if (static_cast<int>(idx.size()) > k) idx.resize(k);
  return idx;
}

Eigen::MatrixXd draw_candidates(const LogPrior& prior, Rng& rng, int n) {
  Eigen::MatrixXd X(n, prior.dim());
  for (int i = 0; i < n; ++i)
    X.row(i) = (prior.can_sample() ? prior.sample(rng) : prior.box().sample(rng)).transpose();
  return X;
}

void check_not_worse_than_empty(const CriterionEvaluator& ev, double value) {
  if (!ev.empty_loss()) return;
  const double empty = *ev.empty_loss();
  if (value > empty + 1e-8 * (1.0 + std::abs(empty)))
    throw NumericalError("design criterion of the chosen batch exceeds the empty-batch loss");
}

}  // namespace

DesignResult optimize_greedy_batch(const CriterionContext& ctx, int batch_size,
                                   const OptimizerConfig& cfg,
                                   const Eigen::MatrixXd& extra_pool) {
  if (batch_size < 1) throw std::invalid_argument("optimize_greedy_batch: batch_size >= 1");
  if (cfg.n_random < 1) throw std::invalid_argument("optimizer: n_random >= 1");
  if (extra_pool.size() > 0 && extra_pool.cols() != ctx.model->dim())
    throw std::invalid_argument("optimizer: extra_pool dimension mismatch");

  CriterionEvaluator ev(ctx);
  const Box& box = ctx.prior->box();
  Rng rng(cfg.seed);

  DesignResult res;
  res.batch = Batch::empty(ctx.model->dim());

  for (int stage = 0; stage < batch_size; ++stage) {
    Eigen::MatrixXd cand(cfg.n_random + extra_pool.rows() + stage, box.dim());
    cand.topRows(cfg.n_random) = draw_candidates(*ctx.prior, rng, cfg.n_random);
    if (extra_pool.rows() > 0)
      cand.middleRows(cfg.n_random, extra_pool.rows()) = extra_pool;
    for (int j = 0; j < stage; ++j)
      cand.row(cfg.n_random + extra_pool.rows() + j) = res.batch.points.row(j);

    Eigen::VectorXd values(cand.rows());
    for (int off = 0; off < cand.rows(); off += kChunk) {
      const int len = std::min<int>(kChunk, static_cast<int>(cand.rows()) - off);
      Eigen::VectorXd chunk;
      ev.candidate_value_block(cand.middleRows(off, len), chunk);
      values.segment(off, len) = chunk;
    }
    discard_nonfinite(values);

    double best_value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    for (int i : best_indices(values, std::max(cfg.n_refine, 1))) {
      if (values[i] < best_value) {  // the start itself counts
        best_value = values[i];
        best_x = cand.row(i).transpose();
      }
      if (cfg.refine_evals <= 1 || !std::isfinite(values[i])) continue;
      NelderMeadOptions nm;
      nm.max_evals = cfg.refine_evals;
      const NelderMeadResult r = nelder_mead_box(
          [&](const Eigen::VectorXd& x) { return ev.candidate_value(x); }, box,
          cand.row(i).transpose(), nm);
      if (std::isfinite(r.value) && r.value < best_value) {
        best_value = r.value;
        best_x = r.x;
      }
    }
    if (!best_x.size())
      throw NumericalError("optimizer found no finite criterion value");

    res.stage_values.push_back(best_value);
    res.batch.append(best_x, ctx.pending_noise_std);
    ev.push_pending(best_x);
  }

  if (is_integrated(ctx.kind)) {
    res.criterion_value = ev.pending_loss();
    check_not_worse_than_empty(ev, res.criterion_value);
  } else {
    res.criterion_value = -res.stage_values.back();
  }
  return res;
}

DesignResult optimize_sequential(const CriterionContext& ctx, const OptimizerConfig& cfg,
                                 const Eigen::MatrixXd& extra_pool) {
  return optimize_greedy_batch(ctx, 1, cfg, extra_pool);
}

DesignResult optimize_joint_batch(const CriterionContext& ctx, int batch_size,
                                  const OptimizerConfig& cfg,
                                  const std::vector<Batch>& extra_batches) {
  if (!is_integrated(ctx.kind))
    throw std::invalid_argument("optimize_joint_batch: integrated criteria only");
  if (batch_size < 1) throw std::invalid_argument("optimize_joint_batch: batch_size >= 1");
  const int d = ctx.model->dim();
  if (d * batch_size > 12)
    throw std::invalid_argument(
        "optimize_joint_batch: dimension * batch_size exceeds 12; use the greedy mode");

  CriterionEvaluator ev(ctx);
  const Box& box = ctx.prior->box();
  Rng rng(cfg.seed);

  auto batch_from_flat = [&](const Eigen::VectorXd& flat) {
    Batch b = Batch::empty(d);
    for (int j = 0; j < batch_size; ++j)
      b.append(flat.segment(j * d, d), ctx.pending_noise_std);
    return b;
  };
  auto loss_of_flat = [&](const Eigen::VectorXd& flat) {
    ev.reset_pending();
    for (int j = 0; j < batch_size; ++j)
      ev.push_pending(flat.segment(j * d, d));
    return ev.pending_loss();
  };

  std::vector<Eigen::VectorXd> cands;
  cands.reserve(cfg.n_random + extra_batches.size());
  for (int i = 0; i < cfg.n_random; ++i) {
    Eigen::VectorXd flat(d * batch_size);
    for (int j = 0; j < batch_size; ++j)
      flat.segment(j * d, d) = ctx.prior->can_sample() ? ctx.prior->sample(rng)
                                                       : box.sample(rng);
    cands.push_back(std::move(flat));
  }
  for (const Batch& b : extra_batches) {
    if (b.size() != batch_size || b.dim() != d) continue;
    Eigen::VectorXd flat(d * batch_size);
    for (int j = 0; j < batch_size; ++j) flat.segment(j * d, d) = b.points.row(j);
    cands.push_back(std::move(flat));
  }

  Eigen::VectorXd values(cands.size());
  for (size_t i = 0; i < cands.size(); ++i) values[i] = loss_of_flat(cands[i]);
  discard_nonfinite(values);

  Eigen::VectorXd lo(d * batch_size), up(d * batch_size);
  for (int j = 0; j < batch_size; ++j) {
    lo.segment(j * d, d) = box.lower;
    up.segment(j * d, d) = box.upper;
  }
  const Box product_box(lo, up);

  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_flat;
  for (int i : best_indices(values, std::max(cfg.n_refine, 1))) {
    if (values[i] < best_value) {
      best_value = values[i];
      best_flat = cands[i];
    }
    if (cfg.refine_evals <= 1 || !std::isfinite(values[i])) continue;
    NelderMeadOptions nm;
    nm.max_evals = cfg.refine_evals;
    const NelderMeadResult r = nelder_mead_box(loss_of_flat, product_box, cands[i], nm);
    if (std::isfinite(r.value) && r.value < best_value) {
      best_value = r.value;
      best_flat = r.x;
    }
  }
  if (!best_flat.size()) throw NumericalError("optimizer found no finite criterion value");

  DesignResult res;
  res.batch = batch_from_flat(best_flat);
  res.criterion_value = best_value;
  res.stage_values.push_back(best_value);
  check_not_worse_than_empty(ev, best_value);
  return res;
}

}  // namespace gpsl
