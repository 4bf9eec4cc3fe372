#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "gpsl/design_criteria.hpp"
#include "gpsl/math.hpp"
#include "gpsl/posterior_estimators.hpp"
#include "gpsl/quadrature.hpp"
#include "support/oracles.hpp"

using namespace gpsl;
using namespace gpsl::testing;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Setup {
  RandomInstance inst;
  GpModel model;
  LogPrior prior;
  WeightedPointSet quad;

  explicit Setup(std::uint64_t seed, int dim = 0, int t = 0, int res = 12)
      : inst(random_instance(seed, dim, t)),
        model(inst.train, inst.hyper, inst.basis),
        prior(LogPrior::uniform(inst.box)),
        quad(grid_points(inst.box, res)) {}

  CriterionContext ctx(CriterionKind kind) const {
    CriterionContext c;
    c.model = &model;
    c.prior = &prior;
    c.quad = &quad;
    c.kind = kind;
    return c;
  }
};

}  // namespace

TEST_CASE("empty-batch losses equal the current integrated losses") {
  for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
    const Setup s(seed, 2, 12);
    const Batch none = Batch::empty(2);

    Eigen::VectorXd mean, var;
    s.model.predict_marginal(s.quad.points, mean, var);
    Eigen::VectorXd logv(s.quad.size()), logiqr(s.quad.size());
    for (int i = 0; i < s.quad.size(); ++i) {
      const double logpi = s.prior.log_pdf(s.quad.points.row(i).transpose());
      const double sd = std::sqrt(var[i]);
      logv[i] = log_unnorm_variance(logpi, mean[i], sd);
      logiqr[i] = log_iqr_width(logpi, mean[i], sd, 0.6744897501960817);
    }

    CHECK(eiv_loss(s.ctx(CriterionKind::Eiv), none) ==
          doctest::Approx(s.quad.log_integral(logv)).epsilon(1e-12));
    CHECK(imiqr_loss(s.ctx(CriterionKind::Imiqr), none) ==
          doctest::Approx(s.quad.log_integral(logiqr)).epsilon(1e-12));
  }
}

TEST_CASE("integrated losses are monotone and permutation invariant") {
  for (std::uint64_t seed = 900; seed < 1000; ++seed) {
    const Setup s(seed, 0, 0, 8);
    const int d = s.inst.box.dim();
    const Batch big = random_batch(s.inst, mix_seed(seed, 1), 3);
    Batch small = Batch::empty(d);
    small.append(big.points.row(0).transpose(), big.noise_std[0]);
    small.append(big.points.row(1).transpose(), big.noise_std[1]);
    Batch flipped = Batch::empty(d);
    for (int i = big.size() - 1; i >= 0; --i)
      flipped.append(big.points.row(i).transpose(), big.noise_std[i]);

    for (CriterionKind kind : {CriterionKind::Eiv, CriterionKind::Imiqr}) {
      const CriterionContext ctx = s.ctx(kind);
      auto loss = [&](const Batch& b) {
        return kind == CriterionKind::Eiv ? eiv_loss(ctx, b) : imiqr_loss(ctx, b);
      };
      const double l0 = loss(Batch::empty(d));
      const double l_small = loss(small);
      const double l_big = loss(big);
      const double tol = 1e-12 * (1.0 + std::abs(l_big));
      CHECK(l_small <= l0 + tol);
      CHECK(l_big <= l_small + tol);
      CHECK(std::abs(loss(flipped) - l_big) <= 1e-12 * (1.0 + std::abs(l_big)));
    }
  }
}

TEST_CASE("eiv matches the refit Monte-Carlo expectation") {
  // cheap version of the acceptance oracle: average the post-batch integrated
  // variance over simulated observation vectors
  const Setup s(31, 2, 30, 10);
  const CriterionContext ctx = s.ctx(CriterionKind::Eiv);
  const Batch batch = random_batch(s.inst, 32, 2);
  const double predicted = std::exp(eiv_loss(ctx, batch));

  // the sample mean of exp(2 m') only converges at a usable rate when the
  // refit means are tightly distributed, so the instance must be trained
  // densely enough to pin tau^2 down; enforce that as a design precondition
  {
    LookaheadEvaluator ev(s.model, s.quad.points);
    for (int i = 0; i < batch.size(); ++i)
      ev.push_pending(batch.points.row(i).transpose(), batch.noise_std[i]);
    REQUIRE(ev.pending_tau2().maxCoeff() < 0.5);
  }

  Rng rng(33);
  const int n = 1500;
  std::vector<double> integrals;
  integrals.reserve(n);
  Eigen::VectorXd logv(s.quad.size());
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd ystar = sample_batch_observations(s.model, batch, rng);
    TrainingSet aug = s.inst.train;
    for (int i = 0; i < batch.size(); ++i)
      aug.append(batch.points.row(i).transpose(), ystar[i], batch.noise_std[i]);
    const GpModel refit(aug, s.inst.hyper, s.inst.basis);
    Eigen::VectorXd mean, var;
    refit.predict_marginal(s.quad.points, mean, var);
    for (int i = 0; i < s.quad.size(); ++i)
      logv[i] = log_unnorm_variance(s.prior.log_pdf(s.quad.points.row(i).transpose()),
                                    mean[i], std::sqrt(var[i]));
    integrals.push_back(std::exp(s.quad.log_integral(logv)));
  }
  const MeanSe ms = mean_se(integrals);
  CHECK(std::abs(predicted - ms.mean) < 4.0 * ms.se);
}

TEST_CASE("imiqr matches the pointwise median of refit widths") {
  const Setup s(41, 2, 8, 6);
  const CriterionContext ctx = s.ctx(CriterionKind::Imiqr);
  const Batch batch = random_batch(s.inst, 42, 2);

  Rng rng(43);
  const int n = 1501;
  std::vector<std::vector<double>> widths(s.quad.size());
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd ystar = sample_batch_observations(s.model, batch, rng);
    TrainingSet aug = s.inst.train;
    for (int i = 0; i < batch.size(); ++i)
      aug.append(batch.points.row(i).transpose(), ystar[i], batch.noise_std[i]);
    const GpModel refit(aug, s.inst.hyper, s.inst.basis);
    Eigen::VectorXd mean, var;
    refit.predict_marginal(s.quad.points, mean, var);
    for (int i = 0; i < s.quad.size(); ++i)
      widths[i].push_back(log_iqr_width(
          s.prior.log_pdf(s.quad.points.row(i).transpose()), mean[i],
          std::sqrt(var[i]), ctx.iqr_u));
  }

  // the predicted integrand at each quad point is the median over y* of the
  // refit width; compare on the log scale with a distribution-free band
  LookaheadEvaluator ev(s.model, s.quad.points);
  for (int i = 0; i < batch.size(); ++i)
    ev.push_pending(batch.points.row(i).transpose(), batch.noise_std[i]);
  int checked = 0;
  for (int i = 0; i < s.quad.size(); ++i) {
    const double logpi = s.prior.log_pdf(s.quad.points.row(i).transpose());
    const double la = std::max(ev.var()[i] - ev.pending_tau2()[i], 0.0);
    const double predicted =
        log_iqr_width(logpi, ev.mean()[i], std::sqrt(la), ctx.iqr_u);
    std::vector<double>& w = widths[i];
    std::sort(w.begin(), w.end());
    // order-statistic 99.9% band for the median
    const double z = 3.29;
    const int lo = static_cast<int>(n / 2 - z * std::sqrt(n / 4.0));
    const int hi = static_cast<int>(n / 2 + z * std::sqrt(n / 4.0));
    CHECK(predicted >= w[lo]);
    CHECK(predicted <= w[hi]);
    ++checked;
  }
  CHECK(checked == s.quad.size());
}

TEST_CASE("pointwise variance objective") {
  const Setup s(51, 1, 9);
  const CriterionContext ctx = s.ctx(CriterionKind::Maxv);
  Rng rng(52);
  for (int i = 0; i < 30; ++i) {
    const Eigen::VectorXd x = s.inst.box.sample(rng);
    const double want = log_unnorm_variance(
        s.prior.log_pdf(x), s.model.mean_at(x), std::sqrt(s.model.var_at(x)));
    CHECK(maxv_objective(ctx, x) == doctest::Approx(want).epsilon(1e-12));
  }

  // dense-grid argmax agrees with an oracle-GP evaluation of the same score
  const OracleGp oracle(s.inst.train, s.inst.hyper, s.inst.basis);
  double best_lib = -kInf, best_oracle = -kInf;
  int arg_lib = -1, arg_oracle = -1;
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXd x(1);
    x << s.inst.box.lower[0] + s.inst.box.side(0) * (i + 0.5) / 10000.0;
    const double lib = maxv_objective(ctx, x);
    const double orc = log_unnorm_variance(s.prior.log_pdf(x), oracle.mean_at(x),
                                           std::sqrt(std::max(oracle.var_at(x), 0.0)));
    if (lib > best_lib) {
      best_lib = lib;
      arg_lib = i;
    }
    if (orc > best_oracle) {
      best_oracle = orc;
      arg_oracle = i;
    }
  }
  CHECK(arg_lib == arg_oracle);
  // the oracle's explicit inverse of the basis-augmented kernel costs a few
  // digits, so agreement is bounded by its conditioning rather than roundoff
  CHECK(best_lib == doctest::Approx(best_oracle).epsilon(1e-6));

  // with a flat mean and uniform prior the argmax is the max-variance point
  TrainingSet flat(1);
  for (double v : {-1.5, -0.5, 1.0})
    flat.append(Eigen::VectorXd::Constant(1, v), 0.0, 0.05);
  const GpModel fm(flat, s.inst.hyper, BasisConfig::quadratic(1, 1e-4));
  CriterionContext fctx = ctx;
  fctx.model = &fm;
  double bv = -kInf, bs = -kInf;
  double argv = 0, args = 0;
  for (int i = 0; i < 4000; ++i) {
    Eigen::VectorXd x(1);
    x << s.inst.box.lower[0] + s.inst.box.side(0) * (i + 0.5) / 4000.0;
    if (maxv_objective(fctx, x) > bv) {
      bv = maxv_objective(fctx, x);
      argv = x[0];
    }
    if (fm.var_at(x) > bs) {
      bs = fm.var_at(x);
      args = x[0];
    }
  }
  CHECK(argv == doctest::Approx(args).epsilon(1e-10));
}

TEST_CASE("pointwise iqr objective") {
  const Setup s(61, 2, 10);
  const CriterionContext ctx = s.ctx(CriterionKind::Maxiqr);
  Rng rng(62);

  SUBCASE("agrees with the sinh form of the width") {
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd x = s.inst.box.sample(rng);
      const double m = s.model.mean_at(x);
      const double sd = std::sqrt(s.model.var_at(x));
      const double logpi = s.prior.log_pdf(x);
      const double sinh_form = logpi + m + log_2sinh(ctx.iqr_u * sd);
      CHECK(std::abs(maxiqr_objective(ctx, x) - sinh_form) < 1e-10);
    }
  }

  SUBCASE("large widths approach the confidence-bound form") {
    // u*s > 20 makes the 1 - e^{-2us} factor vanish
    TrainingSet t(1);
    t.append(Eigen::VectorXd::Zero(1), 0.0, 0.1);
    GpHyperparams wild;
    wild.signal_var = 40.0 * 40.0;  // s up to 40 log-units far from data
    wild.lengthscales = Eigen::VectorXd::Constant(1, 0.3);
    const GpModel wm(t, wild, BasisConfig::quadratic(1, 1e-6));
    const LogPrior prior1 = LogPrior::uniform(Box::cube(-2, 2, 1));
    CriterionContext wctx;
    wctx.model = &wm;
    wctx.prior = &prior1;
    wctx.kind = CriterionKind::Maxiqr;

    Eigen::VectorXd far(1);
    far << 1.9;
    const double sd = std::sqrt(wm.var_at(far));
    REQUIRE(wctx.iqr_u * sd > 20.0);
    const double ucb = prior1.log_pdf(far) + wm.mean_at(far) + wctx.iqr_u * sd;
    CHECK(std::abs(maxiqr_objective(wctx, far) - ucb) < 1e-8);
  }

  SUBCASE("zero width is minus infinity") {
    // noiseless re-observation drives the lookahead width at the point to 0
    Batch pend = Batch::empty(2);
    Eigen::VectorXd x = s.inst.box.sample(rng);
    for (int i = 0; i < 50 && s.model.var_at(x) < 0.01; ++i) x = s.inst.box.sample(rng);
    REQUIRE(s.model.var_at(x) >= 0.01);
    pend.append(x, 0.0);
    const double g = greedy_pointwise_objective(ctx, pend, x);
    const double seq = maxiqr_objective(ctx, x);
    CHECK(g < seq - 5.0);  // collapses far below the sequential value
  }
}

TEST_CASE("greedy pointwise objective") {
  for (CriterionKind kind : {CriterionKind::Maxv, CriterionKind::Maxiqr}) {
    const Setup s(71, 2, 10);
    CriterionContext ctx = s.ctx(kind);
    Rng rng(72);
    const Batch none = Batch::empty(2);
    const Batch pending = random_batch(s.inst, 73, 2);

    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd x = s.inst.box.sample(rng);
      const double seq = kind == CriterionKind::Maxv ? maxv_objective(ctx, x)
                                                     : maxiqr_objective(ctx, x);
      // empty pending set reduces exactly to the sequential objective
      CHECK(std::abs(greedy_pointwise_objective(ctx, none, x) - seq) < 1e-12);

      // the implicit weight exp(greedy - sequential) lies in [0, 1]
      const double g = greedy_pointwise_objective(ctx, pending, x);
      const double omega = std::exp(g - seq);
      CHECK(omega >= 0.0);
      CHECK(omega <= 1.0 + 1e-12);
    }

    // evaluating exactly at a pending point is strictly penalized
    const Eigen::VectorXd at = pending.points.row(0).transpose();
    Batch pend1 = Batch::empty(2);
    pend1.append(at, 1e-2);
    CHECK(greedy_pointwise_objective(ctx, pend1, at) <
          (kind == CriterionKind::Maxv ? maxv_objective(ctx, at)
                                       : maxiqr_objective(ctx, at)) -
              1e-6);
  }
}

TEST_CASE("evaluator requires the right inputs") {
  const Setup s(81, 2, 6);
  CriterionContext ctx = s.ctx(CriterionKind::Imiqr);
  ctx.quad = nullptr;
  CHECK_THROWS_AS(CriterionEvaluator{ctx}, std::invalid_argument);

  CriterionContext ok = s.ctx(CriterionKind::Maxv);
  ok.quad = nullptr;  // pointwise criteria run without quadrature
  CHECK_NOTHROW(CriterionEvaluator{ok});

  CriterionContext bad_u = s.ctx(CriterionKind::Imiqr);
  bad_u.iqr_u = 0.0;
  CHECK_THROWS_AS(CriterionEvaluator{bad_u}, std::invalid_argument);
}

TEST_CASE("evaluator candidate values match the standalone losses") {
  const Setup s(91, 2, 9, 9);
  for (CriterionKind kind : {CriterionKind::Eiv, CriterionKind::Imiqr}) {
    const CriterionContext ctx = s.ctx(kind);
    CriterionEvaluator ev(ctx);
    REQUIRE(ev.empty_loss());

    Rng rng(92);
    const Eigen::VectorXd x1 = s.inst.box.sample(rng);
    const Eigen::VectorXd x2 = s.inst.box.sample(rng);

    Batch b1 = Batch::empty(2);
    b1.append(x1, ctx.pending_noise_std);
    const double direct1 =
        kind == CriterionKind::Eiv ? eiv_loss(ctx, b1) : imiqr_loss(ctx, b1);
    CHECK(ev.candidate_value(x1) == doctest::Approx(direct1).epsilon(1e-10));

    ev.push_pending(x1);
    Batch b2 = b1;
    b2.append(x2, ctx.pending_noise_std);
    const double direct2 =
        kind == CriterionKind::Eiv ? eiv_loss(ctx, b2) : imiqr_loss(ctx, b2);
    CHECK(ev.candidate_value(x2) == doctest::Approx(direct2).epsilon(1e-10));
    CHECK(ev.pending_loss() == doctest::Approx(direct1).epsilon(1e-10));
  }
}
