#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "gpsl/math.hpp"
#include "gpsl/posterior_estimators.hpp"
#include "gpsl/quadrature.hpp"
#include "gpsl/simulators.hpp"
#include "support/oracles.hpp"

using namespace gpsl;
using namespace gpsl::testing;

namespace {

double gauss_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

Eigen::VectorXd apply(const WeightedPointSet& q,
                      const std::function<double(const Eigen::VectorXd&)>& f) {
  Eigen::VectorXd out(q.size());
  for (int i = 0; i < q.size(); ++i) out[i] = f(q.points.row(i).transpose());
  return out;
}

}  // namespace

TEST_CASE("midpoint grid integrates constants and bilinear functions exactly") {
  const Box box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
  const WeightedPointSet q = grid_points(box, 50);
  REQUIRE(q.size() == 2500);
  CHECK(q.log_volume == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_sum_exp(q.log_weight) == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 0; i < q.size(); ++i)
    CHECK(q.log_weight[i] == doctest::Approx(-std::log(2500.0)).epsilon(1e-14));

  // integral of 1 over the unit square
  CHECK(q.log_integral(Eigen::VectorXd::Zero(q.size())) ==
        doctest::Approx(0.0).epsilon(1e-13));

  // the midpoint rule is exact for functions linear in each coordinate
  const Eigen::VectorXd logxy =
      apply(q, [](const Eigen::VectorXd& p) { return std::log(p[0] * p[1]); });
  CHECK(q.log_integral(logxy) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
}

TEST_CASE("per-dimension resolutions produce the advertised tensor grid") {
  const Box box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 3.0));
  const WeightedPointSet q = grid_points(box, std::vector<int>{2, 3});
  REQUIRE(q.size() == 6);
  CHECK(q.log_volume == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  for (int i = 0; i < 6; ++i)
    CHECK(q.log_weight[i] == doctest::Approx(-std::log(6.0)).epsilon(1e-14));

  // cell midpoints: {0.25, 0.75} x {0.5, 1.5, 2.5}, last dimension fastest
  const double xs[] = {0.25, 0.25, 0.25, 0.75, 0.75, 0.75};
  const double ys[] = {0.5, 1.5, 2.5, 0.5, 1.5, 2.5};
  for (int i = 0; i < 6; ++i) {
    CHECK(q.points(i, 0) == doctest::Approx(xs[i]).epsilon(1e-14));
    CHECK(q.points(i, 1) == doctest::Approx(ys[i]).epsilon(1e-14));
  }

  const WeightedPointSet a = grid_points(box, 3);
  const WeightedPointSet b = grid_points(box, std::vector<int>{3, 3});
  CHECK(bits_equal(a.points, b.points));
  CHECK(bits_equal(a.log_weight, b.log_weight));
}

TEST_CASE("grid construction rejects bad inputs") {
  const Box box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
  CHECK_THROWS_AS(grid_points(box, std::vector<int>{4}), std::invalid_argument);
  CHECK_THROWS_AS(grid_points(box, 0), std::invalid_argument);
  CHECK_THROWS_AS(grid_points(box, 4000), std::invalid_argument);  // 1.6e7 cells

  Eigen::Vector2d at(0.2, 0.4);
  CHECK_THROWS_AS(grid_points(Box(at, at), 5), std::invalid_argument);

  const WeightedPointSet q = grid_points(box, 3);
  CHECK_THROWS_AS(q.log_integral(Eigen::VectorXd::Zero(4)), std::invalid_argument);
}

TEST_CASE("grid integration is exact for interior mass, second order otherwise") {
  // a Gaussian that dies well inside the box: midpoint sums converge faster
  // than any power of h, so even a coarse grid reproduces the analytic mass
  // log(2 pi sqrt(1 - rho^2)) essentially to roundoff
  const Box box = toy_box(ToyName::Simple2D);
  const WeightedPointSet q = grid_points(box, 50);
  const double mass = q.log_integral(apply(q, [](const Eigen::VectorXd& th) {
    return toy_logpdf(ToyName::Simple2D, th);
  }));
  CHECK(std::abs(mass - 1.8056078058405599) < 1e-12);

  // an integrand with curvature at the boundary is the generic case; there
  // the midpoint error is O(h^2) and halving the cell quarters it
  const Box unit = Box::cube(0.0, 1.0, 2);
  auto err = [&](int res) {
    const WeightedPointSet g = grid_points(unit, res);
    const double got = g.log_integral(
        apply(g, [](const Eigen::VectorXd& th) { return th[0] + th[1]; }));
    return std::abs(got - 1.0826497092258362);  // 2 log(e - 1)
  };
  const double e25 = err(25), e50 = err(50), e100 = err(100);
  CHECK(e25 > e50);
  CHECK(e50 > e100);
  CHECK(e25 / e50 > 3.8);
  CHECK(e25 / e50 < 4.2);
  CHECK(e50 / e100 > 3.8);
  CHECK(e50 / e100 < 4.2);
}

TEST_CASE("loss proposal equals the pointwise loss and vanishes off support") {
  const RandomInstance inst = random_instance(314, 2, 10);
  const GpModel model(inst.train, inst.hyper, inst.basis);
  const LogPrior prior = LogPrior::uniform(inst.box);

  Rng rng(99);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd th = inst.box.sample(rng);
    const double logpi = prior.log_pdf(th);
    const double m = model.mean_at(th);
    const double s = std::sqrt(model.var_at(th));
    CHECK(loss_proposal_logpdf(model, prior, CriterionKind::Eiv, th) ==
          doctest::Approx(log_unnorm_variance(logpi, m, s)).epsilon(1e-12));
    CHECK(loss_proposal_logpdf(model, prior, CriterionKind::Maxv, th) ==
          doctest::Approx(log_unnorm_variance(logpi, m, s)).epsilon(1e-12));
    CHECK(loss_proposal_logpdf(model, prior, CriterionKind::Imiqr, th) ==
          doctest::Approx(log_l1_risk_integrand(logpi, m, s)).epsilon(1e-12));
    CHECK(loss_proposal_logpdf(model, prior, CriterionKind::Maxiqr, th) ==
          doctest::Approx(log_l1_risk_integrand(logpi, m, s)).epsilon(1e-12));
  }

  const Eigen::VectorXd outside = inst.box.upper.array() + 1.0;
  CHECK(loss_proposal_logpdf(model, prior, CriterionKind::Eiv, outside) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("near-flat loss gives near-uniform importance weights") {
  // one all-but-uninformative observation: the loss surface is constant to
  // within ~1e-9, so reciprocal weighting must come out uniform
  const Box box = Box::cube(-2.0, 2.0, 1);
  TrainingSet train(1);
  train.append(Eigen::VectorXd::Constant(1, 0.5), 3.0, 1e3);
  GpHyperparams hyper;
  hyper.signal_var = 2.0;
  hyper.lengthscales = Eigen::VectorXd::Constant(1, 1.0);
  const GpModel model(train, hyper, BasisConfig::quadratic(1, 1e-9));
  const LogPrior prior = LogPrior::uniform(box);

  ImportanceConfig cfg;
  cfg.n_points = 500;
  cfg.burn = 500;
  cfg.keep = 500;
  cfg.seed = 7;
  const WeightedPointSet q = importance_points(model, prior, CriterionKind::Eiv, cfg);
  REQUIRE(q.size() == 500);
  CHECK(!q.fallback);
  CHECK(log_sum_exp(q.log_weight) == doctest::Approx(0.0).epsilon(1e-12));
  const double logn = std::log(500.0);
  for (int i = 0; i < q.size(); ++i) {
    CHECK(std::abs(q.log_weight[i] + logn) < 1e-6);
    CHECK(box.contains(q.points.row(i).transpose()));
  }
  // the flat-target random walk should roam most of the box
  CHECK(q.points.minCoeff() < -1.0);
  CHECK(q.points.maxCoeff() > 1.0);
}

TEST_CASE("importance points are drawn from the loss-shaped proposal") {
  // train on an exact parabola: the variance-based loss is then proportional
  // to exp(2m) = exp(-theta^2 / (2 * 0.5^2)), a normal shape with sd 0.5
  const Box box = Box::cube(-3.0, 3.0, 1);
  TrainingSet train(1);
  for (int i = 0; i <= 60; ++i) {
    const double x = -3.0 + 0.1 * i;
    train.append(Eigen::VectorXd::Constant(1, x), -x * x, 0.05);
  }
  GpHyperparams hyper;
  hyper.signal_var = 4.0;
  hyper.lengthscales = Eigen::VectorXd::Constant(1, 1.5);
  const GpModel model(train, hyper, BasisConfig::quadratic(1));
  const LogPrior prior = LogPrior::uniform(box);

  // the construction only works if the fit is faithful and the predictive sd
  // is essentially constant where the proposal has mass
  double worst_mean = 0.0, lo_ls2 = 1e300, hi_ls2 = -1e300;
  for (double x = -2.0; x <= 2.0; x += 0.01) {
    const Eigen::VectorXd th = Eigen::VectorXd::Constant(1, x);
    worst_mean = std::max(worst_mean, std::abs(model.mean_at(th) + x * x));
    const double ls2 = std::log(std::expm1(model.var_at(th)));
    lo_ls2 = std::min(lo_ls2, ls2);
    hi_ls2 = std::max(hi_ls2, ls2);
  }
  REQUIRE(worst_mean < 0.03);
  REQUIRE(hi_ls2 - lo_ls2 < 0.2);

  ImportanceConfig cfg;
  cfg.n_points = 2000;
  cfg.burn = 1000;
  cfg.keep = 1000;
  cfg.seed = 11;
  const WeightedPointSet q = importance_points(model, prior, CriterionKind::Eiv, cfg);
  REQUIRE(q.size() == 2000);
  CHECK(!q.fallback);

  // unweighted average of the N(0, 0.5^2) density over draws from that same
  // density estimates its self-overlap 1/(2 sqrt(pi) sigma) = 1/sqrt(pi)
  double pdf_mean = 0.0, sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    const double x = q.points(i, 0);
    pdf_mean += gauss_pdf(x, 0.0, 0.5) / q.size();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(pdf_mean - 0.5641895835477563) < 0.05);
  const double mean = sum / q.size();
  const double sd_eiv = std::sqrt(sum2 / q.size() - mean * mean);
  CHECK(std::abs(mean) < 0.06);
  CHECK(std::abs(sd_eiv - 0.5) < 0.05);

  // weights follow the reciprocal density, so they are anything but uniform
  CHECK(q.log_weight.maxCoeff() - q.log_weight.minCoeff() > 1e-3);

  // the IQR-family proposal is exp(m), a wider normal with sd 1/sqrt(2)
  const WeightedPointSet qi = importance_points(model, prior, CriterionKind::Imiqr, cfg);
  const Eigen::VectorXd xi = qi.points.col(0);
  const double mi = xi.mean();
  const double sd_imiqr = std::sqrt((xi.array() - mi).square().mean());
  CHECK(sd_imiqr > sd_eiv + 0.1);
}

TEST_CASE("a spiked loss surface trips the prior-draw fallback") {
  // a huge observation under a microscopic lengthscale pins the chains to one
  // point; the sampler must notice and fall back to prior draws
  const Box box = Box::cube(-2.0, 2.0, 1);
  TrainingSet train(1);
  train.append(Eigen::VectorXd::Constant(1, 0.3), 1000.0, 1e-4);
  GpHyperparams hyper;
  hyper.signal_var = 1.0;
  hyper.lengthscales = Eigen::VectorXd::Constant(1, 1e-6);
  const GpModel model(train, hyper, BasisConfig::quadratic(1, 1e-9));
  const LogPrior prior = LogPrior::uniform(box);

  ImportanceConfig cfg;
  cfg.n_points = 500;
  cfg.burn = 300;
  cfg.keep = 300;
  cfg.seed = 5;
  const WeightedPointSet q = importance_points(model, prior, CriterionKind::Eiv, cfg);
  REQUIRE(q.size() == 500);
  CHECK(q.fallback);
  for (int i = 0; i < q.size(); ++i) {
    CHECK(q.log_weight[i] == doctest::Approx(-std::log(500.0)).epsilon(1e-14));
    CHECK(box.contains(q.points.row(i).transpose()));
  }

  const WeightedPointSet again = importance_points(model, prior, CriterionKind::Eiv, cfg);
  CHECK(bits_equal(q.points, again.points));
}

TEST_CASE("importance sampler is seed-deterministic and guards its inputs") {
  const RandomInstance inst = random_instance(55, 2, 8);
  const GpModel model(inst.train, inst.hyper, inst.basis);
  const LogPrior prior = LogPrior::uniform(inst.box);

  ImportanceConfig cfg;
  cfg.n_points = 200;
  cfg.burn = 200;
  cfg.keep = 200;
  cfg.seed = 21;
  const WeightedPointSet a = importance_points(model, prior, CriterionKind::Imiqr, cfg);
  const WeightedPointSet b = importance_points(model, prior, CriterionKind::Imiqr, cfg);
  CHECK(bits_equal(a.points, b.points));
  CHECK(bits_equal(a.log_weight, b.log_weight));
  CHECK(a.fallback == b.fallback);

  cfg.seed = 22;
  const WeightedPointSet c = importance_points(model, prior, CriterionKind::Imiqr, cfg);
  CHECK(!bits_equal(a.points, c.points));

  cfg.n_points = 0;
  CHECK_THROWS_AS(importance_points(model, prior, CriterionKind::Eiv, cfg),
                  std::invalid_argument);
  cfg.n_points = 2000;  // more than chains * keep
  CHECK_THROWS_AS(importance_points(model, prior, CriterionKind::Eiv, cfg),
                  std::invalid_argument);
}
