#include <cmath>
#include <limits>

#include "doctest.h"
#include "gpsl/errors.hpp"
#include "gpsl/math.hpp"
#include "gpsl/simulators.hpp"
#include "support/oracles.hpp"

using namespace gpsl;
using namespace gpsl::testing;

namespace {

Eigen::VectorXd vec3(double a, double b, double c) {
  return (Eigen::VectorXd(3) << a, b, c).finished();
}

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  return (Eigen::VectorXd(4) << a, b, c, d).finished();
}

// the four summaries as computed from a given octile vector e[1..7]
Eigen::VectorXd octile_summaries(const double* e) {
  const double spread = e[6] - e[2];
  Eigen::VectorXd out(4);
  out[0] = e[4];
  out[1] = spread;
  out[2] = (e[6] + e[2] - 2.0 * e[4]) / spread;
  out[3] = (e[7] - e[5] + e[3] - e[1]) / spread;
  return out;
}

Eigen::VectorXd theoretical_gk_summaries(double a, double b, double g, double k) {
  double e[8];
  for (int j = 1; j <= 7; ++j) e[j] = gk_quantile(normal_quantile(j / 8.0), a, b, g, k);
  return octile_summaries(e);
}

}  // namespace

TEST_CASE("population summaries are finite across the prior box") {
  const SimulatorSpec& spec = find_simulator("ricker");
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd theta = spec.domain.sample(rng);
    const Eigen::VectorXd s = ricker_summaries(theta, 1000 + i);
    REQUIRE(s.size() == 13);
    CHECK(s.allFinite());
  }
}

TEST_CASE("a zero observation rate produces the all-zero series summaries") {
  const Eigen::VectorXd s = ricker_summaries(vec3(3.8, 0.0, 0.3), 7);
  CHECK(s[0] == 0.0);   // mean count
  CHECK(s[1] == 50.0);  // every one of the 50 counts is zero
  for (int i = 2; i < 13; ++i) CHECK(s[i] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("population summaries are seed-deterministic") {
  const Eigen::VectorXd theta = vec3(3.8, 10.0, 0.3);
  CHECK(bits_equal(ricker_summaries(theta, 5), ricker_summaries(theta, 5)));
  CHECK(!bits_equal(ricker_summaries(theta, 5), ricker_summaries(theta, 6)));
}

TEST_CASE("population simulator rejects bad arguments") {
  CHECK_THROWS_AS(ricker_summaries(Eigen::VectorXd::Zero(2), 1), std::invalid_argument);
  CHECK_THROWS_AS(ricker_summaries(vec3(3.8, 10.0, -0.1), 1), std::invalid_argument);
  CHECK_THROWS_AS(ricker_summaries(vec3(3.8, 10.0, 0.3), 1, 5), std::invalid_argument);
}

TEST_CASE("quantile-distribution summaries match the theoretical octiles") {
  SUBCASE("g = k = 0 reduces to a scaled normal") {
    const Eigen::VectorXd s = gk_summaries(vec4(3.0, 1.0, 0.0, 0.0), 21, 200000);
    const Eigen::VectorXd want = theoretical_gk_summaries(3.0, 1.0, 0.0, 0.0);
    CHECK(want[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(want[2] == doctest::Approx(0.0).epsilon(1e-12));
    for (int j = 0; j < 4; ++j) CHECK(std::abs(s[j] - want[j]) < 0.015);
  }
  SUBCASE("skewed heavy-tailed case") {
    const Eigen::VectorXd s = gk_summaries(vec4(3.0, 1.0, 2.0, 0.5), 22, 500000);
    const Eigen::VectorXd want = theoretical_gk_summaries(3.0, 1.0, 2.0, 0.5);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(s[j] - want[j]) < 0.03);
  }
}

TEST_CASE("quantile function is strictly increasing on valid parameters") {
  for (const Eigen::VectorXd& th : {vec4(3.0, 1.0, 2.0, 0.5), vec4(0.0, 2.0, -1.0, 0.2)}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double z = -3.5; z <= 3.5; z += 0.05) {
      const double q = gk_quantile(z, th[0], th[1], th[2], th[3]);
      CHECK(q > prev);
      prev = q;
    }
  }
}

TEST_CASE("quantile-distribution simulator rejects bad arguments") {
  CHECK_THROWS_AS(gk_summaries(Eigen::VectorXd::Zero(3), 1), std::invalid_argument);
  CHECK_THROWS_AS(gk_summaries(vec4(3.0, 0.0, 2.0, 0.5), 1), std::invalid_argument);
  CHECK_THROWS_AS(gk_summaries(vec4(3.0, 1.0, 2.0, -0.6), 1), std::invalid_argument);
  CHECK_THROWS_AS(gk_summaries(vec4(3.0, 1.0, 2.0, 0.5), 1, 8), std::invalid_argument);
}

TEST_CASE("weather model summaries behave and the initial state has not drifted") {
  const Eigen::VectorXd theta = find_simulator("lorenz").true_theta;
  const Eigen::VectorXd s = lorenz_summaries(theta, 3);
  REQUIRE(s.size() == 6);
  CHECK(s.allFinite());
  CHECK(s[1] > 0.0);  // temporal variance

  CHECK(bits_equal(s, lorenz_summaries(theta, 3)));
  CHECK(!bits_equal(s, lorenz_summaries(theta, 4)));
  CHECK(!bits_equal(s, lorenz_summaries((Eigen::VectorXd(2) << 0.5, 0.0).finished(), 3)));

  CHECK_THROWS_AS(lorenz_summaries(Eigen::VectorXd::Zero(3), 1), std::invalid_argument);

  // the embedded initial-state constants must equal what the spin-up produces
  const Eigen::VectorXd& stored = lorenz_initial_state();
  REQUIRE(stored.size() == 40);
  CHECK((stored - lorenz_spin_up_state()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("toy density values match hand computations") {
  Eigen::Vector2d th(1.0, 0.0);
  CHECK(toy_logpdf(ToyName::Simple2D, th) ==
        doctest::Approx(-0.5333333333333333).epsilon(1e-14));

  th << 0.0, -1.0;  // the banana bend maps this to the mode
  CHECK(toy_logpdf(ToyName::Banana2D, th) == 0.0);

  // the two-mode density is symmetric in the second coordinate and peaks
  // where its square hits 2
  Eigen::Vector2d p(1.3, 0.7), q(1.3, -0.7);
  CHECK(toy_logpdf(ToyName::Bimodal2D, p) == toy_logpdf(ToyName::Bimodal2D, q));
  CHECK(toy_logpdf(ToyName::Bimodal2D, Eigen::Vector2d(0.0, std::sqrt(2.0))) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("six-dimensional toys factor into their three 2d blocks") {
  const ToyName pairs[3][2] = {{ToyName::Simple6D, ToyName::Simple2D},
                               {ToyName::Banana6D, ToyName::Banana2D},
                               {ToyName::Multimodal6D, ToyName::Bimodal2D}};
  Rng rng(9);
  for (const auto& [big, small] : pairs) {
    const Box box = toy_box(big);
    REQUIRE(box.dim() == 6);
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd th = box.sample(rng);
      double sum = 0.0;
      for (int b = 0; b < 3; ++b)
        sum += toy_logpdf(small, th.segment<2>(2 * b));
      CHECK(toy_logpdf(big, th) == sum);
    }
  }
}

TEST_CASE("toy densities vanish outside their support") {
  for (ToyName name : {ToyName::Simple2D, ToyName::Banana2D, ToyName::Bimodal2D,
                       ToyName::Simple6D, ToyName::Banana6D, ToyName::Multimodal6D}) {
    const Box box = toy_box(name);
    Eigen::VectorXd outside = box.upper;
    outside[0] += 1.0;
    CHECK(toy_logpdf(name, outside) == -std::numeric_limits<double>::infinity());
    CHECK(std::isfinite(toy_logpdf(name, box.center())));
  }
}

TEST_CASE("toy names round-trip and unknown names are rejected") {
  for (ToyName name : {ToyName::Simple2D, ToyName::Banana2D, ToyName::Bimodal2D,
                       ToyName::Simple6D, ToyName::Banana6D, ToyName::Multimodal6D})
    CHECK(parse_toy(toy_name(name)) == name);
  CHECK_THROWS_AS(parse_toy("nope"), std::invalid_argument);
}

TEST_CASE("simulator registry entries are complete and consistent") {
  const auto& specs = simulator_registry();
  REQUIRE(specs.size() == 3);
  for (const SimulatorSpec& spec : specs) {
    CAPTURE(spec.name);
    CHECK(spec.domain.dim() == spec.true_theta.size());
    CHECK(spec.domain.contains(spec.true_theta));
    CHECK(spec.summary_dim > 0);
    CHECK(spec.default_repeats >= spec.summary_dim + 2);
    const Eigen::VectorXd s = spec.summaries(spec.true_theta, 1);
    CHECK(s.size() == spec.summary_dim);
    CHECK(s.allFinite());
  }
  CHECK(find_simulator("ricker").name == "ricker");
  CHECK(find_simulator("gk").name == "gk");
  CHECK(find_simulator("lorenz").name == "lorenz");
  CHECK_THROWS_AS(find_simulator("weather"), std::invalid_argument);
}
