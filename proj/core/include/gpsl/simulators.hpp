#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gpsl/box.hpp"
#include "gpsl/synthetic_likelihood.hpp"

namespace gpsl {

// Stochastic Ricker population model: N_{t+1} = r N_t exp(-N_t + eps_t),
// eps_t ~ N(0, sigma_eps^2), N_0 = 1, observed counts x_t ~ Poisson(phi N_t).
// theta = (log r, phi, sigma_eps). Returns the 13 classic summaries of
// x_{1:T}: mean, zero count, autocovariances at lags 0..5, the two
// coefficients of regressing x_{t+1}^0.3 on (x_t^0.3, x_t^0.6), and the three
// coefficients of the no-intercept cubic regression of sorted differences on
// their normal scores.
Eigen::VectorXd ricker_summaries(const Eigen::VectorXd& theta, std::uint64_t seed,
                                 int T = 50);

// g-and-k distribution sampled through its quantile function at n standard
// normal draws; theta = (a, b, g, k) with c fixed to 0.8. Returns 4 robust
// summaries built from the empirical octiles E_1..E_7:
// (E4, E6-E2, (E6+E2-2 E4)/(E6-E2), (E7-E5+E3-E1)/(E6-E2)).
Eigen::VectorXd gk_summaries(const Eigen::VectorXd& theta, std::uint64_t seed,
                             int n = 1000);

// quantile function of the g-and-k distribution at normal coordinate z, c=0.8
double gk_quantile(double z, double a, double b, double g, double k);

// Stochastic variant of the 40-variable cyclic Lorenz weather model:
// dx_k/dt = -x_{k-1}(x_{k-2} - x_{k+1}) - x_k + 10 - (theta1 + theta2 x_k) + eta_k
// integrated by RK4 over t in [0,4] with 160 steps; eta is a per-site AR(1)
// forcing with coefficient 0.4, refreshed once per step. Returns 6
// site-averaged summaries: temporal mean, temporal variance, lag-1
// autocovariance, same-time neighbour covariance, and the two lag-1 neighbour
// cross-covariances.
Eigen::VectorXd lorenz_summaries(const Eigen::VectorXd& theta, std::uint64_t seed);

// The fixed, known initial state of the 40 slow weather variables.
const Eigen::VectorXd& lorenz_initial_state();

// Regenerates the initial state: 1000 RK4 steps of the unforced system from
// a perturbed rest state. The stored constants are normative; this exists so
// a test can flag any drift in the generating code.
Eigen::VectorXd lorenz_spin_up_state();

// Exact (unnormalized) toy log-densities, quadratic forms in a correlated
// 2x2 precision; the 6D versions are sums of three independent 2D blocks.
enum class ToyName { Simple2D, Banana2D, Bimodal2D, Simple6D, Banana6D, Multimodal6D };

ToyName parse_toy(const std::string& name);
std::string toy_name(ToyName name);
Box toy_box(ToyName name);                                // uniform prior support
double toy_logpdf(ToyName name, const Eigen::VectorXd& theta);  // -inf outside the box

struct SimulatorSpec {
  std::string name;
  Box domain;  // uniform prior support
  Eigen::VectorXd true_theta;
  int summary_dim = 0;
  int default_repeats = 0;
  SummaryFn summaries;
};

const std::vector<SimulatorSpec>& simulator_registry();
const SimulatorSpec& find_simulator(const std::string& name);

}  // namespace gpsl
