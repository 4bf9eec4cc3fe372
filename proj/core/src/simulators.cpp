#include "gpsl/simulators.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "gpsl/errors.hpp"
#include "gpsl/math.hpp"

namespace gpsl {

namespace {

void check_theta(const Eigen::VectorXd& theta, int dim, const char* what) {
  if (theta.size() != dim || !theta.allFinite())
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(dim) +
                                " finite parameters, got " + format_point(theta));
}

// minimum-norm least squares, so an all-zero design yields all-zero coefficients
Eigen::VectorXd solve_ls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  return A.completeOrthogonalDecomposition().solve(y);
}

double interpolated_quantile(const std::vector<double>& sorted, double p) {
  const int n = static_cast<int>(sorted.size());
  const double h = (n - 1) * p;
  const int lo = std::min(static_cast<int>(std::floor(h)), n - 2);
  return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

constexpr int kLorenzSites = 40;
constexpr double kLorenzDt = 0.025;
constexpr double kLorenzForcing = 10.0;

// cyclic advection-damping right-hand side with per-site forcing
void lorenz_rhs(const Eigen::VectorXd& x, double theta1, double theta2,
                const Eigen::VectorXd& eta, Eigen::VectorXd& out) {
  const int K = kLorenzSites;
  for (int k = 0; k < K; ++k) {
    const double xm1 = x[(k - 1 + K) % K];
    const double xm2 = x[(k - 2 + K) % K];
    const double xp1 = x[(k + 1) % K];
    out[k] = -xm1 * (xm2 - xp1) - x[k] + kLorenzForcing - (theta1 + theta2 * x[k]) + eta[k];
  }
}

void lorenz_rk4_step(Eigen::VectorXd& x, double theta1, double theta2,
                     const Eigen::VectorXd& eta) {
  const int K = kLorenzSites;
  static thread_local Eigen::VectorXd k1(K), k2(K), k3(K), k4(K), tmp(K);
  lorenz_rhs(x, theta1, theta2, eta, k1);
  tmp = x + 0.5 * kLorenzDt * k1;
  lorenz_rhs(tmp, theta1, theta2, eta, k2);
  tmp = x + 0.5 * kLorenzDt * k2;
  lorenz_rhs(tmp, theta1, theta2, eta, k3);
  tmp = x + kLorenzDt * k3;
  lorenz_rhs(tmp, theta1, theta2, eta, k4);
  x += (kLorenzDt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double toy2d_block(double rho, double u1, double u2) {
  return -0.5 * (u1 * u1 - 2.0 * rho * u1 * u2 + u2 * u2) / (1.0 - rho * rho);
}

double toy2d_logpdf(ToyName name, double t1, double t2) {
  switch (name) {
    case ToyName::Simple2D:
      return toy2d_block(0.25, t1, t2);
    case ToyName::Banana2D:
      return toy2d_block(0.9, t1, t2 + t1 * t1 + 1.0);
    case ToyName::Bimodal2D:
      return toy2d_block(0.5, t1, t2 * t2 - 2.0);
    default:
      throw std::invalid_argument("toy2d_logpdf: not a 2D name");
  }
}

ToyName base2d(ToyName name) {
  switch (name) {
    case ToyName::Simple6D: return ToyName::Simple2D;
    case ToyName::Banana6D: return ToyName::Banana2D;
    case ToyName::Multimodal6D: return ToyName::Bimodal2D;
    default: return name;
  }
}

bool is6d(ToyName name) {
  return name == ToyName::Simple6D || name == ToyName::Banana6D ||
         name == ToyName::Multimodal6D;
}

}  // namespace

Eigen::VectorXd ricker_summaries(const Eigen::VectorXd& theta, std::uint64_t seed, int T) {
  check_theta(theta, 3, "ricker_summaries");
  if (T < 10) throw std::invalid_argument("ricker_summaries: T >= 10");
  const double r = std::exp(theta[0]);
  const double phi = theta[1];
  const double sig = theta[2];
  if (sig < 0.0) throw std::invalid_argument("ricker_summaries: sigma_eps >= 0");

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd x(T);
  double pop = 1.0;
  for (int t = 0; t < T; ++t) {
    const double eps = sig * normal(rng);
    pop = r * pop * std::exp(-pop + eps);
    if (!std::isfinite(pop) || pop > 1e12)
      throw SimulatorError("population overflow in the Ricker recursion", theta);
    const double lambda = phi * pop;
    if (!std::isfinite(lambda) || lambda > 1e9)
      throw SimulatorError("Poisson intensity overflow in the Ricker model", theta);
    if (lambda <= 0.0) {
      x[t] = 0.0;
    } else {
      std::poisson_distribution<long> pois(lambda);
      x[t] = static_cast<double>(pois(rng));
    }
  }

  Eigen::VectorXd out(13);
  const double mean = x.mean();
  out[0] = mean;
  out[1] = static_cast<double>((x.array() == 0.0).count());
  for (int lag = 0; lag <= 5; ++lag) {
    double acv = 0.0;
    for (int t = 0; t + lag < T; ++t) acv += (x[t] - mean) * (x[t + lag] - mean);
    out[2 + lag] = acv / T;
  }

  // x_{t+1}^0.3 regressed on (x_t^0.3, x_t^0.6), no intercept
  Eigen::MatrixXd A(T - 1, 2);
  Eigen::VectorXd b(T - 1);
  for (int t = 0; t < T - 1; ++t) {
    const double u = std::pow(x[t], 0.3);
    A(t, 0) = u;
    A(t, 1) = u * u;
    b[t] = std::pow(x[t + 1], 0.3);
  }
  out.segment<2>(8) = solve_ls(A, b);

  // sorted first differences against their normal scores, cubic, no intercept
  const int m = T - 1;
  std::vector<double> diffs(m);
  for (int t = 0; t < m; ++t) diffs[t] = x[t + 1] - x[t];
  std::sort(diffs.begin(), diffs.end());
  Eigen::MatrixXd C(m, 3);
  Eigen::VectorXd d(m);
  for (int i = 0; i < m; ++i) {
    const double score = normal_quantile((i + 1 - 0.375) / (m + 0.25));
    C(i, 0) = score;
    C(i, 1) = score * score;
    C(i, 2) = score * score * score;
    d[i] = diffs[i];
  }
  out.segment<3>(10) = solve_ls(C, d);
  return out;
}

double gk_quantile(double z, double a, double b, double g, double k) {
  return a + b * (1.0 + 0.8 * std::tanh(0.5 * g * z)) * std::pow(1.0 + z * z, k) * z;
}

Eigen::VectorXd gk_summaries(const Eigen::VectorXd& theta, std::uint64_t seed, int n) {
  check_theta(theta, 4, "gk_summaries");
  if (n < 16) throw std::invalid_argument("gk_summaries: n >= 16");
  const double a = theta[0], b = theta[1], g = theta[2], k = theta[3];
  if (b <= 0.0) throw std::invalid_argument("gk_summaries: b > 0");
  if (k <= -0.5) throw std::invalid_argument("gk_summaries: k > -0.5");

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) {
    const double z = normal_quantile(unif(rng));
    samples[i] = gk_quantile(z, a, b, g, k);
    if (!std::isfinite(samples[i]))
      throw SimulatorError("non-finite g-and-k quantile", theta);
  }
  std::sort(samples.begin(), samples.end());

  double e[8];
  for (int j = 1; j <= 7; ++j) e[j] = interpolated_quantile(samples, j / 8.0);
  const double spread = e[6] - e[2];
  if (!(spread > 0.0))
    throw SimulatorError("degenerate octile spread in the g-and-k sample", theta);

  Eigen::VectorXd out(4);
  out[0] = e[4];
  out[1] = spread;
  out[2] = (e[6] + e[2] - 2.0 * e[4]) / spread;
  out[3] = (e[7] - e[5] + e[3] - e[1]) / spread;
  return out;
}

Eigen::VectorXd lorenz_spin_up_state() {
  const int K = kLorenzSites;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(K, kLorenzForcing);
  x[0] += 0.01;
  const Eigen::VectorXd no_forcing = Eigen::VectorXd::Zero(K);
  for (int step = 0; step < 1000; ++step) lorenz_rk4_step(x, 0.0, 0.0, no_forcing);
  return x;
}

Eigen::VectorXd lorenz_summaries(const Eigen::VectorXd& theta, std::uint64_t seed) {
  check_theta(theta, 2, "lorenz_summaries");
  const int K = kLorenzSites;
  const int steps = 160;
  const double phi = 0.4;
  const double innov = std::sqrt(1.0 - phi * phi);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd x = lorenz_initial_state();
  Eigen::VectorXd eta(K);
  for (int k = 0; k < K; ++k) eta[k] = innov * normal(rng);

  Eigen::MatrixXd traj(steps + 1, K);
  traj.row(0) = x;
  for (int step = 0; step < steps; ++step) {
    lorenz_rk4_step(x, theta[0], theta[1], eta);
    if (x.cwiseAbs().maxCoeff() > 1e6)
      throw SimulatorError("state blow-up in the Lorenz integration", theta);
    traj.row(step + 1) = x;
    for (int k = 0; k < K; ++k) eta[k] = phi * eta[k] + innov * normal(rng);
  }

  const int T1 = steps + 1;
  const Eigen::RowVectorXd site_mean = traj.colwise().mean();
  const Eigen::MatrixXd c = traj.rowwise() - site_mean;

  Eigen::VectorXd out = Eigen::VectorXd::Zero(6);
  for (int k = 0; k < K; ++k) {
    const int j = (k + 1) % K;
    out[0] += site_mean[k];
    out[1] += c.col(k).squaredNorm() / T1;
    out[2] += c.col(k).head(T1 - 1).dot(c.col(k).tail(T1 - 1)) / (T1 - 1);
    out[3] += c.col(k).dot(c.col(j)) / T1;
    out[4] += c.col(k).head(T1 - 1).dot(c.col(j).tail(T1 - 1)) / (T1 - 1);
    out[5] += c.col(k).tail(T1 - 1).dot(c.col(j).head(T1 - 1)) / (T1 - 1);
  }
  return out / K;
}

ToyName parse_toy(const std::string& name) {
  if (name == "Simple2D") return ToyName::Simple2D;
  if (name == "Banana2D") return ToyName::Banana2D;
  if (name == "Bimodal2D") return ToyName::Bimodal2D;
  if (name == "Simple6D") return ToyName::Simple6D;
  if (name == "Banana6D") return ToyName::Banana6D;
  if (name == "Multimodal6D") return ToyName::Multimodal6D;
  throw std::invalid_argument(
      "unknown toy density '" + name +
      "' (expected Simple2D, Banana2D, Bimodal2D, Simple6D, Banana6D or Multimodal6D)");
}

std::string toy_name(ToyName name) {
  switch (name) {
    case ToyName::Simple2D: return "Simple2D";
    case ToyName::Banana2D: return "Banana2D";
    case ToyName::Bimodal2D: return "Bimodal2D";
    case ToyName::Simple6D: return "Simple6D";
    case ToyName::Banana6D: return "Banana6D";
    case ToyName::Multimodal6D: return "Multimodal6D";
  }
  throw std::invalid_argument("toy_name: bad enum value");
}

Box toy_box(ToyName name) {
  Eigen::Vector2d lo, up;
  switch (base2d(name)) {
    case ToyName::Simple2D:
      lo << -16, -16;
      up << 16, 16;
      break;
    case ToyName::Banana2D:
      lo << -6, -20;
      up << 6, 2;
      break;
    default:
      lo << -6, -6;
      up << 6, 6;
      break;
  }
  if (!is6d(name)) return Box(lo, up);
  Eigen::VectorXd lo6(6), up6(6);
  for (int b = 0; b < 3; ++b) {
    lo6.segment<2>(2 * b) = lo;
    up6.segment<2>(2 * b) = up;
  }
  return Box(lo6, up6);
}

double toy_logpdf(ToyName name, const Eigen::VectorXd& theta) {
  const int dim = is6d(name) ? 6 : 2;
  check_theta(theta, dim, "toy_logpdf");
  if (!toy_box(name).contains(theta)) return -std::numeric_limits<double>::infinity();
  const ToyName block = base2d(name);
  double value = 0.0;
  for (int b = 0; b < dim / 2; ++b)
    value += toy2d_logpdf(block, theta[2 * b], theta[2 * b + 1]);
  return value;
}

const std::vector<SimulatorSpec>& simulator_registry() {
  static const std::vector<SimulatorSpec> specs = [] {
    std::vector<SimulatorSpec> s(3);

    s[0].name = "ricker";
    s[0].domain = Box((Eigen::VectorXd(3) << 3, 4, 0).finished(),
                      (Eigen::VectorXd(3) << 5, 20, 0.8).finished());
    s[0].true_theta = (Eigen::VectorXd(3) << 3.8, 10, 0.3).finished();
    s[0].summary_dim = 13;
    s[0].default_repeats = 100;
    s[0].summaries = [](const Eigen::VectorXd& t, std::uint64_t seed) {
      return ricker_summaries(t, seed);
    };

    s[1].name = "gk";
    s[1].domain = Box((Eigen::VectorXd(4) << 2.5, 0.5, 1.5, 0.3).finished(),
                      (Eigen::VectorXd(4) << 3.5, 1.5, 2.5, 0.7).finished());
    s[1].true_theta = (Eigen::VectorXd(4) << 3, 1, 2, 0.5).finished();
    s[1].summary_dim = 4;
    s[1].default_repeats = 100;
    s[1].summaries = [](const Eigen::VectorXd& t, std::uint64_t seed) {
      return gk_summaries(t, seed);
    };

    s[2].name = "lorenz";
    s[2].domain = Box((Eigen::VectorXd(2) << 0, 0).finished(),
                      (Eigen::VectorXd(2) << 5, 0.5).finished());
    s[2].true_theta = (Eigen::VectorXd(2) << 2.0, 0.1).finished();
    s[2].summary_dim = 6;
    s[2].default_repeats = 100;
    s[2].summaries = [](const Eigen::VectorXd& t, std::uint64_t seed) {
      return lorenz_summaries(t, seed);
    };
    return s;
  }();
  return specs;
}

const SimulatorSpec& find_simulator(const std::string& name) {
  for (const SimulatorSpec& spec : simulator_registry())
    if (spec.name == name) return spec;
  throw std::invalid_argument("unknown simulator '" + name +
                              "' (expected ricker, gk or lorenz)");
}

}  // namespace gpsl
