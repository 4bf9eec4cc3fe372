#include "gpsl/tv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpsl/math.hpp"
#include "gpsl/quadrature.hpp"

namespace gpsl {

namespace {

// cell probabilities of a log-density over grid points, or empty if no mass
Eigen::VectorXd normalized_cells(const std::function<double(const Eigen::VectorXd&)>& logf,
                                 const Eigen::MatrixXd& points) {
  Eigen::VectorXd logv(points.rows());
  for (int i = 0; i < points.rows(); ++i) logv[i] = logf(points.row(i).transpose());
  const double lse = log_sum_exp(logv);
  if (!std::isfinite(lse)) return Eigen::VectorXd();
  return (logv.array() - lse).exp();
}

}  // namespace

double tv_grid(const std::function<double(const Eigen::VectorXd&)>& logp,
               const std::function<double(const Eigen::VectorXd&)>& logq,
               const Box& box, int resolution) {
  if (box.dim() != 2) throw std::invalid_argument("tv_grid: 2D boxes only");
  const WeightedPointSet grid = grid_points(box, resolution);
  const Eigen::VectorXd p = normalized_cells(logp, grid.points);
  const Eigen::VectorXd q = normalized_cells(logq, grid.points);
  if (p.size() == 0 || q.size() == 0)
    throw std::invalid_argument("tv_grid: a density carries no mass on the box");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double marginal_tv(const Eigen::MatrixXd& samples_a, const Eigen::MatrixXd& samples_b,
                   const Box& box, int n_bins) {
  const int d = box.dim();
  if (samples_a.rows() == 0 || samples_b.rows() == 0)
    throw std::invalid_argument("marginal_tv: empty sample set");
  if (samples_a.cols() != d || samples_b.cols() != d)
    throw std::invalid_argument("marginal_tv: sample dimension does not match the box");
  if (n_bins < 2) throw std::invalid_argument("marginal_tv: n_bins >= 2");

  auto histogram = [&](const Eigen::MatrixXd& s, int j) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n_bins);
    const double lo = box.lower[j];
    const double width = (box.upper[j] - box.lower[j]) / n_bins;
    for (int i = 0; i < s.rows(); ++i) {
      int bin = width > 0.0 ? static_cast<int>(std::floor((s(i, j) - lo) / width)) : 0;
      bin = std::clamp(bin, 0, n_bins - 1);  // boundary samples land in edge bins
      h[bin] += 1.0;
    }
    return Eigen::VectorXd(h / s.rows());
  };

  double total = 0.0;
  for (int j = 0; j < d; ++j)
    total += 0.5 * (histogram(samples_a, j) - histogram(samples_b, j)).cwiseAbs().sum();
  return total / d;
}

}  // namespace gpsl
