#include "gpsl/box.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gpsl/errors.hpp"

namespace gpsl {

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd up)
    : lower(std::move(lo)), upper(std::move(up)) {
  if (lower.size() != upper.size())
    throw std::invalid_argument("Box: lower/upper size mismatch");
  for (int i = 0; i < dim(); ++i) {
    if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw std::invalid_argument("Box: requires finite lower <= upper");
  }
}

Box Box::cube(double lo, double up, int dim) {
  return Box(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, up));
}

double Box::volume() const { return sides().prod(); }

double Box::log_volume() const {
  double acc = 0.0;
  for (int i = 0; i < dim(); ++i) acc += std::log(side(i));
  return acc;
}

bool Box::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

Eigen::VectorXd Box::clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Eigen::VectorXd Box::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) x[i] = lower[i] + side(i) * unif(rng);
  return x;
}

Eigen::MatrixXd Box::sample_n(Rng& rng, int n) const {
  Eigen::MatrixXd out(n, dim());
  for (int r = 0; r < n; ++r) out.row(r) = sample(rng).transpose();
  return out;
}

Eigen::MatrixXd Box::latin_hypercube(Rng& rng, int n) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd out(n, dim());
  std::vector<int> perm(n);
  for (int j = 0; j < dim(); ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int r = 0; r < n; ++r)
      out(r, j) = lower[j] + side(j) * ((perm[r] + unif(rng)) / n);
  }
  return out;
}

std::string format_point(const Eigen::VectorXd& theta) {
  std::string s = "(";
  for (int i = 0; i < theta.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(theta[i]);
  }
  return s + ")";
}

}  // namespace gpsl
