#include "gpsl/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace gpsl {

NelderMeadResult nelder_mead_box(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Box& box, const Eigen::VectorXd& x0,
                                 const NelderMeadOptions& opts) {
  const int d = box.dim();
  std::vector<int> free_dims;
  for (int i = 0; i < d; ++i)
    if (box.side(i) > 0.0) free_dims.push_back(i);
  const int n = static_cast<int>(free_dims.size());

  NelderMeadResult res;
  int evals = 0;
  auto eval_full = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(box.clamp(x));
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  Eigen::VectorXd base = box.clamp(x0);
  if (n == 0 || opts.max_evals <= 1) {
    res.x = base;
    res.value = eval_full(base);
    res.evals = evals;
    return res;
  }

  auto embed = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd x = base;
    for (int i = 0; i < n; ++i) x[free_dims[i]] = z[i];
    return box.clamp(x);
  };
  auto eval = [&](const Eigen::VectorXd& z) { return eval_full(embed(z)); };

  // initial simplex: step along each free axis, flipped if it would leave the box
  std::vector<Eigen::VectorXd> xs(n + 1);
  std::vector<double> fs(n + 1);
  Eigen::VectorXd z0(n);
  for (int i = 0; i < n; ++i) z0[i] = base[free_dims[i]];
  xs[0] = z0;
  fs[0] = eval(z0);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z = z0;
    const int di = free_dims[i];
    double step = opts.initial_step * box.side(di);
    if (z[i] + step > box.upper[di]) step = -step;
    z[i] += step;
    xs[i + 1] = z;
    fs[i + 1] = eval(z);
  }

  std::vector<int> order(n + 1);
  auto sort_simplex = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
  };

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  while (evals < opts.max_evals) {
    sort_simplex();
    const int best = order[0], worst = order[n], second = order[n - 1];
    if (std::abs(fs[worst] - fs[best]) <=
        opts.ftol * (std::abs(fs[best]) + opts.ftol))
      break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int k = 0; k <= n; ++k)
      if (k != worst) centroid += xs[k];
    centroid /= n;

    Eigen::VectorXd xr = centroid + alpha * (centroid - xs[worst]);
    const double fr = eval(xr);
    if (fr < fs[best]) {
      Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
      const double fe = evals < opts.max_evals ? eval(xe) : fr;
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      Eigen::VectorXd xc;
      if (outside)
        xc = centroid + rho * (xr - centroid);
      else
        xc = centroid - rho * (centroid - xs[worst]);
      const double fc = evals < opts.max_evals ? eval(xc) : fr;
      if (fc < (outside ? fr : fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int k = 0; k <= n; ++k) {
          if (k == best) continue;
          xs[k] = xs[best] + sigma * (xs[k] - xs[best]);
          if (evals < opts.max_evals) fs[k] = eval(xs[k]);
        }
      }
    }
  }

  sort_simplex();
  res.x = embed(xs[order[0]]);
  res.value = fs[order[0]];
  res.evals = evals;
  return res;
}

}  // namespace gpsl
