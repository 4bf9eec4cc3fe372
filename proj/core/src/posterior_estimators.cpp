#include "gpsl/posterior_estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpsl/math.hpp"

namespace gpsl {

namespace {
void check_sd(double s) {
  if (!(s >= 0.0) || !std::isfinite(s))
    throw std::invalid_argument("posterior estimator: sd must be finite and >= 0");
}
}  // namespace

double log_unnorm_mean(double logpi, double m, double s) {
  check_sd(s);
  return logpi + m + 0.5 * s * s;
}

double log_unnorm_variance(double logpi, double m, double s) {
  check_sd(s);
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  return 2.0 * logpi + 2.0 * m + s * s + log_expm1(s * s);
}

double log_unnorm_median(double logpi, double m) { return logpi + m; }

double log_unnorm_quantile(double logpi, double m, double s, double alpha) {
  check_sd(s);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("log_unnorm_quantile: alpha must be in (0,1)");
  return logpi + m + normal_quantile(alpha) * s;
}

double log_iqr_width(double logpi, double m, double s, double u) {
  check_sd(s);
  if (!(u > 0.0)) throw std::invalid_argument("log_iqr_width: u must be positive");
  return logpi + m + log_2sinh(u * s);
}

double log_l1_risk_integrand(double logpi, double m, double s) {
  check_sd(s);
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  // 2 Phi(s) - 1 = erf(s / sqrt(2))
  return logpi + m + 0.5 * s * s + std::log(std::erf(s * M_SQRT1_2));
}

double exceedance_of_mean(double s) {
  check_sd(s);
  return normal_cdf(-0.5 * s);
}

}  // namespace gpsl
