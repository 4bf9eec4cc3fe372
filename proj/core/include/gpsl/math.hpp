#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace gpsl {

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);  // inverse of normal_cdf, p in (0,1)

// log(exp(x) - 1) for x > 0
double log_expm1(double x);
// log(1 - exp(x)) for x < 0
double log1m_exp(double x);
// log(exp(a) - exp(b)), requires a >= b; returns -inf when a == b
double log_diff_exp(double a, double b);
// log(2 sinh(x)) for x >= 0, linearized to log(2x) for tiny x
double log_2sinh(double x);

// Deterministic seed derivation (splitmix64-based); used to hand every
// simulator repeat, chain and restart its own independent stream.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                              std::uint64_t d) {
  return mix_seed(mix_seed(a, b, c), d);
}

using Rng = std::mt19937_64;

}  // namespace gpsl
