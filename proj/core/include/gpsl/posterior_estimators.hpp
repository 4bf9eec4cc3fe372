#pragma once

namespace gpsl {

// Pointwise summaries of the unnormalized posterior density pi(theta) e^{f(theta)}
// when f(theta) is Gaussian with mean m and sd s; everything stays in log space.
// logpi may be -inf (outside the prior support), which propagates correctly.

double log_unnorm_mean(double logpi, double m, double s);      // logpi + m + s^2/2
double log_unnorm_variance(double logpi, double m, double s);  // 2logpi + 2m + s^2 + log(e^{s^2}-1)
double log_unnorm_median(double logpi, double m);              // logpi + m
double log_unnorm_quantile(double logpi, double m, double s, double alpha);

// interquantile width between quantiles p_u and 1-p_u: logpi + m + log(2 sinh(u s)),
// u the standard normal quantile of p_u
double log_iqr_width(double logpi, double m, double s, double u);

// integrand of the L1 estimation risk: logpi + m + s^2/2 + log(2 Phi(s) - 1)
double log_l1_risk_integrand(double logpi, double m, double s);

// P[e^f exceeds its own mean e^{m + s^2/2}] = Phi(-s/2)
double exceedance_of_mean(double s);

}  // namespace gpsl
