#pragma once

#include <vector>

namespace t2qc {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);

/// Chi-square quantile (inverse CDF), 0 < prob < 1.
double chi2_quantile(double prob, double df);

double normal_cdf(double z);
double normal_sf(double z);

/// Order statistic at 1-based index ceil(q * n) of an unsorted sample copy;
/// the conservative empirical-quantile convention used for control limits.
double empirical_quantile_ceil(std::vector<double> sample, double q);

/// Kolmogorov-Smirnov distance between a sample (sorted internally) and a
/// reference CDF evaluated pointwise.
double ks_distance(std::vector<double> sample, double (*cdf)(double, double),
                   double cdf_param);

}  // namespace t2qc
