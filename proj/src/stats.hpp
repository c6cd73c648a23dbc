#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jdlab {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs); // unbiased, n-1

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};
// Ordinary least squares y = intercept + slope * x with the usual
// homoskedastic slope standard error.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Standard normal CDF.
double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov against a N(0, sigma2) law: returns the
// statistic D and the asymptotic p-value (Kolmogorov series with the
// small-sample correction factor sqrt(n) + 0.12 + 0.11/sqrt(n)).
struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
KsResult ks_test_normal(std::span<const double> xs, double sigma2);

// Long-run standard error of the mean of a correlated series by
// non-overlapping batch means.
double batch_means_se(std::span<const double> xs, std::size_t n_batches = 32);

// Least-squares exponential decay rate: fits log|y| = a - rho * u over the
// entries with y > 0; returns rho (0 if fewer than two usable points).
double fit_decay_rate(std::span<const double> u, std::span<const double> y);

} // namespace jdlab
