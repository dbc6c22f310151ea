#pragma once

#include <functional>
#include <span>
#include <vector>

namespace edrdim::stats {

/// Upper tail P(X > x) of a chi-squared law with `df` degrees of freedom.
double chi2_survival(double x, double df);
double chi2_cdf(double x, double df);
double chi2_quantile(double p, double df);

/// Sample quantile of already sorted data by linear interpolation between
/// order statistics (Hyndman-Fan type 7, the R default).
double quantile_type7(std::span<const double> sorted, double p);

/// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic p-value of the KS statistic `d` for sample size n, using the
/// Stephens small-sample correction of the Kolmogorov limit law.
double ks_pvalue(double d, std::size_t n);

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // divisor n - 1
double kurtosis(std::span<const double> x);  // E(x - mean)^4 / var^2, divisor n

}  // namespace edrdim::stats
