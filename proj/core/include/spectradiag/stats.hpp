#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spectradiag::stats {

double mean(std::span<const double> x);

/// Population (ddof = 0) variance.
double variance(std::span<const double> x);

/// Sample (ddof = 1) standard deviation; 0 for fewer than two values.
double sample_sd(std::span<const double> x);

/// Linear-interpolation quantile (numpy default), q in [0, 1].
double quantile(std::vector<double> x, double q);

/// Median of a non-empty sample.
double median(std::vector<double> x);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> x);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

double standard_normal_cdf(double z);
double standard_normal_quantile(double p);

}  // namespace spectradiag::stats
