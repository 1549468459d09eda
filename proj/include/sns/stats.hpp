#pragma once

#include <cstddef>
#include <span>

namespace sns {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error (sample standard deviation / sqrt(n)).
MeanSe mean_se(std::span<const double> values);

/// sqrt(p (1 - p) / n).
double binomial_se(double p, std::size_t n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope x. Needs at least two
/// distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace sns
