#pragma once

#include <utility>
#include <vector>

namespace rrg {

double mean(const std::vector<double>& x);
// Sample variance with n - 1 in the denominator; 0 for fewer than two values.
double variance(const std::vector<double>& x);
double standard_error(const std::vector<double>& x);
double sample_covariance(const std::vector<double>& x, const std::vector<double>& y);
// Standard error of the sample covariance estimator, from the spread of (x - mx)(y - my).
double covariance_standard_error(const std::vector<double>& x, const std::vector<double>& y);

struct LinearFit {
  double slope = 0.0, intercept = 0.0;
  double slope_se = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // 95% Student-t interval for the slope
  std::size_t n = 0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

double quantile(std::vector<double> x, double q);

}  // namespace rrg
