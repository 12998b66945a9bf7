#pragma once

#include <cstdint>
#include <vector>

namespace sensornet {

double mean(const std::vector<double>& values);

// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_sd(const std::vector<double>& values);

// sd / sqrt(n); 0 for fewer than two values.
double standard_error(const std::vector<double>& values);

// Linear-interpolation quantile on a copy of the data (R type 7), q in [0,1].
double quantile(std::vector<double> values, double q);

// Standard normal CDF.
double normal_cdf(double x);

// Two-sided p-value of the pooled two-proportion z-test on counts
// (x1 of n1) vs (x2 of n2). Returns 1.0 when the pooled variance vanishes.
double two_proportion_p_value(std::uint64_t x1, std::uint64_t n1,
                              std::uint64_t x2, std::uint64_t n2);

// Two-sided p-value of Welch's t-test with a normal approximation to the
// t reference (adequate at the sample sizes used here).
double welch_p_value(const std::vector<double>& a, const std::vector<double>& b);

// Discrete power-law tail exponent by maximum likelihood over samples >= kmin:
// alpha = 1 + n / sum(log(k / (kmin - 0.5))).
double power_law_mle_alpha(const std::vector<double>& samples, double kmin);

} // namespace sensornet
