#include "sensornet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sensornet {

double mean(const std::vector<double>& values)
{
    if (values.empty())
        throw std::invalid_argument("mean of empty vector");
    double s = 0.0;
    for (double v : values)
        s += v;
    return s / static_cast<double>(values.size());
}

double sample_sd(const std::vector<double>& values)
{
    const std::size_t n = values.size();
    if (n < 2)
        return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values)
        ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double standard_error(const std::vector<double>& values)
{
    if (values.size() < 2)
        return 0.0;
    return sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        throw std::invalid_argument("quantile of empty vector");
    if (q < 0.0 || q > 1.0)
        throw std::invalid_argument("quantile level outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size())
        return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double two_proportion_p_value(std::uint64_t x1, std::uint64_t n1,
                              std::uint64_t x2, std::uint64_t n2)
{
    if (n1 == 0 || n2 == 0)
        throw std::invalid_argument("two_proportion_p_value: empty group");
    const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
    const double var = pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
    if (var <= 0.0)
        return 1.0;
    const double z = (p1 - p2) / std::sqrt(var);
    return 2.0 * (1.0 - normal_cdf(std::fabs(z)));
}

double welch_p_value(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() < 2 || b.size() < 2)
        return 1.0;
    const double va = sample_sd(a) * sample_sd(a) / static_cast<double>(a.size());
    const double vb = sample_sd(b) * sample_sd(b) / static_cast<double>(b.size());
    if (va + vb <= 0.0)
        return 1.0;
    const double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
    return 2.0 * (1.0 - normal_cdf(std::fabs(t)));
}

double power_law_mle_alpha(const std::vector<double>& samples, double kmin)
{
    double log_sum = 0.0;
    std::size_t n = 0;
    for (double k : samples) {
        if (k >= kmin) {
            log_sum += std::log(k / (kmin - 0.5));
            ++n;
        }
    }
    if (n == 0)
        throw std::invalid_argument("power_law_mle_alpha: no samples above kmin");
    return 1.0 + static_cast<double>(n) / log_sum;
}

} // namespace sensornet
