#include "sensornet/samplestats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sensornet {

namespace {

// Largest population for which binomials fit a 64-bit mantissa exactly.
constexpr std::uint64_t kExactLimit = 60;

std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i; // exact: r*(n-k+i)/i = C(n-k+i, i)
    return r;
}

double lchoose(std::uint64_t n, std::uint64_t k)
{
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

void check_population(std::uint64_t big_n, std::uint64_t x, std::uint64_t s)
{
    if (x > big_n)
        throw std::invalid_argument("marked count X exceeds population N");
    if (s > big_n)
        throw std::invalid_argument("sample size S exceeds population N");
}

} // namespace

double hypergeom_pmf(std::uint64_t k, std::uint64_t big_n, std::uint64_t x, std::uint64_t s)
{
    check_population(big_n, x, s);
    const std::uint64_t hi = std::min(x, s);
    const std::uint64_t lo = s + x > big_n ? s + x - big_n : 0;
    if (k < lo || k > hi)
        return 0.0;
    if (big_n <= kExactLimit) {
        const long double num = static_cast<long double>(binom_u64(x, k)) *
                                static_cast<long double>(binom_u64(big_n - x, s - k));
        return static_cast<double>(num / static_cast<long double>(binom_u64(big_n, s)));
    }
    return std::exp(lchoose(x, k) + lchoose(big_n - x, s - k) - lchoose(big_n, s));
}

double prob_at_least(std::uint64_t x_s, std::uint64_t big_n, std::uint64_t x, std::uint64_t s)
{
    check_population(big_n, x, s);
    if (x_s == 0)
        return 1.0;
    const std::uint64_t hi = std::min(x, s);
    if (x_s > hi)
        return 0.0;
    const std::uint64_t lo = s + x > big_n ? s + x - big_n : 0;
    double total = 0.0;
    for (std::uint64_t k = std::max(x_s, lo); k <= hi; ++k)
        total += hypergeom_pmf(k, big_n, x, s);
    return std::min(total, 1.0);
}

double multi_sample_prob(double p_alpha, std::uint32_t n_s, std::uint32_t s)
{
    if (p_alpha < 0.0 || p_alpha > 1.0)
        throw std::invalid_argument("p_alpha must lie in [0, 1]");
    if (s < 1 || s > n_s)
        throw std::invalid_argument("need 1 <= s <= n_s");
    if (p_alpha == 0.0)
        return 0.0;
    if (p_alpha == 1.0)
        return 1.0;
    const double lp = std::log(p_alpha);
    const double lq = std::log1p(-p_alpha);
    double total = 0.0;
    for (std::uint32_t i = s; i <= n_s; ++i)
        total += std::exp(lchoose(n_s, i) + i * lp + (n_s - i) * lq);
    return std::min(total, 1.0);
}

std::vector<DetectionPoint> detection_curve(const DetectionDesign& design,
                                            const std::vector<std::uint64_t>& x_grid)
{
    if (design.sample_size == 0 || design.sample_size > design.population)
        throw std::invalid_argument("need 0 < S <= N");
    if (design.min_users == 0 || design.min_users > design.sample_size)
        throw std::invalid_argument("need 1 <= x_s <= S");
    if (design.min_samples < 1 || design.min_samples > design.n_samples)
        throw std::invalid_argument("need 1 <= s <= n_s");

    std::vector<DetectionPoint> curve;
    curve.reserve(x_grid.size());
    for (std::uint64_t x : x_grid) {
        if (x > design.population)
            throw std::invalid_argument("X grid value exceeds population N");
        const double p =
            prob_at_least(design.min_users, design.population, x, design.sample_size);
        curve.push_back({x, multi_sample_prob(p, design.n_samples, design.min_samples)});
    }
    return curve;
}

} // namespace sensornet
