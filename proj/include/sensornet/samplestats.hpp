#pragma once

#include <cstdint>
#include <vector>

namespace sensornet {

// Hypergeometric point mass: probability that a uniform size-S subset of a
// size-N population containing X marked items holds exactly k of them.
double hypergeom_pmf(std::uint64_t k, std::uint64_t big_n, std::uint64_t x, std::uint64_t s);

// P(at least x_s marked items in the sample), the upper tail of the pmf.
double prob_at_least(std::uint64_t x_s, std::uint64_t big_n, std::uint64_t x, std::uint64_t s);

// P(at least s of n_s independent samples each detect), binomial upper tail
// at per-sample detection probability p_alpha.
double multi_sample_prob(double p_alpha, std::uint32_t n_s, std::uint32_t s);

// Multi-sample detection design: n_s samples of size S from a population of
// N, a sample detects when it holds at least x_s marked items, and the design
// detects when at least s samples do.
struct DetectionDesign {
    std::uint64_t population = 0;   // N
    std::uint64_t sample_size = 0;  // S
    std::uint64_t min_users = 1;    // x_s
    std::uint32_t n_samples = 1;    // n_s
    std::uint32_t min_samples = 1;  // s
};

struct DetectionPoint {
    std::uint64_t x_alpha = 0;
    double probability = 0.0;
};

// Detection probability at each candidate marked-population size; the curve
// callers read maximum-likelihood estimates from.
std::vector<DetectionPoint> detection_curve(const DetectionDesign& design,
                                            const std::vector<std::uint64_t>& x_grid);

} // namespace sensornet
