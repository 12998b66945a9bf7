#include "sensornet/paradox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace sensornet {

ParadoxStats paradox_stats(const DegreeDistribution& dist)
{
    ParadoxStats s;
    s.mu = dist.mean();
    s.sigma2 = dist.variance();
    if (s.mu <= 0.0)
        throw std::runtime_error("degenerate distribution: mean degree is zero");
    s.rho = s.mu + s.sigma2 / s.mu;
    return s;
}

DegreeDistribution friend_degree_dist(const DegreeDistribution& dist)
{
    const double mu = dist.mean();
    if (mu <= 0.0)
        throw std::runtime_error("degenerate distribution: mean degree is zero");
    std::vector<std::uint64_t> support(dist.support());
    std::vector<double> mass(dist.mass());
    for (std::size_t i = 0; i < support.size(); ++i)
        mass[i] = static_cast<double>(support[i]) * mass[i] / mu;
    return DegreeDistribution::from_mass(std::move(support), std::move(mass));
}

DegreeDistribution sampled_friend_dist(const DegreeDistribution& dist, double gamma, bool dedup)
{
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("gamma must lie in (0, 1]");
    std::vector<std::uint64_t> support(dist.support());
    std::vector<double> mass(dist.mass());
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const double k = static_cast<double>(support[i]);
        // Probability that a degree-k node is named by at least one sampler.
        const double named = 1.0 - std::pow(1.0 - gamma, k);
        const double weight = dedup ? named : k * named;
        mass[i] *= weight;
        total += mass[i];
    }
    if (total <= 0.0)
        throw std::runtime_error("degenerate distribution: no mass on positive degrees");
    for (double& m : mass)
        m /= total;
    return DegreeDistribution::from_mass(std::move(support), std::move(mass));
}

NodeSample sample_control(const Graph& g, std::uint32_t size, std::uint64_t seed)
{
    const NodeId n = g.node_count();
    if (size < 1 || size > n)
        throw std::invalid_argument("control size must lie in [1, node_count]");
    Rng rng(seed);
    NodeSample sample;
    sample.members = rng.sample_without_replacement(n, size);
    sample.origin = SampleOrigin::control;
    sample.gamma = static_cast<double>(size) / static_cast<double>(n);
    sample.policy = "uniform";
    sample.seed = seed;
    return sample;
}

std::vector<NodeId> pooled_neighbor_union(const Graph& g, const std::vector<NodeId>& nodes,
                                          Direction direction)
{
    std::vector<NodeId> pool;
    for (NodeId u : nodes) {
        const auto nbrs = g.neighbors(u, direction);
        pool.insert(pool.end(), nbrs.begin(), nbrs.end());
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    return pool;
}

NodeSample sample_sensors(const Graph& g, const NodeSample& control, SensorPolicy policy,
                          Direction direction, std::uint32_t target_size, std::uint64_t seed)
{
    if (control.members.empty())
        throw std::invalid_argument("control sample is empty");

    NodeSample sample;
    sample.origin = SampleOrigin::sensor;
    sample.gamma = control.gamma;
    sample.seed = seed;

    if (policy == SensorPolicy::mirror_control) {
        sample.policy = "mirror-control";
        sample.members = control.members;
        return sample;
    }

    Rng rng(seed);
    if (policy == SensorPolicy::per_node_friend) {
        sample.policy = "per-node-friend";
        std::vector<NodeId> picked;
        picked.reserve(control.members.size());
        for (NodeId u : control.members) {
            const auto nbrs = g.neighbors(u, direction);
            if (nbrs.empty()) {
                ++sample.skipped_isolated;
                continue;
            }
            picked.push_back(nbrs[rng.below(nbrs.size())]);
        }
        if (picked.empty())
            throw std::runtime_error("all control nodes are isolated; no sensors available");
        std::sort(picked.begin(), picked.end());
        picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
        sample.members = std::move(picked);
    } else {
        sample.policy = "pooled-neighbors";
        if (target_size < 1)
            throw std::invalid_argument("target_size must be at least 1");
        const std::vector<NodeId> pool = pooled_neighbor_union(g, control.members, direction);
        if (pool.empty())
            throw std::runtime_error("all control nodes are isolated; no sensors available");
        if (pool.size() < target_size)
            throw std::runtime_error("sensor pool holds " + std::to_string(pool.size()) +
                                     " nodes, fewer than the requested " +
                                     std::to_string(target_size));
        const auto picks = rng.sample_without_replacement(
            static_cast<std::uint32_t>(pool.size()), target_size);
        sample.members.reserve(picks.size());
        for (NodeId i : picks)
            sample.members.push_back(pool[i]);
    }
    return sample;
}

NodeSample remove_overlap(const NodeSample& control, const NodeSample& sensor)
{
    std::unordered_set<NodeId> drop(sensor.members.begin(), sensor.members.end());
    NodeSample out = control;
    out.members.clear();
    for (NodeId u : control.members)
        if (!drop.count(u))
            out.members.push_back(u);
    return out;
}

double sample_mean_degree(const Graph& g, const NodeSample& sample, Direction direction)
{
    if (sample.members.empty())
        throw std::invalid_argument("cannot average over an empty sample");
    double total = 0.0;
    for (NodeId u : sample.members)
        total += g.degree(u, direction);
    return total / static_cast<double>(sample.members.size());
}

DegreeDistribution sample_degree_dist(const Graph& g, const NodeSample& sample,
                                      Direction direction)
{
    std::vector<std::uint64_t> degrees;
    degrees.reserve(sample.members.size());
    for (NodeId u : sample.members)
        degrees.push_back(g.degree(u, direction));
    return DegreeDistribution::from_degrees(degrees);
}

} // namespace sensornet
