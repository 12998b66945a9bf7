#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sensornet/graph.hpp"
#include "sensornet/rng.hpp"

namespace sensornet {

// Mean degree, degree variance, and mean friend-of-friend degree of a
// distribution. rho = mu + sigma2/mu always holds for these fields.
struct ParadoxStats {
    double mu = 0.0;
    double sigma2 = 0.0;
    double rho = 0.0;
};

enum class SampleOrigin { control, sensor };

// mirror_control re-uses the control set as the sensor set, the degenerate
// baseline against which any real policy is compared.
enum class SensorPolicy { per_node_friend, pooled_neighbors, mirror_control };

// A drawn node set. members is sorted and duplicate-free; skipped_isolated
// counts control nodes that contributed no sensor under per_node_friend.
struct NodeSample {
    std::vector<NodeId> members;
    SampleOrigin origin = SampleOrigin::control;
    double gamma = 0.0;
    std::string policy = "uniform";
    std::uint64_t seed = 0;
    std::uint32_t skipped_isolated = 0;

    std::size_t size() const { return members.size(); }
};

ParadoxStats paradox_stats(const DegreeDistribution& dist);

// Q(k) = k P(k) / mu: the degree distribution seen by following a uniform
// random edge endpoint.
DegreeDistribution friend_degree_dist(const DegreeDistribution& dist);

// Degree distribution of the friends named by a random fraction gamma of the
// network. dedup=false weights by k (a node can be named once per neighbor);
// dedup=true counts each named node once.
DegreeDistribution sampled_friend_dist(const DegreeDistribution& dist, double gamma, bool dedup);

NodeSample sample_control(const Graph& g, std::uint32_t size, std::uint64_t seed);

// Union of all neighbors of the given nodes in the chosen direction, sorted,
// duplicate-free. direction is ignored on undirected graphs.
std::vector<NodeId> pooled_neighbor_union(const Graph& g, const std::vector<NodeId>& nodes,
                                          Direction direction);

// per_node_friend picks one uniform neighbor of each control node (isolated
// nodes are skipped and counted); target_size is ignored. pooled_neighbors
// samples target_size nodes from the neighbor union of the control set.
NodeSample sample_sensors(const Graph& g, const NodeSample& control, SensorPolicy policy,
                          Direction direction, std::uint32_t target_size, std::uint64_t seed);

// Returns control with any node also present in sensor removed.
NodeSample remove_overlap(const NodeSample& control, const NodeSample& sensor);

// Mean degree of the sampled nodes in the chosen direction.
double sample_mean_degree(const Graph& g, const NodeSample& sample, Direction direction);

DegreeDistribution sample_degree_dist(const Graph& g, const NodeSample& sample,
                                      Direction direction);

} // namespace sensornet
