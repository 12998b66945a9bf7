#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sensornet {

using NodeId = std::uint32_t;

enum class Directedness { directed, undirected };

enum class Direction { in, out, total };

struct Edge {
    NodeId src;
    NodeId dst;
};

// Immutable adjacency structure over dense node ids 0..node_count-1, stored
// in CSR form with sorted neighbor lists. Undirected graphs keep each edge in
// both endpoint lists; directed graphs keep a separate in-CSR for reverse
// queries. Safe for concurrent reads.
class Graph {
public:
    NodeId node_count() const { return node_count_; }
    std::uint64_t edge_count() const { return edge_count_; }
    Directedness directedness() const { return directedness_; }
    bool is_directed() const { return directedness_ == Directedness::directed; }

    std::span<const NodeId> out_neighbors(NodeId u) const
    {
        return {out_targets_.data() + out_offsets_[u],
                out_targets_.data() + out_offsets_[u + 1]};
    }

    std::span<const NodeId> in_neighbors(NodeId u) const
    {
        if (!is_directed())
            return out_neighbors(u);
        return {in_targets_.data() + in_offsets_[u],
                in_targets_.data() + in_offsets_[u + 1]};
    }

    std::span<const NodeId> neighbors(NodeId u, Direction d) const
    {
        return d == Direction::in ? in_neighbors(u) : out_neighbors(u);
    }

    std::uint64_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }
    std::uint64_t in_degree(NodeId u) const
    {
        return is_directed() ? in_offsets_[u + 1] - in_offsets_[u] : out_degree(u);
    }
    std::uint64_t degree(NodeId u, Direction d) const;

    bool has_edge(NodeId u, NodeId v) const; // follows edge orientation

private:
    friend struct GraphBuilder;
    NodeId node_count_ = 0;
    std::uint64_t edge_count_ = 0;
    Directedness directedness_ = Directedness::undirected;
    std::vector<std::uint64_t> out_offsets_;
    std::vector<NodeId> out_targets_;
    std::vector<std::uint64_t> in_offsets_; // directed only
    std::vector<NodeId> in_targets_;        // directed only
};

struct BuildStats {
    std::uint64_t self_loops_dropped = 0;
    std::uint64_t duplicates_dropped = 0;
};

struct GraphBuild {
    Graph graph;
    BuildStats stats;
};

// Self-loops are dropped and duplicate edges collapsed; both are counted in
// the returned stats. node_count defaults to max id + 1; passing it
// explicitly allows trailing isolated nodes, and any edge id at or beyond it
// is an error.
GraphBuild build_graph(std::vector<Edge> edges, Directedness directedness,
                       std::optional<NodeId> node_count = std::nullopt);

// Graph of node_count isolated nodes with no edges.
Graph isolated_graph(NodeId node_count, Directedness directedness);

// Preferential attachment: m initially isolated nodes, the first attaching
// node links to all of them, every later node draws m distinct targets with
// probability proportional to current degree. Each node's draws come from its
// own seed-derived substream.
Graph generate_ba(NodeId n, NodeId m, std::uint64_t seed);

// Normalized degree histogram with cached moments.
class DegreeDistribution {
public:
    static DegreeDistribution from_degrees(const std::vector<std::uint64_t>& degrees);
    // mass must be non-negative and sum to 1 within 1e-9.
    static DegreeDistribution from_mass(std::vector<std::uint64_t> support, std::vector<double> mass);

    const std::vector<std::uint64_t>& support() const { return support_; }
    const std::vector<double>& mass() const { return mass_; }
    double mean() const { return mu_; }
    double variance() const { return sigma2_; }

private:
    std::vector<std::uint64_t> support_; // sorted ascending, unique
    std::vector<double> mass_;
    double mu_ = 0.0;
    double sigma2_ = 0.0;
};

DegreeDistribution degree_histogram(const Graph& g, Direction direction);

// Sup distance between the two distributions' CDFs over the union support.
double ks_distance(const DegreeDistribution& a, const DegreeDistribution& b);

// 0.5 * sum |P(k) - Q(k)| over the union support.
double total_variation_distance(const DegreeDistribution& a, const DegreeDistribution& b);

struct ComponentReport {
    std::uint64_t component_count = 0;
    std::vector<std::uint64_t> component_sizes; // descending
    double giant_fraction = 0.0;
};

// Weakly connected components (edge orientation ignored).
ComponentReport connected_components(const Graph& g);

inline constexpr NodeId kDefaultBetweennessCap = 200000;

// Exact unnormalized shortest-path betweenness (Brandes). Undirected graphs
// count each unordered pair once; directed graphs use directed shortest
// paths. Parallelized over sources; betweenness_serial is the reference
// implementation the tests and the benchmark compare against.
std::vector<double> betweenness(const Graph& g, NodeId cap = kDefaultBetweennessCap);
std::vector<double> betweenness_serial(const Graph& g, NodeId cap = kDefaultBetweennessCap);

} // namespace sensornet
