#include "sensornet/graph.hpp"

#include "sensornet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sensornet {

std::uint64_t Graph::degree(NodeId u, Direction d) const
{
    switch (d) {
    case Direction::in:
        return in_degree(u);
    case Direction::out:
        return out_degree(u);
    case Direction::total:
        return is_directed() ? in_degree(u) + out_degree(u) : out_degree(u);
    }
    return 0;
}

bool Graph::has_edge(NodeId u, NodeId v) const
{
    const auto nbrs = out_neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

namespace {

std::vector<std::uint64_t> csr_offsets(NodeId n, const std::vector<Edge>& edges)
{
    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : edges)
        ++offsets[e.src + 1];
    for (std::size_t i = 1; i < offsets.size(); ++i)
        offsets[i] += offsets[i - 1];
    return offsets;
}

std::vector<NodeId> csr_targets(const std::vector<std::uint64_t>& offsets,
                                const std::vector<Edge>& edges, NodeId n)
{
    std::vector<NodeId> targets(edges.size());
    std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const Edge& e : edges)
        targets[cursor[e.src]++] = e.dst;
    for (NodeId u = 0; u < n; ++u)
        std::sort(targets.begin() + static_cast<std::ptrdiff_t>(offsets[u]),
                  targets.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]));
    return targets;
}

} // namespace

struct GraphBuilder {
    static Graph assemble(NodeId n, Directedness directedness,
                          const std::vector<Edge>& oriented_edges)
    {
        Graph g;
        g.node_count_ = n;
        g.directedness_ = directedness;
        if (directedness == Directedness::undirected) {
            std::vector<Edge> both;
            both.reserve(oriented_edges.size() * 2);
            for (const Edge& e : oriented_edges) {
                both.push_back(e);
                both.push_back({e.dst, e.src});
            }
            g.out_offsets_ = csr_offsets(n, both);
            g.out_targets_ = csr_targets(g.out_offsets_, both, n);
            g.edge_count_ = oriented_edges.size();
        } else {
            g.out_offsets_ = csr_offsets(n, oriented_edges);
            g.out_targets_ = csr_targets(g.out_offsets_, oriented_edges, n);
            std::vector<Edge> reversed;
            reversed.reserve(oriented_edges.size());
            for (const Edge& e : oriented_edges)
                reversed.push_back({e.dst, e.src});
            g.in_offsets_ = csr_offsets(n, reversed);
            g.in_targets_ = csr_targets(g.in_offsets_, reversed, n);
            g.edge_count_ = oriented_edges.size();
        }
        return g;
    }
};

Graph isolated_graph(NodeId node_count, Directedness directedness)
{
    if (node_count == 0)
        throw std::invalid_argument("empty graph: node_count must be positive");
    return GraphBuilder::assemble(node_count, directedness, {});
}

GraphBuild build_graph(std::vector<Edge> edges, Directedness directedness,
                       std::optional<NodeId> node_count)
{
    if (edges.empty())
        throw std::invalid_argument("empty graph: no edges");

    BuildStats stats;

    NodeId max_id = 0;
    for (const Edge& e : edges)
        max_id = std::max({max_id, e.src, e.dst});
    const NodeId n = node_count.value_or(max_id + 1);
    if (max_id >= n)
        throw std::invalid_argument("edge id " + std::to_string(max_id) +
                                 " overflows dense node range of size " + std::to_string(n));

    std::vector<Edge> kept;
    kept.reserve(edges.size());
    for (Edge e : edges) {
        if (e.src == e.dst) {
            ++stats.self_loops_dropped;
            continue;
        }
        if (directedness == Directedness::undirected && e.src > e.dst)
            std::swap(e.src, e.dst);
        kept.push_back(e);
    }
    if (kept.empty())
        throw std::invalid_argument("empty graph: no edges");

    std::sort(kept.begin(), kept.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    auto last = std::unique(kept.begin(), kept.end(), [](const Edge& a, const Edge& b) {
        return a.src == b.src && a.dst == b.dst;
    });
    stats.duplicates_dropped = static_cast<std::uint64_t>(std::distance(last, kept.end()));
    kept.erase(last, kept.end());

    return {GraphBuilder::assemble(n, directedness, kept), stats};
}

Graph generate_ba(NodeId n, NodeId m, std::uint64_t seed)
{
    if (m < 1 || n <= m)
        throw std::invalid_argument("generate_ba requires n > m >= 1");

    // One entry per endpoint; drawing an index uniformly samples a node with
    // probability proportional to its current degree.
    std::vector<NodeId> endpoint_pool;
    endpoint_pool.reserve(static_cast<std::size_t>(n) * 2 * m);

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n - m) * m);

    for (NodeId target = 0; target < m; ++target) {
        edges.push_back({m, target});
        endpoint_pool.push_back(m);
        endpoint_pool.push_back(target);
    }

    std::vector<NodeId> picks;
    picks.reserve(m);
    for (NodeId v = m + 1; v < n; ++v) {
        Rng rng = Rng::substream(seed, v);
        picks.clear();
        while (picks.size() < m) {
            const NodeId candidate = endpoint_pool[rng.below(endpoint_pool.size())];
            if (std::find(picks.begin(), picks.end(), candidate) == picks.end())
                picks.push_back(candidate);
        }
        for (NodeId target : picks) {
            edges.push_back({v, target});
            endpoint_pool.push_back(v);
            endpoint_pool.push_back(target);
        }
    }

    return GraphBuilder::assemble(n, Directedness::undirected, edges);
}

DegreeDistribution DegreeDistribution::from_degrees(const std::vector<std::uint64_t>& degrees)
{
    if (degrees.empty())
        throw std::invalid_argument("degree distribution over empty node set");
    std::vector<std::uint64_t> sorted = degrees;
    std::sort(sorted.begin(), sorted.end());

    DegreeDistribution d;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        d.support_.push_back(sorted[i]);
        d.mass_.push_back(static_cast<double>(j - i) / n);
        i = j;
    }
    double mu = 0.0, second = 0.0;
    for (std::size_t i = 0; i < d.support_.size(); ++i) {
        const double k = static_cast<double>(d.support_[i]);
        mu += k * d.mass_[i];
        second += k * k * d.mass_[i];
    }
    d.mu_ = mu;
    d.sigma2_ = second - mu * mu;
    return d;
}

DegreeDistribution DegreeDistribution::from_mass(std::vector<std::uint64_t> support,
                                                 std::vector<double> mass)
{
    if (support.size() != mass.size() || support.empty())
        throw std::invalid_argument("degree distribution support/mass mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] < 0.0)
            throw std::invalid_argument("negative probability mass");
        if (i > 0 && support[i] <= support[i - 1])
            throw std::invalid_argument("support must be strictly increasing");
        total += mass[i];
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("probability mass does not sum to 1");

    DegreeDistribution d;
    d.support_ = std::move(support);
    d.mass_ = std::move(mass);
    for (double& p : d.mass_)
        p /= total;
    double mu = 0.0, second = 0.0;
    for (std::size_t i = 0; i < d.support_.size(); ++i) {
        const double k = static_cast<double>(d.support_[i]);
        mu += k * d.mass_[i];
        second += k * k * d.mass_[i];
    }
    d.mu_ = mu;
    d.sigma2_ = second - mu * mu;
    return d;
}

DegreeDistribution degree_histogram(const Graph& g, Direction direction)
{
    std::vector<std::uint64_t> degrees(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u)
        degrees[u] = g.degree(u, direction);
    return DegreeDistribution::from_degrees(degrees);
}

namespace {

// Walk both supports in step, tracking the CDF gap / pointwise mass gap.
template <class Visit>
void walk_union_support(const DegreeDistribution& a, const DegreeDistribution& b, Visit&& visit)
{
    std::size_t i = 0, j = 0;
    while (i < a.support().size() || j < b.support().size()) {
        double pa = 0.0, pb = 0.0;
        std::uint64_t ka = i < a.support().size() ? a.support()[i] : UINT64_MAX;
        std::uint64_t kb = j < b.support().size() ? b.support()[j] : UINT64_MAX;
        if (ka <= kb)
            pa = a.mass()[i++];
        if (kb <= ka)
            pb = b.mass()[j++];
        visit(pa, pb);
    }
}

} // namespace

double ks_distance(const DegreeDistribution& a, const DegreeDistribution& b)
{
    double cdf_a = 0.0, cdf_b = 0.0, sup = 0.0;
    walk_union_support(a, b, [&](double pa, double pb) {
        cdf_a += pa;
        cdf_b += pb;
        sup = std::max(sup, std::fabs(cdf_a - cdf_b));
    });
    return sup;
}

double total_variation_distance(const DegreeDistribution& a, const DegreeDistribution& b)
{
    double acc = 0.0;
    walk_union_support(a, b, [&](double pa, double pb) { acc += std::fabs(pa - pb); });
    return 0.5 * acc;
}

ComponentReport connected_components(const Graph& g)
{
    const NodeId n = g.node_count();
    std::vector<NodeId> parent(n);
    for (NodeId u = 0; u < n; ++u)
        parent[u] = u;

    auto find = [&](NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : g.out_neighbors(u)) {
            const NodeId ru = find(u), rv = find(v);
            if (ru != rv)
                parent[ru] = rv;
        }

    std::vector<std::uint64_t> size_of_root(n, 0);
    for (NodeId u = 0; u < n; ++u)
        ++size_of_root[find(u)];

    ComponentReport report;
    for (NodeId u = 0; u < n; ++u)
        if (size_of_root[u] > 0)
            report.component_sizes.push_back(size_of_root[u]);
    std::sort(report.component_sizes.begin(), report.component_sizes.end(),
              std::greater<std::uint64_t>());
    report.component_count = report.component_sizes.size();
    report.giant_fraction =
        static_cast<double>(report.component_sizes.front()) / static_cast<double>(n);
    return report;
}

} // namespace sensornet
