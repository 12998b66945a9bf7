#include "sensornet/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sensornet {

namespace {

void check_cap(const Graph& g, NodeId cap)
{
    if (g.node_count() > cap)
        throw std::invalid_argument(
            "graph has " + std::to_string(g.node_count()) +
            " nodes, above the exact-betweenness cap of " + std::to_string(cap) +
            "; subsample the graph first");
}

// Scratch buffers for one Brandes source sweep, reused across sources.
struct BrandesScratch {
    explicit BrandesScratch(NodeId n)
        : dist(n), sigma(n), delta(n)
    {
        order.reserve(n);
    }
    std::vector<std::int32_t> dist;
    std::vector<double> sigma;
    std::vector<double> delta;
    std::vector<NodeId> order; // BFS visitation order
};

// Single-source dependency accumulation into `accum`.
void brandes_source(const Graph& g, NodeId s, BrandesScratch& sc, std::vector<double>& accum)
{
    const NodeId n = g.node_count();
    std::fill(sc.dist.begin(), sc.dist.end(), -1);
    std::fill(sc.sigma.begin(), sc.sigma.end(), 0.0);
    std::fill(sc.delta.begin(), sc.delta.end(), 0.0);
    sc.order.clear();

    sc.dist[s] = 0;
    sc.sigma[s] = 1.0;
    sc.order.push_back(s);
    for (std::size_t head = 0; head < sc.order.size(); ++head) {
        const NodeId v = sc.order[head];
        for (NodeId w : g.out_neighbors(v)) {
            if (sc.dist[w] < 0) {
                sc.dist[w] = sc.dist[v] + 1;
                sc.order.push_back(w);
            }
            if (sc.dist[w] == sc.dist[v] + 1)
                sc.sigma[w] += sc.sigma[v];
        }
    }

    for (std::size_t i = sc.order.size(); i-- > 1;) {
        const NodeId w = sc.order[i];
        // Predecessors sit one BFS level closer along reverse edges.
        for (NodeId v : g.in_neighbors(w)) {
            if (sc.dist[v] + 1 == sc.dist[w])
                sc.delta[v] += sc.sigma[v] / sc.sigma[w] * (1.0 + sc.delta[w]);
        }
        if (w != s)
            accum[w] += sc.delta[w];
    }
    (void)n;
}

void finalize(const Graph& g, std::vector<double>& scores)
{
    if (!g.is_directed())
        for (double& v : scores)
            v *= 0.5; // each unordered pair counted once
}

} // namespace

std::vector<double> betweenness_serial(const Graph& g, NodeId cap)
{
    check_cap(g, cap);
    const NodeId n = g.node_count();
    std::vector<double> scores(n, 0.0);
    BrandesScratch scratch(n);
    for (NodeId s = 0; s < n; ++s)
        brandes_source(g, s, scratch, scores);
    finalize(g, scores);
    return scores;
}

std::vector<double> betweenness(const Graph& g, NodeId cap)
{
    check_cap(g, cap);
    const NodeId n = g.node_count();

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
    std::vector<std::vector<double>> partial(threads, std::vector<double>(n, 0.0));
#pragma omp parallel
    {
        BrandesScratch scratch(n);
        std::vector<double>& accum = partial[omp_get_thread_num()];
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t s = 0; s < static_cast<std::int64_t>(n); ++s)
            brandes_source(g, static_cast<NodeId>(s), scratch, accum);
    }
    std::vector<double> scores(n, 0.0);
    for (const auto& p : partial)
        for (NodeId u = 0; u < n; ++u)
            scores[u] += p[u];
    finalize(g, scores);
    return scores;
#else
    return betweenness_serial(g, cap);
#endif
}

} // namespace sensornet
