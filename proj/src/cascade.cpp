#include "sensornet/cascade.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "sensornet/rng.hpp"

#include <json.hpp>

namespace sensornet {

namespace {

void validate(const SirParams& p)
{
    if (p.lambda < 0.0 || p.lambda > 1.0)
        throw std::invalid_argument("lambda must lie in [0, 1]");
    if (p.gamma_rec < 0.0 || p.gamma_rec > 1.0)
        throw std::invalid_argument("gamma_rec must lie in [0, 1]");
    if (p.n_cascades < 1)
        throw std::invalid_argument("n_cascades must be at least 1");
    if (p.t_end < 1)
        throw std::invalid_argument("t_end must be at least 1");
}

} // namespace

CascadeTrace simulate_sir(const Graph& g, const SirParams& params)
{
    validate(params);
    const NodeId n = g.node_count();

    CascadeTrace trace;
    trace.params = params;
    trace.first_infection_time.assign(n, kNeverInfected);
    trace.final_state.assign(n, SirState::susceptible);
    auto& state = trace.final_state;
    auto& time = trace.first_infection_time;

    Rng rng(params.seed);
    std::vector<NodeId> infected; // sorted, shared across cascades
    std::vector<NodeId> candidates;
    std::vector<NodeId> newly;
    std::vector<std::uint8_t> queued(n, 0);
    std::uint32_t recovered_total = 0;

    for (std::uint32_t cascade = 0; cascade < params.n_cascades; ++cascade) {
        const NodeId seed = static_cast<NodeId>(rng.below(n));
        CascadeCurve curve;
        curve.seed = seed;

        // A seed drawn from an earlier cascade keeps its state and time.
        std::uint32_t seeded = 0;
        if (state[seed] == SirState::susceptible) {
            state[seed] = SirState::infected;
            time[seed] = 0;
            infected.insert(std::lower_bound(infected.begin(), infected.end(), seed), seed);
            seeded = 1;
        }
        curve.infected_count.push_back(static_cast<std::uint32_t>(infected.size()));
        curve.recovered_count.push_back(recovered_total);
        curve.new_infections.push_back(seeded);

        for (std::uint32_t step = 1; step < params.t_end && !infected.empty(); ++step) {
            // Recovery happens before transmission within a step.
            std::size_t keep = 0;
            for (NodeId u : infected) {
                if (rng.coin(params.gamma_rec)) {
                    state[u] = SirState::recovered;
                    ++recovered_total;
                } else {
                    infected[keep++] = u;
                }
            }
            infected.resize(keep);

            newly.clear();
            if (params.per_edge_transmission) {
                for (NodeId u : infected) {
                    for (NodeId v : g.neighbors(u, Direction::out)) {
                        if (state[v] != SirState::susceptible)
                            continue;
                        if (rng.coin(params.lambda)) {
                            state[v] = SirState::infected;
                            time[v] = step;
                            newly.push_back(v);
                        }
                    }
                }
                std::sort(newly.begin(), newly.end());
            } else {
                candidates.clear();
                for (NodeId u : infected) {
                    for (NodeId v : g.neighbors(u, Direction::out)) {
                        if (state[v] == SirState::susceptible && !queued[v]) {
                            queued[v] = 1;
                            candidates.push_back(v);
                        }
                    }
                }
                std::sort(candidates.begin(), candidates.end());
                for (NodeId v : candidates) {
                    queued[v] = 0;
                    if (rng.coin(params.lambda)) {
                        state[v] = SirState::infected;
                        time[v] = step;
                        newly.push_back(v);
                    }
                }
            }

            if (!newly.empty()) {
                const std::size_t mid = infected.size();
                infected.insert(infected.end(), newly.begin(), newly.end());
                std::inplace_merge(infected.begin(), infected.begin() + mid, infected.end());
            }
            curve.infected_count.push_back(static_cast<std::uint32_t>(infected.size()));
            curve.recovered_count.push_back(recovered_total);
            curve.new_infections.push_back(static_cast<std::uint32_t>(newly.size()));
        }
        trace.curves.push_back(std::move(curve));
    }
    return trace;
}

InfectionTimes infection_times(const CascadeTrace& trace, const NodeSample& sample)
{
    InfectionTimes out;
    const NodeId n = static_cast<NodeId>(trace.first_infection_time.size());
    std::size_t reached = 0;
    for (NodeId u : sample.members) {
        if (u >= n)
            throw std::invalid_argument("sample node id outside the trace's graph");
        const std::uint32_t t = trace.first_infection_time[u];
        if (t == kNeverInfected)
            continue;
        out.times.push_back(t);
        ++reached;
    }
    out.infected_fraction = sample.members.empty()
        ? 0.0
        : static_cast<double>(reached) / static_cast<double>(sample.members.size());
    return out;
}

void save_trace(const std::string& path, const CascadeTrace& trace)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write trace: " + path);

    nlohmann::json header{
        {"lambda", trace.params.lambda},
        {"gamma_rec", trace.params.gamma_rec},
        {"n_cascades", trace.params.n_cascades},
        {"t_end", trace.params.t_end},
        {"seed", trace.params.seed},
        {"per_edge_transmission", trace.params.per_edge_transmission},
    };
    out << "# " << header.dump() << '\n';
    out << "node,first_infection_time,final_state\n";
    static constexpr char kStateChar[] = {'S', 'I', 'R'};
    for (NodeId u = 0; u < trace.first_infection_time.size(); ++u) {
        const std::uint32_t t = trace.first_infection_time[u];
        out << u << ',';
        if (t == kNeverInfected)
            out << "-1";
        else
            out << t;
        out << ',' << kStateChar[static_cast<int>(trace.final_state[u])] << '\n';
    }
}

} // namespace sensornet
