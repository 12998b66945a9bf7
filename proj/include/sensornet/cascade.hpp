#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sensornet/graph.hpp"
#include "sensornet/paradox.hpp"

namespace sensornet {

// Sentinel first-infection time for nodes the contagion never reached.
inline constexpr std::uint32_t kNeverInfected = std::numeric_limits<std::uint32_t>::max();

enum class SirState : std::uint8_t { susceptible, infected, recovered };

struct SirParams {
    double lambda = 0.1;
    double gamma_rec = 0.01;
    std::uint32_t n_cascades = 1;
    std::uint32_t t_end = 10000;
    std::uint64_t seed = 0;
    // One transmission coin per unique susceptible neighbor of the infected
    // set per step. The per-edge alternative flips one coin per infectious
    // edge, so nodes with several infected neighbors face a higher hazard.
    bool per_edge_transmission = false;
};

// Step-indexed counts for one cascade. Index 0 is the seeding step; entry t
// holds the state after step t of this cascade's clock.
struct CascadeCurve {
    NodeId seed = 0;
    std::vector<std::uint32_t> infected_count;
    std::vector<std::uint32_t> recovered_count;
    std::vector<std::uint32_t> new_infections;
};

struct CascadeTrace {
    SirParams params;
    std::vector<std::uint32_t> first_infection_time; // kNeverInfected if never reached
    std::vector<SirState> final_state;
    std::vector<CascadeCurve> curves; // one per cascade, in run order
};

// Times are per-cascade clocks: each cascade seeds at time 0 and a node keeps
// the time of its first infection even if a later cascade draws it as seed.
// All cascades share one state array, so nodes consumed by an earlier cascade
// are unavailable to later ones.
CascadeTrace simulate_sir(const Graph& g, const SirParams& params);

struct InfectionTimes {
    std::vector<std::uint32_t> times; // never-infected members are dropped
    double infected_fraction = 0.0;
};

InfectionTimes infection_times(const CascadeTrace& trace, const NodeSample& sample);

// CSV `node,first_infection_time,final_state` with never spelled as -1,
// preceded by a single `#` comment line carrying the params as JSON.
void save_trace(const std::string& path, const CascadeTrace& trace);

} // namespace sensornet
