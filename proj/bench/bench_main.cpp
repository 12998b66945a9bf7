// Timing comparison of the serial reference kernels against the OpenMP
// versions: exact betweenness over sources and lead-time replicates.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "sensornet/cascade.hpp"
#include "sensornet/graph.hpp"
#include "sensornet/leadtime.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class F>
double time_call(F&& f)
{
    const auto start = std::chrono::steady_clock::now();
    f();
    return seconds_since(start);
}

} // namespace

int main(int argc, char** argv)
{
    const sensornet::NodeId n = argc > 1 ? static_cast<sensornet::NodeId>(std::atoi(argv[1])) : 4000;
    const std::uint32_t replicates = argc > 2 ? static_cast<std::uint32_t>(std::atoi(argv[2])) : 200;

#ifdef _OPENMP
    std::printf("openmp max threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif

    const sensornet::Graph g = sensornet::generate_ba(n, 5, 42);
    std::printf("graph: ba n=%u m=5 (%llu edges)\n", g.node_count(),
                static_cast<unsigned long long>(g.edge_count()));

    std::vector<double> serial_scores, parallel_scores;
    const double t_serial =
        time_call([&] { serial_scores = sensornet::betweenness_serial(g); });
    const double t_parallel = time_call([&] { parallel_scores = sensornet::betweenness(g); });
    double max_diff = 0.0;
    for (std::size_t i = 0; i < serial_scores.size(); ++i)
        max_diff = std::max(max_diff, std::abs(serial_scores[i] - parallel_scores[i]));
    std::printf("betweenness: serial %.3fs, parallel %.3fs, speedup %.2fx, max |diff| %.3g\n",
                t_serial, t_parallel, t_serial / t_parallel, max_diff);

    sensornet::SirParams sir;
    sir.n_cascades = 5;
    sir.t_end = 2000;
    sir.seed = 7;
    const sensornet::CascadeTrace trace = sensornet::simulate_sir(g, sir);

    sensornet::LeadTimeSpec spec;
    spec.control_size = n / 20;
    spec.policy = sensornet::SensorPolicy::pooled_neighbors;
    spec.replicates = replicates;
    spec.seed = 11;

    sensornet::LeadTimeSummary parallel_summary;
    const double t_replicates =
        time_call([&] { parallel_summary = sensornet::lead_time_experiment(g, trace, spec); });
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    sensornet::LeadTimeSummary serial_summary;
    const double t_replicates_serial =
        time_call([&] { serial_summary = sensornet::lead_time_experiment(g, trace, spec); });
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    std::printf("lead-time replicates (%u): 1 thread %.3fs, pool %.3fs, speedup %.2fx, "
                "means %s\n",
                replicates, t_replicates_serial, t_replicates,
                t_replicates_serial / t_replicates,
                serial_summary.mean == parallel_summary.mean ? "identical" : "DIFFER");
    return 0;
}
