#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "sensornet/harness.hpp"
#include "sensornet/version.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"sensornet: friendship-paradox sensor experiments on graphs"};
    app.set_version_flag("--version", sensornet::kVersion);

    std::string kind;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("kind", kind,
                   "Experiment kind: fig1, fig2a, fig2bc, fig3, fig4, samplemath")
        ->required();
    app.add_option("--config", config, "JSON experiment config file")->required();
    auto* out_opt = app.add_option("--out", out, "Output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", seed, "Root seed (overrides config)");
    auto* threads_opt =
        app.add_option("--threads", threads, "Worker threads (SENSORNET_THREADS wins)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    sensornet::CliOptions options;
    options.kind = kind;
    options.config_path = config;
    if (out_opt->count())
        options.out_dir = out;
    if (seed_opt->count())
        options.seed = seed;
    if (threads_opt->count())
        options.threads = threads;
    return sensornet::run_experiment(options);
}
