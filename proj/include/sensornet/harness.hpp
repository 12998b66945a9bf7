#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sensornet {

// Raised for anything wrong with the requested run itself: unknown kind,
// unreadable config, missing inputs, out-of-range parameters. Maps to exit
// code 2, before any output is written.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliOptions {
    std::string kind;
    std::string config_path;
    std::optional<std::string> out_dir;  // overrides the config's out_dir
    std::optional<std::uint64_t> seed;   // overrides the config's seed
    std::optional<int> threads;
};

// Runs one experiment kind end to end and reports a process exit status:
// 0 success, 1 runtime failure, 2 validation failure. All artifacts land in
// the resolved output directory; manifest.json records config, version,
// input digests, and wall time.
int run_experiment(const CliOptions& options);

} // namespace sensornet
