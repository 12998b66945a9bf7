#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sensornet/cascade.hpp"
#include "sensornet/events.hpp"
#include "sensornet/graph.hpp"
#include "sensornet/paradox.hpp"
#include "sensornet/rng.hpp"

namespace sensornet {

// mean(sensor_times) - mean(control_times); negative means the sensor group
// adopted earlier on average.
double delta_t(const std::vector<double>& sensor_times, const std::vector<double>& control_times);

struct LeadTimeSpec {
    std::uint32_t control_size = 0;
    SensorPolicy policy = SensorPolicy::per_node_friend;
    Direction direction = Direction::out;
    std::uint32_t sensor_target = 0; // pooled policy; 0 means control_size
    std::uint32_t replicates = 1;
    std::uint32_t min_infected = 1;
    std::uint64_t seed = 0;
    // Drop control members with no adoption record of any kind before
    // computing times. Event sources only; ignored for cascade traces.
    bool trim_inactive_control = false;
};

struct LeadTimeSummary {
    std::vector<double> deltas; // analyzable replicates, in replicate order
    double mean = 0.0;
    double sem = 0.0;
    double fraction_negative = 0.0;
    std::uint32_t replicates = 0; // analyzable count
    std::uint32_t skipped = 0;
    std::vector<std::uint32_t> control_sizes;
    std::vector<std::uint32_t> sensor_sizes;
    std::vector<std::uint32_t> control_infected;
    std::vector<std::uint32_t> sensor_infected;
};

// Adoption time per node, NaN where the node never adopted. Trace times are
// steps; event times are fractional days since window start.
std::vector<double> node_times_from_trace(const CascadeTrace& trace);
std::vector<double> node_times_from_events(const Graph& g, const EventStream& stream, TagId tag);

// Per replicate: draw control and sensors, take adoption times of each side,
// skip the replicate when either side has fewer than min_infected adopters,
// otherwise record mean(sensor) - mean(control).
LeadTimeSummary lead_time_core(const Graph& g, const std::vector<double>& node_times,
                               const LeadTimeSpec& spec,
                               const std::vector<std::uint8_t>* active_mask = nullptr);

LeadTimeSummary lead_time_experiment(const Graph& g, const CascadeTrace& trace,
                                     const LeadTimeSpec& spec);
LeadTimeSummary lead_time_experiment(const Graph& g, const EventStream& stream, TagId tag,
                                     const LeadTimeSpec& spec);

// Permutes the timestamp column across the given records in place; users keep
// their record counts, the timestamp multiset is preserved.
void permute_timestamps(std::vector<std::pair<NodeId, std::int64_t>>& records, Rng& rng);

struct NullSummary {
    std::vector<double> deltas; // mean delta of each shuffle replicate
    double mean = 0.0;
    double sem = 0.0;
    std::uint32_t replicates = 0;
    std::uint32_t skipped = 0;
    double observed_mean = 0.0;
    double percentile = 0.0;   // empirical CDF position of the observed mean
    double two_sided_p = 0.0;  // 2 * min(percentile, 1 - percentile)
    double q025 = 0.0;         // central 95% band of the null
    double q975 = 0.0;
};

// Each replicate permutes the tag's timestamps, recomputes first uses, and
// reruns the sampling experiment; the observed mean is then placed within
// the resulting null distribution.
NullSummary shuffle_null(const Graph& g, const EventStream& stream, TagId tag,
                         const LeadTimeSpec& sampling, std::uint32_t replicates,
                         std::uint64_t seed);

struct DetectionParams {
    double alpha = 0.05;
    std::uint32_t consecutive_required = 2;
    double bucket = 1.0; // day width in the time units of node_times
};

struct DetectionReport {
    std::vector<double> sensor_cum;  // cumulative incidence per day
    std::vector<double> control_cum;
    std::vector<std::uint32_t> sensor_daily; // newly adopted per day
    std::vector<std::uint32_t> control_daily;
    std::vector<double> p_value;
    std::optional<std::uint32_t> detection_day;
    std::uint32_t peak_incidence_day = 0;
    std::optional<std::uint32_t> control_catch_up_day;
};

// Day-by-day monitor: pooled two-proportion z-test on the groups' cumulative
// incidences using only data up to each day; detection fires at the start of
// the first run of consecutive_required days that are significant with the
// sensor side ahead.
DetectionReport realtime_detect(const std::vector<double>& node_times, const NodeSample& sensor,
                                const NodeSample& control, const DetectionParams& params);

struct SizeSweepRow {
    std::uint32_t size = 0;
    LeadTimeSummary summary;
};

// One lead-time experiment per control size on a fixed cascade trace.
std::vector<SizeSweepRow> size_sweep(const Graph& g, const CascadeTrace& trace,
                                     const std::vector<std::uint32_t>& sizes, LeadTimeSpec base);

// Event variant: per size and replicate, tags used by more than
// usage_fraction of the control sample's members contribute one delta each;
// deltas pool into the size's summary.
std::vector<SizeSweepRow> size_sweep(const Graph& g, const EventStream& stream,
                                     const std::vector<std::uint32_t>& sizes,
                                     double usage_fraction, LeadTimeSpec base);

} // namespace sensornet
