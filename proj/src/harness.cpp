#include "sensornet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <vector>

#include <json.hpp>

#include "sensornet/cascade.hpp"
#include "sensornet/events.hpp"
#include "sensornet/graph.hpp"
#include "sensornet/graph_io.hpp"
#include "sensornet/io_util.hpp"
#include "sensornet/leadtime.hpp"
#include "sensornet/paradox.hpp"
#include "sensornet/samplestats.hpp"
#include "sensornet/serialize.hpp"
#include "sensornet/stats.hpp"
#include "sensornet/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sensornet {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Fixed substream indices so each consumer of randomness has its own lane
// off the root seed.
constexpr std::uint64_t kStreamGraph = 1;
constexpr std::uint64_t kStreamSir = 2;
constexpr std::uint64_t kStreamSampling = 3;
constexpr std::uint64_t kStreamNull = 4;
constexpr std::uint64_t kStreamDetect = 5;

const json& require(const json& doc, const char* key)
{
    const auto it = doc.find(key);
    if (it == doc.end())
        throw ConfigError(std::string("config is missing required key \"") + key + "\"");
    return *it;
}

template <class T>
T get_or(const json& doc, const char* key, T fallback)
{
    const auto it = doc.find(key);
    if (it == doc.end())
        return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key \"") + key + "\" has the wrong type");
    }
}

template <class T>
T as(const json& value, const char* key)
{
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key \"") + key + "\" has the wrong type");
    }
}

Direction parse_direction(const std::string& name)
{
    if (name == "out")
        return Direction::out;
    if (name == "in")
        return Direction::in;
    if (name == "total")
        return Direction::total;
    throw ConfigError("unknown direction \"" + name + "\" (expected out, in, or total)");
}

SensorPolicy parse_policy(const std::string& name)
{
    if (name == "per-node-friend")
        return SensorPolicy::per_node_friend;
    if (name == "pooled-neighbors")
        return SensorPolicy::pooled_neighbors;
    if (name == "mirror-control")
        return SensorPolicy::mirror_control;
    throw ConfigError("unknown sensor policy \"" + name + "\"");
}

void require_file(const std::string& path)
{
    if (!fs::exists(path))
        throw ConfigError("input file does not exist: " + path);
}

struct GraphSource {
    Graph graph;
    IdDictionary users; // dense external ids for generated graphs
    std::vector<std::string> input_paths;
};

GraphSource load_graph_source(const json& cfg, std::uint64_t root_seed)
{
    const json& spec = require(cfg, "graph");
    const std::string type = as<std::string>(require(spec, "type"), "graph.type");
    GraphSource source;
    if (type == "ba") {
        const auto n = as<NodeId>(require(spec, "n"), "graph.n");
        const auto m = as<NodeId>(require(spec, "m"), "graph.m");
        source.graph = generate_ba(n, m, mix_seed(root_seed, kStreamGraph));
        for (NodeId u = 0; u < n; ++u)
            source.users.intern(std::to_string(u));
    } else if (type == "edge_file") {
        const auto path = as<std::string>(require(spec, "path"), "graph.path");
        require_file(path);
        const bool directed = get_or<bool>(spec, "directed", true);
        EdgeFileLoad load = load_edge_file(path, source.users);
        if (load.edges.empty())
            throw ConfigError("edge file holds no edges: " + path);
        source.graph = build_graph(std::move(load.edges),
                                   directed ? Directedness::directed
                                            : Directedness::undirected,
                                   source.users.size())
                           .graph;
        source.input_paths.push_back(path);
    } else {
        throw ConfigError("unknown graph.type \"" + type + "\" (expected ba or edge_file)");
    }
    return source;
}

struct EventSource {
    EventStream stream;
    std::optional<MessageCounts> messages;
    std::vector<std::string> input_paths;
    LoadReport report;
};

EventSource load_event_source(const json& cfg, IdDictionary users)
{
    const json& spec = require(cfg, "events");
    const auto path = as<std::string>(require(spec, "path"), "events.path");
    require_file(path);
    const json& window_spec = require(spec, "window");
    TimeWindow window{as<std::int64_t>(require(window_spec, "start"), "events.window.start"),
                      as<std::int64_t>(require(window_spec, "end"), "events.window.end")};
    if (window.t_end < window.t_start)
        throw ConfigError("events.window end precedes start");

    std::optional<std::string> message_path;
    if (spec.contains("messages")) {
        message_path = as<std::string>(spec["messages"], "events.messages");
        require_file(*message_path);
    }

    EventLoad load = load_events(path, window, std::move(users));
    EventSource source{std::move(load.stream), std::nullopt, {path}, load.report};
    if (message_path) {
        source.messages = load_messages(*message_path, window, source.stream.users());
        source.input_paths.push_back(*message_path);
    }
    return source;
}

LeadTimeSpec parse_sampling(const json& cfg, const Graph& g, std::uint64_t seed,
                            SensorPolicy default_policy)
{
    const json& spec = require(cfg, "sampling");
    LeadTimeSpec out;
    if (spec.contains("control_size")) {
        out.control_size = as<std::uint32_t>(spec["control_size"], "sampling.control_size");
    } else if (spec.contains("control_fraction")) {
        const double f = as<double>(spec["control_fraction"], "sampling.control_fraction");
        if (!(f > 0.0) || f > 1.0)
            throw ConfigError("sampling.control_fraction must lie in (0, 1]");
        out.control_size = std::max<std::uint32_t>(
            1, static_cast<std::uint32_t>(std::llround(f * g.node_count())));
    } else {
        throw ConfigError("sampling needs control_size or control_fraction");
    }
    out.policy = parse_policy(get_or<std::string>(spec, "policy", default_policy ==
                                                                          SensorPolicy::per_node_friend
                                                                      ? "per-node-friend"
                                                                      : "pooled-neighbors"));
    out.direction = parse_direction(get_or<std::string>(spec, "direction", "out"));
    out.sensor_target = get_or<std::uint32_t>(spec, "sensor_target", 0);
    out.replicates = get_or<std::uint32_t>(spec, "replicates", 1);
    out.min_infected = get_or<std::uint32_t>(spec, "min_infected", 1);
    out.trim_inactive_control = get_or<bool>(spec, "trim_inactive_control", false);
    out.seed = seed;
    return out;
}

SirParams parse_sir(const json& cfg, std::uint64_t root_seed)
{
    const json& spec = require(cfg, "sir");
    SirParams params;
    params.lambda = get_or<double>(spec, "lambda", 0.1);
    params.gamma_rec = get_or<double>(spec, "gamma_rec", 0.01);
    params.n_cascades = get_or<std::uint32_t>(spec, "n_cascades", 10);
    params.t_end = get_or<std::uint32_t>(spec, "t_end", 10000);
    params.per_edge_transmission = get_or<bool>(spec, "per_edge_transmission", false);
    params.seed = mix_seed(root_seed, kStreamSir);
    return params;
}

// Writer that tracks artifact names for the manifest and pins all writes
// inside the output directory.
class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {}

    std::string path(const std::string& name)
    {
        written_.push_back(name);
        return (dir_ / name).string();
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

std::string csv_row_summary(std::uint32_t size, const LeadTimeSummary& s)
{
    std::string row = std::to_string(size);
    row += ',';
    row += format_double(s.mean);
    row += ',';
    row += format_double(s.sem);
    row += ',';
    row += format_double(s.fraction_negative);
    row += ',';
    row += std::to_string(s.replicates);
    row += ',';
    row += std::to_string(s.skipped);
    row += '\n';
    return row;
}

constexpr const char* kSizesHeader =
    "size,mean_delta,sem,fraction_negative,replicates,skipped\n";

// ---- fig1: paradox distributions ----------------------------------------

json run_fig1(const json& cfg, std::uint64_t seed, OutputDir& out)
{
    GraphSource source = load_graph_source(cfg, seed);
    const Graph& g = source.graph;
    const double gamma = as<double>(require(cfg, "gamma"), "gamma");
    if (!(gamma > 0.0) || gamma > 1.0)
        throw ConfigError("gamma must lie in (0, 1]");
    const auto replicates = get_or<std::uint32_t>(cfg, "replicates", 20);
    if (replicates < 1)
        throw ConfigError("replicates must be at least 1");
    const Direction direction = parse_direction(get_or<std::string>(cfg, "direction", "out"));

    const DegreeDistribution dist = degree_histogram(g, direction);
    const ParadoxStats stats = paradox_stats(dist);
    const DegreeDistribution friend_dist = friend_degree_dist(dist);
    const DegreeDistribution predicted_dup = sampled_friend_dist(dist, gamma, false);
    const DegreeDistribution predicted_dedup = sampled_friend_dist(dist, gamma, true);

    const auto control_size = std::max<std::uint32_t>(
        1, static_cast<std::uint32_t>(std::llround(gamma * g.node_count())));

    std::vector<double> control_ks(replicates), sensor_ks(replicates);
    std::vector<std::vector<std::uint64_t>> control_degrees(replicates),
        sensor_degrees(replicates);
    const std::uint64_t sampling_seed = mix_seed(seed, kStreamSampling);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(replicates); ++r) {
        const std::uint64_t rep_seed = mix_seed(sampling_seed, static_cast<std::uint64_t>(r));
        const NodeSample control = sample_control(g, control_size, rep_seed);
        const std::vector<NodeId> sensors =
            pooled_neighbor_union(g, control.members, direction);

        auto& cd = control_degrees[r];
        for (NodeId u : control.members)
            cd.push_back(g.degree(u, direction));
        auto& sd = sensor_degrees[r];
        for (NodeId u : sensors)
            sd.push_back(g.degree(u, direction));

        control_ks[r] = ks_distance(DegreeDistribution::from_degrees(cd), dist);
        sensor_ks[r] = ks_distance(DegreeDistribution::from_degrees(sd), predicted_dedup);
    }

    std::vector<std::uint64_t> pooled_control, pooled_sensor;
    for (std::uint32_t r = 0; r < replicates; ++r) {
        pooled_control.insert(pooled_control.end(), control_degrees[r].begin(),
                              control_degrees[r].end());
        pooled_sensor.insert(pooled_sensor.end(), sensor_degrees[r].begin(),
                             sensor_degrees[r].end());
    }
    const DegreeDistribution pooled_control_dist =
        DegreeDistribution::from_degrees(pooled_control);
    const DegreeDistribution pooled_sensor_dist =
        DegreeDistribution::from_degrees(pooled_sensor);

    save_distribution(out.path("degree_dist.csv"), dist);
    save_distribution(out.path("friend_degree_dist.csv"), friend_dist);
    save_distribution(out.path("predicted_sensor_with_duplicates.csv"), predicted_dup);
    save_distribution(out.path("predicted_sensor_dedup.csv"), predicted_dedup);
    save_distribution(out.path("empirical_control.csv"), pooled_control_dist);
    save_distribution(out.path("empirical_sensor.csv"), pooled_sensor_dist);

    std::string ks_table = "replicate,control_ks,sensor_ks\n";
    for (std::uint32_t r = 0; r < replicates; ++r) {
        ks_table += std::to_string(r);
        ks_table += ',';
        ks_table += format_double(control_ks[r]);
        ks_table += ',';
        ks_table += format_double(sensor_ks[r]);
        ks_table += '\n';
    }
    write_text_file(out.path("ks_table.csv"), ks_table);

    json summary{
        {"gamma", gamma},
        {"control_size", control_size},
        {"replicates", replicates},
        {"mu", stats.mu},
        {"sigma2", stats.sigma2},
        {"rho", stats.rho},
        {"mean_control_ks", mean(control_ks)},
        {"mean_sensor_ks", mean(sensor_ks)},
        {"pooled_control_ks", ks_distance(pooled_control_dist, dist)},
        {"pooled_sensor_ks", ks_distance(pooled_sensor_dist, predicted_dedup)},
        // The analytic predictions use whichever single-direction degree was
        // configured; no directed variant of the theory is applied.
        {"degree_direction", get_or<std::string>(cfg, "direction", "out")},
    };
    save_json(out.path("summary.json"), summary);
    return summary;
}

// ---- fig2a: simulated size sweep -----------------------------------------

json run_fig2a(const json& cfg, std::uint64_t seed, OutputDir& out)
{
    GraphSource source = load_graph_source(cfg, seed);
    const Graph& g = source.graph;
    const SirParams sir = parse_sir(cfg, seed);
    const auto sizes = as<std::vector<std::uint32_t>>(require(cfg, "sizes"), "sizes");
    if (sizes.empty())
        throw ConfigError("sizes must be non-empty");
    for (std::uint32_t s : sizes)
        if (s < 1 || s > g.node_count())
            throw ConfigError("every size must lie in [1, node_count]");

    LeadTimeSpec base = parse_sampling(cfg, g, mix_seed(seed, kStreamSampling),
                                       SensorPolicy::pooled_neighbors);

    const CascadeTrace trace = simulate_sir(g, sir);
    const std::vector<SizeSweepRow> rows = size_sweep(g, trace, sizes, base);

    if (get_or<bool>(cfg, "write_trace", false))
        save_trace(out.path("trace.csv"), trace);

    std::string table = kSizesHeader;
    std::string deltas = "size,replicate,delta\n";
    for (const SizeSweepRow& row : rows) {
        table += csv_row_summary(row.size, row.summary);
        for (std::size_t i = 0; i < row.summary.deltas.size(); ++i) {
            deltas += std::to_string(row.size);
            deltas += ',';
            deltas += std::to_string(i);
            deltas += ',';
            deltas += format_double(row.summary.deltas[i]);
            deltas += '\n';
        }
    }
    write_text_file(out.path("sizes.csv"), table);
    write_text_file(out.path("deltas.csv"), deltas);

    std::uint64_t infected_total = 0;
    for (std::uint32_t t : trace.first_infection_time)
        if (t != kNeverInfected)
            ++infected_total;

    json summary{
        {"sizes", sizes},
        {"infected_total", infected_total},
        {"node_count", g.node_count()},
        {"all_sizes_negative",
         std::all_of(rows.begin(), rows.end(),
                     [](const SizeSweepRow& r) { return r.summary.mean < 0.0; })},
    };
    json per_size = json::array();
    for (const SizeSweepRow& row : rows)
        per_size.push_back({{"size", row.size},
                            {"mean", row.summary.mean},
                            {"sem", row.summary.sem},
                            {"fraction_negative", row.summary.fraction_negative},
                            {"replicates", row.summary.replicates},
                            {"skipped", row.summary.skipped}});
    summary["per_size"] = per_size;
    save_json(out.path("summary.json"), summary);
    return summary;
}

// ---- fig2bc: event-data size sweep and per-tag deltas ---------------------

json run_fig2bc(const json& cfg, std::uint64_t seed, OutputDir& out,
                std::vector<std::string>& inputs)
{
    GraphSource source = load_graph_source(cfg, seed);
    const Graph& g = source.graph;
    EventSource events = load_event_source(cfg, std::move(source.users));
    inputs.insert(inputs.end(), source.input_paths.begin(), source.input_paths.end());
    inputs.insert(inputs.end(), events.input_paths.begin(), events.input_paths.end());
    const EventStream& stream = events.stream;

    const auto sizes = as<std::vector<std::uint32_t>>(require(cfg, "sizes"), "sizes");
    const double usage_fraction = get_or<double>(cfg, "usage_fraction", 0.0);
    LeadTimeSpec base = parse_sampling(cfg, g, mix_seed(seed, kStreamSampling),
                                       SensorPolicy::pooled_neighbors);

    const std::vector<SizeSweepRow> rows = size_sweep(g, stream, sizes, usage_fraction, base);
    std::string table = kSizesHeader;
    for (const SizeSweepRow& row : rows)
        table += csv_row_summary(row.size, row.summary);
    write_text_file(out.path("sizes.csv"), table);

    // Per-tag replicate experiments over tags wide enough to analyze.
    const auto min_users = get_or<std::uint64_t>(cfg, "min_tag_users", 2);
    const std::vector<std::uint64_t> tag_users = users_per_tag(stream);
    std::vector<TagId> tags;
    for (TagId t = 0; t < tag_users.size(); ++t)
        if (tag_users[t] >= min_users)
            tags.push_back(t);

    std::string per_tag = "tag,unique_users,mean_delta,sem,fraction_negative,replicates,skipped\n";
    std::uint32_t negative_tags = 0, analyzed_tags = 0;
    for (TagId t : tags) {
        LeadTimeSpec spec = base;
        spec.seed = mix_seed(mix_seed(seed, kStreamSampling), 1000003ULL + t);
        try {
            const LeadTimeSummary s = lead_time_experiment(g, stream, t, spec);
            per_tag += stream.tags().name(t);
            per_tag += ',';
            per_tag += std::to_string(tag_users[t]);
            per_tag += ',';
            per_tag += format_double(s.mean);
            per_tag += ',';
            per_tag += format_double(s.sem);
            per_tag += ',';
            per_tag += format_double(s.fraction_negative);
            per_tag += ',';
            per_tag += std::to_string(s.replicates);
            per_tag += ',';
            per_tag += std::to_string(s.skipped);
            per_tag += '\n';
            ++analyzed_tags;
            if (s.mean < 0.0)
                ++negative_tags;
        } catch (const std::runtime_error&) {
            per_tag += stream.tags().name(t);
            per_tag += ',';
            per_tag += std::to_string(tag_users[t]);
            per_tag += ",nan,nan,nan,0,";
            per_tag += std::to_string(spec.replicates);
            per_tag += '\n';
        }
    }
    write_text_file(out.path("per_tag.csv"), per_tag);

    json summary{
        {"sizes", sizes},
        {"usage_fraction", usage_fraction},
        {"tags_considered", tags.size()},
        {"tags_analyzed", analyzed_tags},
        {"tags_sensor_led", negative_tags},
        {"fraction_tags_sensor_led",
         analyzed_tags ? static_cast<double>(negative_tags) / analyzed_tags : 0.0},
    };
    save_json(out.path("summary.json"), summary);
    return summary;
}

// ---- fig3: per-tag lead time, null model, detection, network --------------

json run_fig3(const json& cfg, std::uint64_t seed, OutputDir& out,
              std::vector<std::string>& inputs)
{
    GraphSource source = load_graph_source(cfg, seed);
    const Graph& g = source.graph;
    EventSource events = load_event_source(cfg, std::move(source.users));
    inputs.insert(inputs.end(), source.input_paths.begin(), source.input_paths.end());
    inputs.insert(inputs.end(), events.input_paths.begin(), events.input_paths.end());
    const EventStream& stream = events.stream;

    // Tag selection: explicit list, otherwise all tags above a user floor.
    const std::vector<std::uint64_t> tag_users = users_per_tag(stream);
    std::vector<TagId> tags;
    if (cfg.contains("tags")) {
        for (const auto& name : as<std::vector<std::string>>(cfg["tags"], "tags")) {
            const TagId t = stream.tags().lookup(name);
            if (t == stream.tags().size())
                throw ConfigError("unknown tag in config: " + name);
            tags.push_back(t);
        }
    } else {
        const auto min_users = get_or<std::uint64_t>(cfg, "min_tag_users", 2);
        for (TagId t = 0; t < tag_users.size(); ++t)
            if (tag_users[t] >= min_users)
                tags.push_back(t);
    }
    if (tags.empty())
        throw ConfigError("no tags selected");

    LeadTimeSpec sampling = parse_sampling(cfg, g, mix_seed(seed, kStreamSampling),
                                           SensorPolicy::per_node_friend);
    const auto null_replicates = get_or<std::uint32_t>(cfg, "null_replicates", 200);

    DetectionParams detection;
    if (cfg.contains("detection")) {
        const json& d = cfg["detection"];
        detection.alpha = get_or<double>(d, "alpha", 0.05);
        detection.consecutive_required = get_or<std::uint32_t>(d, "consecutive_required", 2);
        detection.bucket = get_or<double>(d, "bucket_days", 1.0);
    }

    std::string focus = get_or<std::string>(cfg, "focus_tag", stream.tags().name(tags.front()));
    const TagId focus_tag = stream.tags().lookup(focus);
    if (focus_tag == stream.tags().size())
        throw ConfigError("unknown focus_tag: " + focus);

    std::string table =
        "tag,unique_users,mean_delta,sem,fraction_negative,replicates,skipped,"
        "null_mean,null_q025,null_q975,observed_percentile,outside_null,"
        "detection_day,peak_day,catch_up_day,components,giant_fraction\n";
    std::uint32_t analyzed = 0, sensor_led = 0, outside_null = 0;
    json focus_summary;

    for (std::size_t i = 0; i < tags.size(); ++i) {
        const TagId tag = tags[i];
        LeadTimeSpec spec = sampling;
        spec.seed = mix_seed(mix_seed(seed, kStreamSampling), tag);

        LeadTimeSummary lead;
        NullSummary null_summary;
        try {
            lead = lead_time_experiment(g, stream, tag, spec);
            null_summary =
                shuffle_null(g, stream, tag, spec, null_replicates,
                             mix_seed(mix_seed(seed, kStreamNull), tag));
        } catch (const std::runtime_error&) {
            continue; // tag too sparse to analyze
        }
        ++analyzed;
        if (lead.mean < 0.0)
            ++sensor_led;
        const bool outside = null_summary.observed_mean < null_summary.q025 ||
                             null_summary.observed_mean > null_summary.q975;
        if (outside)
            ++outside_null;

        // One fixed monitoring pair per tag for the day-by-day detector.
        const std::vector<double> times = node_times_from_events(g, stream, tag);
        const std::uint64_t detect_seed = mix_seed(mix_seed(seed, kStreamDetect), tag);
        const NodeSample control =
            sample_control(g, spec.control_size, mix_seed(detect_seed, 0));
        const NodeSample sensor =
            sample_sensors(g, control, spec.policy, spec.direction,
                           spec.sensor_target > 0 ? spec.sensor_target : spec.control_size,
                           mix_seed(detect_seed, 1));
        DetectionReport report;
        bool detected_ok = true;
        try {
            report = realtime_detect(times, sensor, control, detection);
        } catch (const std::runtime_error&) {
            detected_ok = false;
        }

        const InducedNetwork net = hashtag_network(stream, g, tag);
        const ComponentReport components = connected_components(net.graph);

        table += stream.tags().name(tag);
        table += ',';
        table += std::to_string(tag_users[tag]);
        table += ',';
        table += format_double(lead.mean);
        table += ',';
        table += format_double(lead.sem);
        table += ',';
        table += format_double(lead.fraction_negative);
        table += ',';
        table += std::to_string(lead.replicates);
        table += ',';
        table += std::to_string(lead.skipped);
        table += ',';
        table += format_double(null_summary.mean);
        table += ',';
        table += format_double(null_summary.q025);
        table += ',';
        table += format_double(null_summary.q975);
        table += ',';
        table += format_double(null_summary.percentile);
        table += ',';
        table += outside ? "1" : "0";
        table += ',';
        table += detected_ok && report.detection_day ? std::to_string(*report.detection_day)
                                                     : "none";
        table += ',';
        table += detected_ok ? std::to_string(report.peak_incidence_day) : "none";
        table += ',';
        table += detected_ok && report.control_catch_up_day
                     ? std::to_string(*report.control_catch_up_day)
                     : "none";
        table += ',';
        table += std::to_string(components.component_count);
        table += ',';
        table += format_double(components.giant_fraction);
        table += '\n';

        if (tag == focus_tag) {
            if (detected_ok)
                save_detection_csv(out.path("incidence_" + stream.tags().name(tag) + ".csv"),
                                   report);
            focus_summary = {{"tag", stream.tags().name(tag)},
                             {"lead", to_json(lead)},
                             {"null", to_json(null_summary)},
                             {"detection", detected_ok ? to_json(report) : json()},
                             {"network", to_json(components)}};
        }
    }
    if (analyzed == 0)
        throw std::runtime_error("no analyzable replicates");

    write_text_file(out.path("tags.csv"), table);

    json summary{
        {"tags_selected", tags.size()},
        {"tags_analyzed", analyzed},
        {"fraction_sensor_led", static_cast<double>(sensor_led) / analyzed},
        {"fraction_outside_null", static_cast<double>(outside_null) / analyzed},
        {"null_replicates", null_replicates},
        {"focus", focus_summary},
    };
    save_json(out.path("summary.json"), summary);
    return summary;
}

// ---- fig4: activity and diversity profiles --------------------------------

json run_fig4(const json& cfg, std::uint64_t seed, OutputDir& out,
              std::vector<std::string>& inputs)
{
    GraphSource source = load_graph_source(cfg, seed);
    const Graph& g = source.graph;
    EventSource events = load_event_source(cfg, std::move(source.users));
    inputs.insert(inputs.end(), source.input_paths.begin(), source.input_paths.end());
    inputs.insert(inputs.end(), events.input_paths.begin(), events.input_paths.end());
    const EventStream& stream = events.stream;

    LeadTimeSpec sampling = parse_sampling(cfg, g, mix_seed(seed, kStreamSampling),
                                           SensorPolicy::per_node_friend);
    // The activity comparison draws sensors from followers by default.
    if (!require(cfg, "sampling").contains("direction"))
        sampling.direction = Direction::in;
    const bool remove_control_overlap = get_or<bool>(cfg, "remove_overlap", true);

    NodeSample control = sample_control(g, sampling.control_size, mix_seed(sampling.seed, 0));
    const NodeSample sensor = sample_sensors(
        g, control, sampling.policy, sampling.direction,
        sampling.sensor_target > 0 ? sampling.sensor_target : sampling.control_size,
        mix_seed(sampling.seed, 1));
    if (remove_control_overlap)
        control = remove_overlap(control, sensor);

    const MessageCounts* messages = events.messages ? &*events.messages : nullptr;
    const ActivityProfile control_profile = activity_profile(stream, control, messages);
    const ActivityProfile sensor_profile = activity_profile(stream, sensor, messages);

    const auto group_row = [](const std::string& name, const ActivityProfile& p) {
        std::string row = name;
        row += ',';
        row += std::to_string(p.rows.size());
        row += ',';
        row += std::to_string(p.absent_users);
        for (const GroupStat* s : {&p.total_messages, &p.tagged_messages, &p.tag_uses,
                                   &p.unique_tags, &p.uses_per_unique_tag}) {
            row += ',';
            row += format_double(s->mean);
            row += ',';
            row += format_double(s->sem);
        }
        row += '\n';
        return row;
    };
    std::string groups =
        "group,users,absent,messages_mean,messages_sem,tagged_mean,tagged_sem,"
        "uses_mean,uses_sem,unique_tags_mean,unique_tags_sem,uses_per_tag_mean,"
        "uses_per_tag_sem\n";
    groups += group_row("control", control_profile);
    groups += group_row("sensor", sensor_profile);
    write_text_file(out.path("activity_groups.csv"), groups);

    std::string buckets = "group,messages_low,messages_high,users,unique_tags_mean,unique_tags_sem\n";
    const auto bucket_rows = [&buckets](const std::string& name, const ActivityProfile& p) {
        for (const ActivityBucket& b : p.diversity_by_activity) {
            buckets += name;
            buckets += ',';
            buckets += std::to_string(b.low);
            buckets += ',';
            buckets += std::to_string(b.high);
            buckets += ',';
            buckets += std::to_string(b.user_count);
            buckets += ',';
            buckets += format_double(b.unique_tags.mean);
            buckets += ',';
            buckets += format_double(b.unique_tags.sem);
            buckets += '\n';
        }
    };
    bucket_rows("control", control_profile);
    bucket_rows("sensor", sensor_profile);
    write_text_file(out.path("diversity_buckets.csv"), buckets);

    json summary{
        {"control", to_json(control_profile)},
        {"sensor", to_json(sensor_profile)},
        {"remove_overlap", remove_control_overlap},
        {"message_file", messages != nullptr},
    };
    save_json(out.path("summary.json"), summary);
    return summary;
}

// ---- samplemath: detection-probability curves ------------------------------

json run_samplemath(const json& cfg, OutputDir& out)
{
    const json& d = require(cfg, "design");
    DetectionDesign design;
    design.population = as<std::uint64_t>(require(d, "population"), "design.population");
    design.sample_size = as<std::uint64_t>(require(d, "sample_size"), "design.sample_size");
    design.min_users = get_or<std::uint64_t>(d, "min_users", 1);
    design.n_samples = get_or<std::uint32_t>(d, "n_samples", 1);
    design.min_samples = get_or<std::uint32_t>(d, "min_samples", 1);

    std::vector<std::uint64_t> grid;
    const json& gspec = require(cfg, "x_grid");
    if (gspec.is_array()) {
        grid = as<std::vector<std::uint64_t>>(gspec, "x_grid");
    } else {
        const auto from = as<std::uint64_t>(require(gspec, "from"), "x_grid.from");
        const auto to = as<std::uint64_t>(require(gspec, "to"), "x_grid.to");
        const auto step = as<std::uint64_t>(require(gspec, "step"), "x_grid.step");
        if (step == 0 || to < from)
            throw ConfigError("x_grid needs step >= 1 and to >= from");
        for (std::uint64_t x = from; x <= to; x += step)
            grid.push_back(x);
    }
    if (grid.empty())
        throw ConfigError("x_grid is empty");

    std::vector<DetectionPoint> curve;
    try {
        curve = detection_curve(design, grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    std::string table = "X_alpha,probability\n";
    for (const DetectionPoint& p : curve) {
        table += std::to_string(p.x_alpha);
        table += ',';
        table += format_double(p.probability);
        table += '\n';
    }
    write_text_file(out.path("detection_curve.csv"), table);

    // First grid points whose detection probability crosses common levels.
    json crossings = json::object();
    for (const double level : {0.5, 0.95}) {
        json value;
        for (const DetectionPoint& p : curve) {
            if (p.probability >= level) {
                value = p.x_alpha;
                break;
            }
        }
        crossings[format_double(level)] = value;
    }
    json summary{
        {"population", design.population},
        {"sample_size", design.sample_size},
        {"min_users", design.min_users},
        {"n_samples", design.n_samples},
        {"min_samples", design.min_samples},
        {"grid_points", grid.size()},
        {"first_crossing", crossings},
    };
    save_json(out.path("summary.json"), summary);
    return summary;
}

} // namespace

int run_experiment(const CliOptions& options)
{
    const auto started = std::chrono::steady_clock::now();
    json cfg;
    std::uint64_t seed = 0;
    fs::path out_dir;
    std::vector<std::string> inputs;

    // Validation phase: nothing is written until this block succeeds.
    try {
        static const std::vector<std::string> kinds{"fig1",  "fig2a", "fig2bc",
                                                    "fig3",  "fig4",  "samplemath"};
        if (std::find(kinds.begin(), kinds.end(), options.kind) == kinds.end())
            throw ConfigError("unknown experiment kind \"" + options.kind + "\"");

        std::ifstream in(options.config_path);
        if (!in)
            throw ConfigError("cannot read config file: " + options.config_path);
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }

        if (options.seed)
            seed = *options.seed;
        else if (cfg.contains("seed"))
            seed = as<std::uint64_t>(cfg["seed"], "seed");
        else
            throw ConfigError("seed is required (config key \"seed\" or --seed)");

        if (options.out_dir)
            out_dir = *options.out_dir;
        else if (cfg.contains("out_dir"))
            out_dir = as<std::string>(cfg["out_dir"], "out_dir");
        else
            throw ConfigError("output directory is required (config key \"out_dir\" or --out)");

        int threads = 0;
        if (const char* env = std::getenv("SENSORNET_THREADS"))
            threads = std::atoi(env);
        else if (options.threads)
            threads = *options.threads;
        else
            threads = get_or<int>(cfg, "threads", 0);
        if (threads < 0)
            throw ConfigError("threads must be non-negative");
#ifdef _OPENMP
        if (threads > 0)
            omp_set_num_threads(threads);
#else
        (void)threads;
#endif

        // Check referenced inputs before touching the output directory.
        if (cfg.contains("graph") && cfg["graph"].value("type", "") == "edge_file")
            require_file(as<std::string>(require(cfg["graph"], "path"), "graph.path"));
        if (cfg.contains("events")) {
            require_file(as<std::string>(require(cfg["events"], "path"), "events.path"));
            if (cfg["events"].contains("messages"))
                require_file(as<std::string>(cfg["events"]["messages"], "events.messages"));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        fs::create_directories(out_dir);
        OutputDir out(out_dir);

        json result;
        if (options.kind == "fig1")
            result = run_fig1(cfg, seed, out);
        else if (options.kind == "fig2a")
            result = run_fig2a(cfg, seed, out);
        else if (options.kind == "fig2bc")
            result = run_fig2bc(cfg, seed, out, inputs);
        else if (options.kind == "fig3")
            result = run_fig3(cfg, seed, out, inputs);
        else if (options.kind == "fig4")
            result = run_fig4(cfg, seed, out, inputs);
        else
            result = run_samplemath(cfg, out);

        if (options.kind == "fig1" || options.kind == "fig2a") {
            // Generated-graph kinds may still read an edge file.
            if (cfg.contains("graph") && cfg["graph"].value("type", "") == "edge_file")
                inputs.push_back(cfg["graph"]["path"].get<std::string>());
        }

        json digests = json::object();
        for (const std::string& path : inputs)
            digests[path] = file_digest(path);

        const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        json manifest{
            {"kind", options.kind},
            {"version", kVersion},
            {"seed", seed},
            {"config", cfg},
            {"inputs", digests},
            {"outputs", out.written()},
            {"wall_ms", wall_ms},
        };
        save_json((out_dir / "manifest.json").string(), manifest);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace sensornet
