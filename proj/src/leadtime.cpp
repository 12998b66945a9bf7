#include "sensornet/leadtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "sensornet/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sensornet {

namespace {

constexpr double kNever = std::numeric_limits<double>::quiet_NaN();
constexpr double kSecondsPerDay = 86400.0;

struct ReplicateResult {
    bool ok = false;
    double delta = 0.0;
    std::uint32_t control_size = 0;
    std::uint32_t sensor_size = 0;
    std::uint32_t control_infected = 0;
    std::uint32_t sensor_infected = 0;
};

LeadTimeSummary summarize(const std::vector<ReplicateResult>& slots)
{
    LeadTimeSummary summary;
    for (const ReplicateResult& r : slots) {
        if (!r.ok) {
            ++summary.skipped;
            continue;
        }
        summary.deltas.push_back(r.delta);
        summary.control_sizes.push_back(r.control_size);
        summary.sensor_sizes.push_back(r.sensor_size);
        summary.control_infected.push_back(r.control_infected);
        summary.sensor_infected.push_back(r.sensor_infected);
    }
    if (summary.deltas.empty())
        throw std::runtime_error("no analyzable replicates");
    summary.replicates = static_cast<std::uint32_t>(summary.deltas.size());
    summary.mean = mean(summary.deltas);
    summary.sem = standard_error(summary.deltas);
    std::size_t negative = 0;
    for (double d : summary.deltas)
        if (d < 0.0)
            ++negative;
    summary.fraction_negative =
        static_cast<double>(negative) / static_cast<double>(summary.deltas.size());
    return summary;
}

std::vector<double> member_times(const std::vector<double>& node_times,
                                 const std::vector<NodeId>& members)
{
    std::vector<double> out;
    out.reserve(members.size());
    for (NodeId u : members) {
        const double t = node_times[u];
        if (!std::isnan(t))
            out.push_back(t);
    }
    return out;
}

ReplicateResult run_replicate(const Graph& g, const std::vector<double>& node_times,
                              const LeadTimeSpec& spec, std::uint64_t rep_seed,
                              const std::vector<std::uint8_t>* active_mask)
{
    ReplicateResult result;
    NodeSample control = sample_control(g, spec.control_size, mix_seed(rep_seed, 0));
    const std::uint32_t target =
        spec.sensor_target > 0 ? spec.sensor_target : spec.control_size;
    NodeSample sensor =
        sample_sensors(g, control, spec.policy, spec.direction, target, mix_seed(rep_seed, 1));

    if (spec.trim_inactive_control && active_mask) {
        std::vector<NodeId> kept;
        kept.reserve(control.members.size());
        for (NodeId u : control.members)
            if ((*active_mask)[u])
                kept.push_back(u);
        control.members = std::move(kept);
        if (spec.policy == SensorPolicy::mirror_control)
            sensor.members = control.members;
    }

    const std::vector<double> control_times = member_times(node_times, control.members);
    const std::vector<double> sensor_times = member_times(node_times, sensor.members);
    if (control_times.size() < spec.min_infected || sensor_times.size() < spec.min_infected)
        return result;

    result.ok = true;
    result.delta = delta_t(sensor_times, control_times);
    result.control_size = static_cast<std::uint32_t>(control.members.size());
    result.sensor_size = static_cast<std::uint32_t>(sensor.members.size());
    result.control_infected = static_cast<std::uint32_t>(control_times.size());
    result.sensor_infected = static_cast<std::uint32_t>(sensor_times.size());
    return result;
}

void validate_spec(const Graph& g, const LeadTimeSpec& spec)
{
    if (spec.replicates < 1)
        throw std::invalid_argument("replicates must be at least 1");
    if (spec.min_infected < 1)
        throw std::invalid_argument("min_infected must be at least 1");
    if (spec.control_size < 1 || spec.control_size > g.node_count())
        throw std::invalid_argument("control_size must lie in [1, node_count]");
}

} // namespace

double delta_t(const std::vector<double>& sensor_times, const std::vector<double>& control_times)
{
    if (sensor_times.empty())
        throw std::runtime_error("insufficient infections in sensor group");
    if (control_times.empty())
        throw std::runtime_error("insufficient infections in control group");
    return mean(sensor_times) - mean(control_times);
}

std::vector<double> node_times_from_trace(const CascadeTrace& trace)
{
    std::vector<double> times(trace.first_infection_time.size(), kNever);
    for (std::size_t u = 0; u < times.size(); ++u) {
        const std::uint32_t t = trace.first_infection_time[u];
        if (t != kNeverInfected)
            times[u] = static_cast<double>(t);
    }
    return times;
}

std::vector<double> node_times_from_events(const Graph& g, const EventStream& stream, TagId tag)
{
    std::vector<double> times(g.node_count(), kNever);
    const TagTimeline timeline = tag_timeline(stream, tag);
    const std::int64_t start = stream.window().t_start;
    for (const auto& [user, ts] : timeline.first_use)
        if (user < g.node_count())
            times[user] = static_cast<double>(ts - start) / kSecondsPerDay;
    return times;
}

LeadTimeSummary lead_time_core(const Graph& g, const std::vector<double>& node_times,
                               const LeadTimeSpec& spec,
                               const std::vector<std::uint8_t>* active_mask)
{
    validate_spec(g, spec);
    if (node_times.size() != g.node_count())
        throw std::invalid_argument("node_times size does not match the graph");

    std::vector<ReplicateResult> slots(spec.replicates);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(spec.replicates); ++r) {
        try {
            slots[r] = run_replicate(g, node_times, spec,
                                     mix_seed(spec.seed, static_cast<std::uint64_t>(r)),
                                     active_mask);
        } catch (const std::exception&) {
            slots[r].ok = false;
        }
    }
    return summarize(slots);
}

LeadTimeSummary lead_time_experiment(const Graph& g, const CascadeTrace& trace,
                                     const LeadTimeSpec& spec)
{
    return lead_time_core(g, node_times_from_trace(trace), spec);
}

LeadTimeSummary lead_time_experiment(const Graph& g, const EventStream& stream, TagId tag,
                                     const LeadTimeSpec& spec)
{
    const std::vector<double> times = node_times_from_events(g, stream, tag);
    if (!spec.trim_inactive_control)
        return lead_time_core(g, times, spec);
    std::vector<std::uint8_t> active(g.node_count(), 0);
    for (const EventRecord& r : stream.records())
        if (r.user < g.node_count())
            active[r.user] = 1;
    return lead_time_core(g, times, spec, &active);
}

void permute_timestamps(std::vector<std::pair<NodeId, std::int64_t>>& records, Rng& rng)
{
    for (std::size_t i = records.size(); i > 1; --i)
        std::swap(records[i - 1].second, records[rng.below(i)].second);
}

NullSummary shuffle_null(const Graph& g, const EventStream& stream, TagId tag,
                         const LeadTimeSpec& sampling, std::uint32_t replicates,
                         std::uint64_t seed)
{
    if (replicates < 1)
        throw std::invalid_argument("replicates must be at least 1");
    const std::vector<std::pair<NodeId, std::int64_t>> observed_records =
        tag_records(stream, tag);
    {
        std::vector<NodeId> users;
        users.reserve(observed_records.size());
        for (const auto& [u, ts] : observed_records)
            users.push_back(u);
        std::sort(users.begin(), users.end());
        users.erase(std::unique(users.begin(), users.end()), users.end());
        if (users.size() < 2)
            throw std::runtime_error("shuffle null needs a tag with at least 2 users");
    }

    std::vector<std::uint8_t> active;
    const std::vector<std::uint8_t>* mask = nullptr;
    if (sampling.trim_inactive_control) {
        active.assign(g.node_count(), 0);
        for (const EventRecord& r : stream.records())
            if (r.user < g.node_count())
                active[r.user] = 1;
        mask = &active;
    }

    NullSummary summary;
    summary.observed_mean = lead_time_core(g, node_times_from_events(g, stream, tag),
                                           sampling, mask).mean;

    const std::int64_t start = stream.window().t_start;
    std::vector<double> null_means(replicates, 0.0);
    std::vector<std::uint8_t> ok(replicates, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(replicates); ++r) {
        try {
            auto records = observed_records;
            Rng shuffle_rng = Rng::substream(seed, 2 * static_cast<std::uint64_t>(r));
            permute_timestamps(records, shuffle_rng);

            std::vector<double> times(g.node_count(), kNever);
            for (const auto& [user, ts] : records) {
                if (user >= g.node_count())
                    continue;
                const double day = static_cast<double>(ts - start) / kSecondsPerDay;
                if (std::isnan(times[user]) || day < times[user])
                    times[user] = day;
            }

            LeadTimeSpec rep_spec = sampling;
            rep_spec.seed = mix_seed(seed, 2 * static_cast<std::uint64_t>(r) + 1);
            null_means[r] = lead_time_core(g, times, rep_spec, mask).mean;
            ok[r] = 1;
        } catch (const std::exception&) {
            ok[r] = 0;
        }
    }

    for (std::uint32_t r = 0; r < replicates; ++r) {
        if (ok[r])
            summary.deltas.push_back(null_means[r]);
        else
            ++summary.skipped;
    }
    if (summary.deltas.empty())
        throw std::runtime_error("no analyzable replicates");
    summary.replicates = static_cast<std::uint32_t>(summary.deltas.size());
    summary.mean = mean(summary.deltas);
    summary.sem = standard_error(summary.deltas);
    summary.q025 = quantile(summary.deltas, 0.025);
    summary.q975 = quantile(summary.deltas, 0.975);

    std::size_t below = 0, equal = 0;
    for (double d : summary.deltas) {
        if (d < summary.observed_mean)
            ++below;
        else if (d == summary.observed_mean)
            ++equal;
    }
    summary.percentile = (static_cast<double>(below) + 0.5 * static_cast<double>(equal)) /
                         static_cast<double>(summary.deltas.size());
    summary.two_sided_p =
        std::min(1.0, 2.0 * std::min(summary.percentile, 1.0 - summary.percentile));
    return summary;
}

DetectionReport realtime_detect(const std::vector<double>& node_times, const NodeSample& sensor,
                                const NodeSample& control, const DetectionParams& params)
{
    if (sensor.members.empty() || control.members.empty())
        throw std::invalid_argument("both samples must be non-empty");
    if (!(params.alpha > 0.0) || params.alpha >= 1.0)
        throw std::invalid_argument("alpha must lie in (0, 1)");
    if (params.consecutive_required < 1)
        throw std::invalid_argument("consecutive_required must be at least 1");
    if (!(params.bucket > 0.0))
        throw std::invalid_argument("bucket width must be positive");

    const auto day_of = [&](double t) {
        return static_cast<std::uint32_t>(std::max(0.0, std::floor(t / params.bucket)));
    };
    std::uint32_t days = 0;
    for (const auto* members : {&sensor.members, &control.members})
        for (NodeId u : *members)
            if (!std::isnan(node_times[u]))
                days = std::max(days, day_of(node_times[u]) + 1);
    if (days == 0)
        throw std::runtime_error("detection window shorter than one bucket: no adoptions");

    DetectionReport report;
    report.sensor_daily.assign(days, 0);
    report.control_daily.assign(days, 0);
    for (NodeId u : sensor.members)
        if (!std::isnan(node_times[u]))
            ++report.sensor_daily[day_of(node_times[u])];
    for (NodeId u : control.members)
        if (!std::isnan(node_times[u]))
            ++report.control_daily[day_of(node_times[u])];

    report.sensor_cum.resize(days);
    report.control_cum.resize(days);
    report.p_value.resize(days);
    std::uint64_t s_cum = 0, c_cum = 0;
    for (std::uint32_t d = 0; d < days; ++d) {
        s_cum += report.sensor_daily[d];
        c_cum += report.control_daily[d];
        report.sensor_cum[d] = static_cast<double>(s_cum) / sensor.members.size();
        report.control_cum[d] = static_cast<double>(c_cum) / control.members.size();
        report.p_value[d] =
            two_proportion_p_value(s_cum, sensor.members.size(), c_cum, control.members.size());
    }

    std::uint32_t run = 0;
    for (std::uint32_t d = 0; d < days && !report.detection_day; ++d) {
        const bool hit =
            report.p_value[d] < params.alpha && report.sensor_cum[d] > report.control_cum[d];
        run = hit ? run + 1 : 0;
        if (run >= params.consecutive_required)
            report.detection_day = d + 1 - params.consecutive_required;
    }

    std::uint32_t peak = 0;
    std::uint64_t peak_count = 0;
    for (std::uint32_t d = 0; d < days; ++d) {
        const std::uint64_t combined =
            static_cast<std::uint64_t>(report.sensor_daily[d]) + report.control_daily[d];
        if (combined > peak_count) {
            peak_count = combined;
            peak = d;
        }
    }
    report.peak_incidence_day = peak;

    if (report.detection_day) {
        const double level = report.sensor_cum[*report.detection_day];
        for (std::uint32_t d = *report.detection_day; d < days; ++d) {
            if (report.control_cum[d] >= level) {
                report.control_catch_up_day = d;
                break;
            }
        }
    }
    return report;
}

std::vector<SizeSweepRow> size_sweep(const Graph& g, const CascadeTrace& trace,
                                     const std::vector<std::uint32_t>& sizes, LeadTimeSpec base)
{
    if (sizes.empty())
        throw std::invalid_argument("sizes must be non-empty");
    const std::vector<double> times = node_times_from_trace(trace);
    std::vector<SizeSweepRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        LeadTimeSpec spec = base;
        spec.control_size = sizes[si];
        spec.seed = mix_seed(base.seed, si);
        rows.push_back({sizes[si], lead_time_core(g, times, spec)});
    }
    return rows;
}

std::vector<SizeSweepRow> size_sweep(const Graph& g, const EventStream& stream,
                                     const std::vector<std::uint32_t>& sizes,
                                     double usage_fraction, LeadTimeSpec base)
{
    if (sizes.empty())
        throw std::invalid_argument("sizes must be non-empty");
    if (usage_fraction < 0.0 || usage_fraction >= 1.0)
        throw std::invalid_argument("usage_fraction must lie in [0, 1)");

    // First-use day per (user, tag), sorted by tag within each user.
    const NodeId n = g.node_count();
    const std::int64_t start = stream.window().t_start;
    std::vector<std::vector<std::pair<TagId, double>>> by_user(n);
    {
        std::vector<std::tuple<NodeId, TagId, std::int64_t>> triples;
        triples.reserve(stream.records().size());
        for (const EventRecord& r : stream.records())
            if (r.user < n)
                triples.emplace_back(r.user, r.tag, r.timestamp);
        std::sort(triples.begin(), triples.end());
        for (std::size_t i = 0; i < triples.size();) {
            const auto& [u, tag, ts] = triples[i];
            by_user[u].emplace_back(tag, static_cast<double>(ts - start) / kSecondsPerDay);
            std::size_t j = i;
            while (j < triples.size() && std::get<0>(triples[j]) == u &&
                   std::get<1>(triples[j]) == tag)
                ++j;
            i = j;
        }
    }
    std::vector<std::uint8_t> active(n, 0);
    for (NodeId u = 0; u < n; ++u)
        active[u] = by_user[u].empty() ? 0 : 1;

    const auto first_use = [&](NodeId u, TagId tag) -> double {
        const auto& list = by_user[u];
        const auto it = std::lower_bound(list.begin(), list.end(), tag,
                                         [](const auto& e, TagId t) { return e.first < t; });
        if (it == list.end() || it->first != tag)
            return kNever;
        return it->second;
    };

    std::vector<SizeSweepRow> rows;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::uint32_t size = sizes[si];
        if (size < 1 || size > n)
            throw std::invalid_argument("control_size must lie in [1, node_count]");
        const std::uint64_t size_seed = mix_seed(base.seed, si);

        // Every (replicate, passing tag) pair contributes one delta.
        std::vector<std::vector<ReplicateResult>> per_replicate(base.replicates);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(base.replicates); ++r) {
            const std::uint64_t rep_seed = mix_seed(size_seed, static_cast<std::uint64_t>(r));
            try {
                NodeSample control = sample_control(g, size, mix_seed(rep_seed, 0));
                const std::uint32_t target =
                    base.sensor_target > 0 ? base.sensor_target : size;
                NodeSample sensor = sample_sensors(g, control, base.policy, base.direction,
                                                   target, mix_seed(rep_seed, 1));
                if (base.trim_inactive_control) {
                    std::vector<NodeId> kept;
                    for (NodeId u : control.members)
                        if (active[u])
                            kept.push_back(u);
                    control.members = std::move(kept);
                    if (base.policy == SensorPolicy::mirror_control)
                        sensor.members = control.members;
                }
                if (control.members.empty())
                    continue;

                std::unordered_map<TagId, std::uint32_t> counts;
                for (NodeId u : control.members)
                    for (const auto& [tag, day] : by_user[u])
                        ++counts[tag];
                std::vector<TagId> passing;
                const double cut = usage_fraction * static_cast<double>(control.members.size());
                for (const auto& [tag, cnt] : counts)
                    if (static_cast<double>(cnt) > cut)
                        passing.push_back(tag);
                std::sort(passing.begin(), passing.end());

                for (TagId tag : passing) {
                    std::vector<double> control_times, sensor_times;
                    for (NodeId u : control.members) {
                        const double t = first_use(u, tag);
                        if (!std::isnan(t))
                            control_times.push_back(t);
                    }
                    for (NodeId u : sensor.members) {
                        const double t = first_use(u, tag);
                        if (!std::isnan(t))
                            sensor_times.push_back(t);
                    }
                    ReplicateResult result;
                    if (control_times.size() < base.min_infected ||
                        sensor_times.size() < base.min_infected) {
                        per_replicate[r].push_back(result);
                        continue;
                    }
                    result.ok = true;
                    result.delta = delta_t(sensor_times, control_times);
                    result.control_size = static_cast<std::uint32_t>(control.members.size());
                    result.sensor_size = static_cast<std::uint32_t>(sensor.members.size());
                    result.control_infected = static_cast<std::uint32_t>(control_times.size());
                    result.sensor_infected = static_cast<std::uint32_t>(sensor_times.size());
                    per_replicate[r].push_back(result);
                }
            } catch (const std::exception&) {
                per_replicate[r].clear();
            }
        }

        std::vector<ReplicateResult> flat;
        for (const auto& chunk : per_replicate)
            flat.insert(flat.end(), chunk.begin(), chunk.end());
        rows.push_back({size, summarize(flat)});
    }
    return rows;
}

} // namespace sensornet
