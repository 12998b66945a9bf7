#include "doctest.h"

#include "sensornet/cascade.hpp"
#include "sensornet/events.hpp"
#include "sensornet/graph.hpp"
#include "sensornet/leadtime.hpp"
#include "sensornet/rng.hpp"
#include "sensornet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

using namespace sensornet;

namespace {

constexpr std::int64_t kDay = 86400;

EventStream make_stream(std::vector<std::tuple<std::string, std::string, std::int64_t>> raw,
                        TimeWindow window)
{
    IdDictionary users;
    TagDictionary tags;
    std::vector<EventRecord> records;
    for (auto& [user, tag, ts] : raw)
        records.push_back({users.intern(user), tags.intern(tag), ts});
    return EventStream::from_records(std::move(records), window, std::move(users),
                                     std::move(tags));
}

// Event stream over graph node ids "0".."n-1" with each given adoption
// (node, day) producing one record of the tag.
EventStream adoption_stream(NodeId n, const std::vector<std::pair<NodeId, double>>& adoptions,
                            double horizon_days)
{
    IdDictionary users;
    for (NodeId u = 0; u < n; ++u)
        users.intern(std::to_string(u));
    TagDictionary tags;
    const TagId tag = tags.intern("focus");
    std::vector<EventRecord> records;
    for (const auto& [node, day] : adoptions)
        records.push_back({node, tag, static_cast<std::int64_t>(day * kDay)});
    return EventStream::from_records(std::move(records),
                                     {0, static_cast<std::int64_t>(horizon_days * kDay)},
                                     std::move(users), std::move(tags));
}

} // namespace

TEST_CASE("delta_t arithmetic, antisymmetry, and translation invariance")
{
    CHECK(delta_t({1.0, 2.0}, {4.0, 6.0}) == doctest::Approx(-3.5).epsilon(1e-12));
    CHECK(delta_t({4.0, 6.0}, {1.0, 2.0}) == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(delta_t({3.0, 7.0}, {3.0, 7.0}) == doctest::Approx(0.0));

    Rng rng(1);
    std::vector<double> a, b;
    for (int i = 0; i < 20; ++i) {
        a.push_back(rng.unit() * 50.0);
        b.push_back(rng.unit() * 50.0);
    }
    const double base = delta_t(a, b);
    CHECK(delta_t(b, a) == doctest::Approx(-base).epsilon(1e-12));
    std::vector<double> a_shift = a, b_shift = b;
    for (double& v : a_shift)
        v += 17.25;
    for (double& v : b_shift)
        v += 17.25;
    CHECK(delta_t(a_shift, b_shift) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("delta_t reports which side lacked infections")
{
    CHECK_THROWS_WITH_AS(delta_t({}, {1.0}), "insufficient infections in sensor group",
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(delta_t({1.0}, {}), "insufficient infections in control group",
                         std::runtime_error);
}

TEST_CASE("node_times_from_trace and _from_events convert to the documented units")
{
    auto built = build_graph({{0, 1}, {1, 2}}, Directedness::undirected);
    SirParams p;
    p.lambda = 1.0;
    p.gamma_rec = 0.0;
    p.t_end = 10;
    for (std::uint64_t s = 0; s < 64; ++s) {
        p.seed = s;
        CascadeTrace trace = simulate_sir(built.graph, p);
        if (trace.curves[0].seed != 0)
            continue;
        auto times = node_times_from_trace(trace);
        REQUIRE(times.size() == 3);
        CHECK(times[0] == doctest::Approx(0.0));
        CHECK(times[1] == doctest::Approx(1.0));
        CHECK(times[2] == doctest::Approx(2.0));
        break;
    }

    EventStream s = adoption_stream(3, {{0, 0.0}, {1, 2.5}}, 10.0);
    auto times = node_times_from_events(built.graph, s, 0);
    REQUIRE(times.size() == 3);
    CHECK(times[0] == doctest::Approx(0.0));
    CHECK(times[1] == doctest::Approx(2.5));
    CHECK(std::isnan(times[2]));
}

TEST_CASE("lead_time_experiment with mirrored sensors is identically zero")
{
    Graph g = generate_ba(2000, 4, 9);
    SirParams p;
    p.lambda = 0.15;
    p.gamma_rec = 0.02;
    p.n_cascades = 5;
    p.t_end = 300;
    p.seed = 3;
    CascadeTrace trace = simulate_sir(g, p);

    LeadTimeSpec spec;
    spec.control_size = 100;
    spec.policy = SensorPolicy::mirror_control;
    spec.replicates = 40;
    spec.seed = 77;
    LeadTimeSummary summary = lead_time_experiment(g, trace, spec);
    CHECK(summary.replicates + summary.skipped == 40);
    CHECK(summary.replicates > 0);
    CHECK(summary.mean == doctest::Approx(0.0));
    CHECK(summary.sem == doctest::Approx(0.0));
    for (double d : summary.deltas)
        CHECK(d == doctest::Approx(0.0));
    for (std::size_t i = 0; i < summary.control_sizes.size(); ++i)
        CHECK(summary.control_sizes[i] == summary.sensor_sizes[i]);
}

TEST_CASE("lead_time_experiment summary fields are mutually consistent")
{
    Graph g = generate_ba(3000, 5, 12);
    SirParams p;
    p.lambda = 0.1;
    p.gamma_rec = 0.01;
    p.n_cascades = 3;
    p.t_end = 500;
    p.seed = 21;
    CascadeTrace trace = simulate_sir(g, p);

    LeadTimeSpec spec;
    spec.control_size = 150;
    spec.replicates = 60;
    spec.min_infected = 2;
    spec.seed = 4;
    LeadTimeSummary summary = lead_time_experiment(g, trace, spec);
    REQUIRE(summary.replicates == summary.deltas.size());
    CHECK(summary.replicates + summary.skipped == 60);
    CHECK(summary.mean == doctest::Approx(mean(summary.deltas)).epsilon(1e-12));
    CHECK(summary.sem == doctest::Approx(standard_error(summary.deltas)).epsilon(1e-9));
    std::size_t negatives = 0;
    for (double d : summary.deltas)
        if (d < 0.0)
            ++negatives;
    CHECK(summary.fraction_negative ==
          doctest::Approx(static_cast<double>(negatives) / summary.replicates));
    for (std::uint32_t infected : summary.control_infected)
        CHECK(infected >= spec.min_infected);
    for (std::uint32_t infected : summary.sensor_infected)
        CHECK(infected >= spec.min_infected);
}

TEST_CASE("lead_time_experiment is deterministic across repeated calls")
{
    Graph g = generate_ba(1500, 4, 2);
    SirParams p;
    p.lambda = 0.12;
    p.gamma_rec = 0.02;
    p.n_cascades = 4;
    p.t_end = 200;
    p.seed = 8;
    CascadeTrace trace = simulate_sir(g, p);
    LeadTimeSpec spec;
    spec.control_size = 80;
    spec.replicates = 30;
    spec.seed = 5;
    LeadTimeSummary a = lead_time_experiment(g, trace, spec);
    LeadTimeSummary b = lead_time_experiment(g, trace, spec);
    CHECK(a.deltas == b.deltas);
    CHECK(a.skipped == b.skipped);
}

TEST_CASE("all-skipped replicates raise the documented error")
{
    Graph g = generate_ba(400, 3, 6);
    SirParams p;
    p.lambda = 0.0; // nobody beyond the seed adopts
    p.n_cascades = 1;
    p.t_end = 10;
    p.seed = 2;
    CascadeTrace trace = simulate_sir(g, p);
    LeadTimeSpec spec;
    spec.control_size = 5;
    spec.replicates = 10;
    spec.min_infected = 3;
    spec.seed = 9;
    CHECK_THROWS_WITH_AS(lead_time_experiment(g, trace, spec), "no analyzable replicates",
                         std::runtime_error);
}

TEST_CASE("sensors lead on BFS-limit cascades")
{
    Graph g = generate_ba(8000, 5, 31);
    SirParams p;
    p.lambda = 1.0;
    p.gamma_rec = 0.0;
    p.n_cascades = 1;
    p.t_end = 100;
    p.seed = 17;
    CascadeTrace trace = simulate_sir(g, p);
    auto times = node_times_from_trace(trace);

    int sensor_leads = 0;
    for (std::uint32_t rep = 0; rep < 100; ++rep) {
        LeadTimeSpec spec;
        spec.control_size = 100; // gamma = 0.0125
        spec.replicates = 1;
        spec.seed = mix_seed(1234, rep);
        LeadTimeSummary summary = lead_time_core(g, times, spec);
        if (summary.replicates == 1 && summary.deltas[0] < 0.0)
            ++sensor_leads;
    }
    CHECK(sensor_leads >= 95);
}

TEST_CASE("permute_timestamps preserves the multiset and per-user counts")
{
    Rng data_rng(55);
    std::vector<std::pair<NodeId, std::int64_t>> records;
    for (int i = 0; i < 200; ++i)
        records.emplace_back(static_cast<NodeId>(data_rng.below(20)),
                             static_cast<std::int64_t>(data_rng.below(100000)));

    auto count_users = [](const std::vector<std::pair<NodeId, std::int64_t>>& recs) {
        std::map<NodeId, int> counts;
        for (const auto& [user, ts] : recs)
            ++counts[user];
        return counts;
    };
    auto time_multiset = [](const std::vector<std::pair<NodeId, std::int64_t>>& recs) {
        std::vector<std::int64_t> times;
        for (const auto& [user, ts] : recs)
            times.push_back(ts);
        std::sort(times.begin(), times.end());
        return times;
    };

    const auto users_before = count_users(records);
    const auto times_before = time_multiset(records);
    Rng rng(77);
    permute_timestamps(records, rng);
    CHECK(count_users(records) == users_before);
    CHECK(time_multiset(records) == times_before);
}

TEST_CASE("shuffle_null rejects single-user tags and brackets uniform data")
{
    EventStream lonely = adoption_stream(10, {{3, 1.0}, {3, 2.0}}, 10.0);
    Graph g = generate_ba(10, 2, 1);
    LeadTimeSpec spec;
    spec.control_size = 4;
    spec.replicates = 5;
    spec.seed = 3;
    CHECK_THROWS_AS(shuffle_null(g, lonely, 0, spec, 20, 11), std::runtime_error);
}

TEST_CASE("shuffle_null places degree-independent adoption inside its band")
{
    // adoption times independent of topology: the observed mean should sit
    // inside the null's central band in most trials
    Graph g = generate_ba(600, 4, 44);
    Rng rng(91);
    int inside = 0;
    const int trials = 25;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<std::pair<NodeId, double>> adoptions;
        for (NodeId u = 0; u < g.node_count(); ++u)
            if (rng.coin(0.5))
                adoptions.emplace_back(u, rng.unit() * 30.0);
        EventStream stream = adoption_stream(g.node_count(), adoptions, 31.0);
        LeadTimeSpec spec;
        spec.control_size = 60;
        spec.replicates = 20;
        spec.min_infected = 3;
        spec.seed = mix_seed(500, trial);
        NullSummary null = shuffle_null(g, stream, 0, spec, 60, mix_seed(600, trial));
        CHECK(null.replicates > 0);
        if (null.observed_mean >= null.q025 && null.observed_mean <= null.q975)
            ++inside;
    }
    CHECK(inside >= trials * 9 / 10);
}

TEST_CASE("shuffle_null percentile and p-value are consistent")
{
    Graph g = generate_ba(500, 4, 3);
    Rng rng(7);
    std::vector<std::pair<NodeId, double>> adoptions;
    for (NodeId u = 0; u < g.node_count(); ++u)
        if (rng.coin(0.6))
            adoptions.emplace_back(u, rng.unit() * 20.0);
    EventStream stream = adoption_stream(g.node_count(), adoptions, 21.0);
    LeadTimeSpec spec;
    spec.control_size = 50;
    spec.replicates = 15;
    spec.min_infected = 2;
    spec.seed = 13;
    NullSummary null = shuffle_null(g, stream, 0, spec, 40, 17);
    CHECK(null.percentile >= 0.0);
    CHECK(null.percentile <= 1.0);
    CHECK(null.two_sided_p ==
          doctest::Approx(2.0 * std::min(null.percentile, 1.0 - null.percentile)));
    CHECK(null.q025 <= null.q975);
    CHECK(null.replicates == null.deltas.size());
}

TEST_CASE("realtime_detect validates inputs and handles identical groups")
{
    std::vector<double> times(40, std::nan(""));
    for (int i = 0; i < 20; ++i)
        times[i] = static_cast<double>(i % 7);
    NodeSample group;
    for (NodeId u = 0; u < 20; ++u)
        group.members.push_back(u);

    DetectionParams params;
    DetectionReport report = realtime_detect(times, group, group, params);
    CHECK(!report.detection_day.has_value());
    for (double p : report.p_value)
        CHECK(p == doctest::Approx(1.0));
    for (std::size_t d = 1; d < report.sensor_cum.size(); ++d) {
        CHECK(report.sensor_cum[d] >= report.sensor_cum[d - 1]);
        CHECK(report.sensor_cum[d] <= 1.0 + 1e-12);
    }

    NodeSample empty;
    CHECK_THROWS_AS(realtime_detect(times, empty, group, params), std::invalid_argument);
    DetectionParams bad;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(realtime_detect(times, group, group, bad), std::invalid_argument);

    std::vector<double> never(40, std::nan(""));
    CHECK_THROWS_AS(realtime_detect(never, group, group, params), std::runtime_error);
}

TEST_CASE("realtime_detect fires when the sensor side adopts earlier")
{
    // sensors adopt on days 0-4, controls on days 10-14
    const NodeId n = 200;
    std::vector<double> times(n, std::nan(""));
    NodeSample sensor, control;
    for (NodeId u = 0; u < 100; ++u) {
        sensor.members.push_back(u);
        control.members.push_back(u + 100);
        times[u] = static_cast<double>(u % 5);
        times[u + 100] = static_cast<double>(10 + u % 5);
    }
    DetectionParams params;
    DetectionReport report = realtime_detect(times, sensor, control, params);
    REQUIRE(report.detection_day.has_value());
    CHECK(*report.detection_day <= 4);
    REQUIRE(report.control_catch_up_day.has_value());
    CHECK(*report.detection_day <= *report.control_catch_up_day);
    // control reaches the sensor's detection-day incidence only after day 10
    CHECK(*report.control_catch_up_day >= 10);
    // daily sums match cumulative growth
    for (std::size_t d = 0; d < report.p_value.size(); ++d) {
        double sensor_frac = 0.0;
        for (std::size_t e = 0; e <= d; ++e)
            sensor_frac += report.sensor_daily[e];
        CHECK(report.sensor_cum[d] ==
              doctest::Approx(sensor_frac / static_cast<double>(sensor.members.size())));
    }
}

TEST_CASE("realtime_detect p-values have the prefix property")
{
    Rng rng(21);
    const NodeId n = 300;
    std::vector<double> times(n, std::nan(""));
    for (NodeId u = 0; u < n; ++u)
        if (rng.coin(0.6))
            times[u] = rng.unit() * 20.0;
    NodeSample sensor, control;
    for (NodeId u = 0; u < 150; ++u)
        sensor.members.push_back(u);
    for (NodeId u = 150; u < 300; ++u)
        control.members.push_back(u);

    DetectionParams params;
    DetectionReport full = realtime_detect(times, sensor, control, params);

    // truncate adoption data at day 8: the first 8 days of p-values agree
    std::vector<double> truncated = times;
    for (double& t : truncated)
        if (!std::isnan(t) && t >= 8.0)
            t = std::nan("");
    const bool any_left = std::any_of(truncated.begin(), truncated.end(),
                                      [](double t) { return !std::isnan(t); });
    REQUIRE(any_left);
    DetectionReport head = realtime_detect(truncated, sensor, control, params);
    const std::size_t overlap = std::min<std::size_t>(head.p_value.size(), 8);
    for (std::size_t d = 0; d < overlap; ++d) {
        CHECK(full.p_value[d] == doctest::Approx(head.p_value[d]).epsilon(1e-12));
        CHECK(full.sensor_cum[d] == doctest::Approx(head.sensor_cum[d]).epsilon(1e-12));
    }
}

TEST_CASE("size_sweep with one size and one replicate equals the direct experiment")
{
    Graph g = generate_ba(2500, 4, 64);
    SirParams p;
    p.lambda = 0.1;
    p.gamma_rec = 0.01;
    p.n_cascades = 2;
    p.t_end = 400;
    p.seed = 10;
    CascadeTrace trace = simulate_sir(g, p);

    LeadTimeSpec base;
    base.replicates = 1;
    base.seed = 333;
    auto rows = size_sweep(g, trace, {120}, base);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].size == 120);

    LeadTimeSpec direct = base;
    direct.control_size = 120;
    direct.seed = mix_seed(base.seed, 0);
    LeadTimeSummary expected = lead_time_experiment(g, trace, direct);
    CHECK(rows[0].summary.deltas == expected.deltas);
    CHECK(rows[0].summary.skipped == expected.skipped);
}

TEST_CASE("size_sweep on events pools per-tag deltas and respects the usage filter")
{
    // two tags: "hot" used by 60% of nodes, "cold" by two nodes only
    Graph g = generate_ba(400, 3, 5);
    Rng rng(6);
    IdDictionary users;
    for (NodeId u = 0; u < g.node_count(); ++u)
        users.intern(std::to_string(u));
    TagDictionary tags;
    const TagId hot = tags.intern("hot");
    const TagId cold = tags.intern("cold");
    std::vector<EventRecord> records;
    for (NodeId u = 0; u < g.node_count(); ++u)
        if (rng.coin(0.6))
            records.push_back({u, hot, static_cast<std::int64_t>(rng.below(20) * kDay)});
    records.push_back({0, cold, 3 * kDay});
    records.push_back({1, cold, 5 * kDay});
    EventStream stream = EventStream::from_records(std::move(records), {0, 21 * kDay},
                                                   std::move(users), std::move(tags));

    LeadTimeSpec base;
    base.replicates = 6;
    base.min_infected = 2;
    base.seed = 97;
    // a 10% usage threshold keeps "hot" and drops "cold"
    auto rows = size_sweep(g, stream, {40, 80}, 0.10, base);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.summary.replicates == row.summary.deltas.size());
        CHECK(row.summary.replicates > 0);
    }
}

TEST_CASE("larger controls shrink both the lead and its standard error")
{
    Graph g = generate_ba(20000, 5, 123);
    SirParams p;
    p.lambda = 0.1;
    p.gamma_rec = 0.01;
    p.n_cascades = 5;
    p.t_end = 2000;
    p.seed = 9;
    CascadeTrace trace = simulate_sir(g, p);

    LeadTimeSpec base;
    base.replicates = 40;
    base.min_infected = 1;
    base.seed = 55;
    auto rows = size_sweep(g, trace, {50, 500, 5000}, base);
    REQUIRE(rows.size() == 3);
    // middle size shows a clearly negative lead; the largest approaches zero
    CHECK(rows[1].summary.mean < 0.0);
    CHECK(std::fabs(rows[2].summary.mean) < std::fabs(rows[1].summary.mean));
    CHECK(rows[2].summary.sem < rows[0].summary.sem);
}
