#include "doctest.h"

#include "sensornet/events.hpp"
#include "sensornet/graph.hpp"
#include "sensornet/rng.hpp"
#include "sensornet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace sensornet;

namespace {

constexpr std::int64_t kDay = 86400;

std::filesystem::path write_file(const std::string& name, const std::string& body)
{
    std::filesystem::path dir(SENSORNET_TEST_TMP_DIR);
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path;
}

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

} // namespace

TEST_CASE("TagDictionary folds case and tracks unknowns")
{
    TagDictionary tags;
    CHECK(tags.intern("OpenWebAwards") == 0);
    CHECK(tags.intern("openwebawards") == 0);
    CHECK(tags.intern("OPENWEBAWARDS") == 0);
    CHECK(tags.size() == 1);
    CHECK(tags.name(0) == "openwebawards");
    CHECK(tags.lookup("OpenWebAwards") == 0);
    CHECK(tags.lookup("other") == tags.size());
}

TEST_CASE("load_events parses, windows, and sorts")
{
    auto path = write_file("events_basic.tsv",
                           "# adoption sample\n"
                           "alice\tnews\t200\n"
                           "bob\tNews\t100\n"
                           "carol\tmusic\t900\n"
                           "dave\tnews\t5000\n");
    EventLoad load = load_events(path.string(), {0, 1000});
    // parsed counts well-formed lines; the window drop happens afterwards
    CHECK(load.report.parsed == 4);
    CHECK(load.report.comment_lines == 1);
    CHECK(load.report.malformed_lines == 0);
    CHECK(load.report.out_of_window == 1);
    REQUIRE(load.stream.records().size() == 3);
    CHECK(std::is_sorted(load.stream.records().begin(), load.stream.records().end(),
                         [](const EventRecord& a, const EventRecord& b) {
                             return a.timestamp < b.timestamp;
                         }));
    // case folding merged news/News
    CHECK(load.stream.tags().size() == 2);
    CHECK(load.stream.users().size() == 4); // dave interned even though his record is dropped
}

TEST_CASE("load_events rejects empty files and heavy corruption")
{
    auto empty = write_file("events_empty.tsv", "# nothing\n");
    CHECK_THROWS_AS(load_events(empty.string(), {0, 10}), std::runtime_error);

    std::ostringstream corrupt;
    for (int i = 0; i < 50; ++i)
        corrupt << "user" << i << "\ttag\t" << i << "\n";
    corrupt << "garbage line one\n";
    auto path = write_file("events_corrupt.tsv", corrupt.str());
    // 1 malformed of 51 data lines is just under 2%: error
    CHECK_THROWS_AS(load_events(path.string(), {0, 100}), std::runtime_error);

    std::ostringstream mostly_fine;
    for (int i = 0; i < 200; ++i)
        mostly_fine << "user" << i << "\ttag\t" << i << "\n";
    mostly_fine << "garbage line one\n";
    auto ok_path = write_file("events_mostly_fine.tsv", mostly_fine.str());
    EventLoad load = load_events(ok_path.string(), {0, 1000});
    CHECK(load.report.malformed_lines == 1);
    CHECK(load.report.parsed == 200);
}

TEST_CASE("load_events reuses a preloaded user dictionary")
{
    IdDictionary users;
    users.intern("zed");
    users.intern("alice");
    auto path = write_file("events_dict.tsv", "alice\tnews\t10\n");
    EventLoad load = load_events(path.string(), {0, 100}, std::move(users));
    REQUIRE(load.stream.records().size() == 1);
    CHECK(load.stream.records()[0].user == 1);
    CHECK(load.stream.users().external(0) == "zed");
}

TEST_CASE("from_records validates the window and drops out-of-window records")
{
    CHECK_THROWS_AS(make_stream({{"a", "x", 5}}, {10, 0}), std::invalid_argument);
    CHECK_THROWS_AS(make_stream({{"a", "x", 500}}, {0, 100}), std::runtime_error);

    LoadReport report;
    IdDictionary users;
    TagDictionary tags;
    std::vector<EventRecord> records{{users.intern("a"), tags.intern("x"), 50},
                                     {users.intern("a"), tags.intern("x"), 500}};
    EventStream s = EventStream::from_records(std::move(records), {0, 100}, std::move(users),
                                              std::move(tags), &report);
    CHECK(s.records().size() == 1);
    CHECK(report.out_of_window == 1);
}

TEST_CASE("tag_timeline takes per-user minima")
{
    EventStream s = make_stream({{"u1", "x", 9},
                                 {"u1", "x", 5},
                                 {"u2", "x", 3},
                                 {"u2", "y", 1},
                                 {"u3", "x", 7}},
                                {0, 100});
    const TagId x = s.tags().lookup("x");
    TagTimeline tl = tag_timeline(s, x);
    CHECK(tl.tag == x);
    CHECK(tl.total_uses == 4);
    CHECK(tl.unique_users() == 3);
    const NodeId u1 = s.users().lookup("u1");
    const NodeId u2 = s.users().lookup("u2");
    REQUIRE(tl.find(u1) != nullptr);
    CHECK(*tl.find(u1) == 5);
    CHECK(*tl.find(u2) == 3);
    CHECK(tl.find(s.users().lookup("u3")) != nullptr);
    CHECK(tl.find(NodeId{99}) == nullptr);
    CHECK(std::is_sorted(tl.first_use.begin(), tl.first_use.end(),
                         [](auto& a, auto& b) { return a.first < b.first; }));

    CHECK_THROWS_AS(tag_timeline(s, TagId{50}), std::invalid_argument);
}

TEST_CASE("tag_timeline matches a brute-force scan on random streams")
{
    Rng rng(808);
    std::vector<std::tuple<std::string, std::string, std::int64_t>> raw;
    for (int i = 0; i < 400; ++i) {
        raw.emplace_back("u" + std::to_string(rng.below(30)), "t" + std::to_string(rng.below(8)),
                         static_cast<std::int64_t>(rng.below(5000)));
    }
    EventStream s = make_stream(raw, {0, 5000});
    for (TagId tag = 0; tag < s.tags().size(); ++tag) {
        std::map<NodeId, std::int64_t> oracle;
        std::uint64_t uses = 0;
        for (const EventRecord& r : s.records()) {
            if (r.tag != tag)
                continue;
            ++uses;
            auto [it, fresh] = oracle.try_emplace(r.user, r.timestamp);
            if (!fresh)
                it->second = std::min(it->second, r.timestamp);
        }
        TagTimeline tl = tag_timeline(s, tag);
        CHECK(tl.total_uses == uses);
        REQUIRE(tl.unique_users() == oracle.size());
        for (const auto& [user, t0] : tl.first_use)
            CHECK(oracle.at(user) == t0);
    }
}

TEST_CASE("born_tags applies the quiet-period and volume rules")
{
    const std::int64_t start = 1000;
    EventStream s = make_stream(
        {
            {"a", "early", start + 10 * kDay},
            {"b", "early", start + 40 * kDay},
            {"a", "late", start + 30 * kDay},
            {"b", "late", start + 31 * kDay},
            {"c", "late", start + 32 * kDay},
            {"d", "sparse", start + 40 * kDay},
        },
        {start, start + 60 * kDay});

    const TagId late = s.tags().lookup("late");
    auto selected = born_tags(s, 25, 3);
    REQUIRE(selected == std::vector<TagId>{late});

    // raising either threshold never adds tags
    auto base = born_tags(s, 0, 0);
    CHECK(base.size() == s.tags().size());
    for (std::uint32_t quiet : {0u, 10u, 25u, 50u}) {
        for (std::uint64_t uses : {0u, 1u, 3u, 10u}) {
            auto tighter = born_tags(s, quiet, uses);
            auto looser_q = born_tags(s, quiet == 0 ? 0 : quiet - 5, uses);
            CHECK(std::includes(looser_q.begin(), looser_q.end(), tighter.begin(),
                                tighter.end()));
            auto looser_u = born_tags(s, quiet, uses == 0 ? 0 : uses - 1);
            CHECK(std::includes(looser_u.begin(), looser_u.end(), tighter.begin(),
                                tighter.end()));
        }
    }
}

TEST_CASE("popularity_histogram counts users per tag")
{
    EventStream one_tag = make_stream({{"a", "x", 1}, {"b", "x", 2}, {"c", "x", 3}}, {0, 10});
    auto hist = popularity_histogram(one_tag);
    REQUIRE(hist.size() == 1);
    CHECK(hist[0].first == 3);
    CHECK(hist[0].second == 1);

    EventStream two_tags = make_stream({{"a", "x", 1}, {"b", "y", 2}}, {0, 10});
    hist = popularity_histogram(two_tags);
    REQUIRE(hist.size() == 1);
    CHECK(hist[0].first == 1);
    CHECK(hist[0].second == 2);
}

TEST_CASE("popularity_histogram refits a synthetic Zipf tail")
{
    // users-per-tag counts drawn from P(u) proportional to u^-alpha
    const double alpha = 2.2;
    Rng rng(616);
    std::vector<std::tuple<std::string, std::string, std::int64_t>> raw;
    std::int64_t ts = 0;
    for (int tag = 0; tag < 3000; ++tag) {
        const double u = rng.unit();
        const int users = static_cast<int>(std::floor(std::pow(1.0 - u, -1.0 / (alpha - 1.0))));
        const int clamped = std::min(users, 5000);
        for (int i = 0; i < clamped; ++i)
            raw.emplace_back("u" + std::to_string(i), "t" + std::to_string(tag), ++ts);
    }
    EventStream s = make_stream(raw, {0, ts + 1});
    auto hist = popularity_histogram(s);
    std::vector<double> counts;
    for (const auto& [users, tags] : hist)
        for (std::uint64_t i = 0; i < tags; ++i)
            counts.push_back(static_cast<double>(users));
    const double fitted = power_law_mle_alpha(counts, 2.0);
    CHECK(fitted == doctest::Approx(alpha).epsilon(0.2 / alpha));
}

TEST_CASE("hashtag_network induces the subgraph of tag users")
{
    auto follow = build_graph({{0, 1}, {1, 2}, {2, 3}, {0, 3}}, Directedness::directed);
    EventStream s = make_stream(
        {{"n0", "x", 1}, {"n1", "x", 2}, {"n3", "x", 3}, {"n2", "y", 4}, {"n9", "x", 5}},
        {0, 10});
    // intern order: n0=0, n1=1, n3=2, n2=3, n9=4; graph covers ids 0..3
    const TagId x = s.tags().lookup("x");
    InducedNetwork net = hashtag_network(s, follow.graph, x);
    REQUIRE(net.original_ids == std::vector<NodeId>{0, 1, 2});
    CHECK(net.graph.node_count() == 3);
    CHECK(net.graph.edge_count() == 2); // 0->1 and 1->2 survive; edges into 3 drop
    CHECK(net.graph.has_edge(0, 1));
    CHECK(net.graph.has_edge(1, 2));

    // node set equals tag users intersected with graph nodes
    std::set<NodeId> expected;
    for (const auto& [user, ts] : tag_records(s, x))
        if (user < follow.graph.node_count())
            expected.insert(user);
    CHECK(std::set<NodeId>(net.original_ids.begin(), net.original_ids.end()) == expected);

    const TagId y = s.tags().lookup("y");
    InducedNetwork single = hashtag_network(s, follow.graph, y);
    CHECK(single.graph.node_count() == 1);
    CHECK(single.graph.edge_count() == 0);

    CHECK_THROWS_AS(hashtag_network(s, follow.graph, TagId{77}), std::invalid_argument);
}

TEST_CASE("hashtag_network errors when no tag user exists in the graph")
{
    auto follow = build_graph({{0, 1}}, Directedness::directed);
    EventStream s = make_stream({{"a", "x", 1}, {"b", "x", 2}, {"outside", "y", 3}}, {0, 10});
    // make a stream whose tag y user ids exceed the 2-node graph
    const TagId y = s.tags().lookup("y");
    CHECK_THROWS_AS(hashtag_network(s, follow.graph, y), std::runtime_error);
}

TEST_CASE("activity_profile fixture row (10, 4, 3)")
{
    // one user, 10 messages total, 4 tag uses across 4 distinct tagged
    // messages, 3 unique tags
    std::vector<std::tuple<std::string, std::string, std::int64_t>> raw = {
        {"u", "t1", 100}, {"u", "t2", 200}, {"u", "t3", 300}, {"u", "t1", 400},
        {"other", "t9", 50},
    };
    EventStream s = make_stream(raw, {0, 1000});
    std::ostringstream msgs;
    for (int i = 0; i < 10; ++i)
        msgs << "u\t" << (100 + i) << "\n";
    auto msg_path = write_file("messages_fixture.tsv", msgs.str());
    MessageCounts counts = load_messages(msg_path.string(), {0, 1000}, s.users());
    CHECK(counts.total_messages == 10);
    CHECK(counts.unknown_users == 0);

    NodeSample sample;
    sample.members = {s.users().lookup("u")};
    ActivityProfile profile = activity_profile(s, sample, &counts);
    REQUIRE(profile.rows.size() == 1);
    const ActivityRow& row = profile.rows[0];
    CHECK(row.total_messages == 10);
    CHECK(row.tagged_messages == 4);
    CHECK(row.tag_uses == 4);
    CHECK(row.unique_tags == 3);
    CHECK(profile.absent_users == 0);
    CHECK(profile.total_messages.mean == doctest::Approx(10.0));
    CHECK(profile.unique_tags.mean == doctest::Approx(3.0));
    CHECK(profile.uses_per_unique_tag.mean == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("activity_profile counts absent users as zero rows and averages arithmetically")
{
    EventStream s = make_stream({{"a", "x", 10}, {"a", "y", 10}, {"b", "x", 20}}, {0, 100});
    NodeSample sample;
    sample.members = {s.users().lookup("a"), s.users().lookup("b"), 7};
    ActivityProfile profile = activity_profile(s, sample);
    REQUIRE(profile.rows.size() == 3);
    CHECK(profile.absent_users == 1);
    // without a message file, totals fall back to tagged messages
    CHECK(profile.rows[0].total_messages == 1); // one timestamp with two tags
    CHECK(profile.rows[0].tag_uses == 2);
    CHECK(profile.rows[0].unique_tags == 2);
    double mean_uses = 0.0;
    for (const ActivityRow& row : profile.rows)
        mean_uses += row.tag_uses;
    mean_uses /= static_cast<double>(profile.rows.size());
    CHECK(profile.tag_uses.mean == doctest::Approx(mean_uses));
    for (const ActivityRow& row : profile.rows)
        CHECK(row.unique_tags <= row.tag_uses);
}

TEST_CASE("activity_profile buckets diversity by power-of-two activity")
{
    std::vector<std::tuple<std::string, std::string, std::int64_t>> raw;
    std::int64_t ts = 0;
    // u0: 1 message, u1: 3 messages, u2: 5 messages (distinct timestamps)
    for (int i = 0; i < 1; ++i)
        raw.emplace_back("u0", "a", ++ts);
    for (int i = 0; i < 3; ++i)
        raw.emplace_back("u1", "tag" + std::to_string(i), ++ts);
    for (int i = 0; i < 5; ++i)
        raw.emplace_back("u2", "tag" + std::to_string(i % 2), ++ts);
    EventStream s = make_stream(raw, {0, 1000});
    NodeSample sample;
    sample.members = {0, 1, 2};
    ActivityProfile profile = activity_profile(s, sample);
    REQUIRE(!profile.diversity_by_activity.empty());
    std::uint32_t users_in_buckets = 0;
    for (const ActivityBucket& bucket : profile.diversity_by_activity) {
        CHECK(bucket.low <= bucket.high);
        users_in_buckets += bucket.user_count;
    }
    CHECK(users_in_buckets == 3);
    // bucket [1,1] holds u0 alone; bucket [2,3] holds u1; bucket [4,7] holds u2
    CHECK(profile.diversity_by_activity[0].low == 1);
    CHECK(profile.diversity_by_activity[0].user_count == 1);
    CHECK(profile.diversity_by_activity[0].unique_tags.mean == doctest::Approx(1.0));
}

TEST_CASE("chunked loading agrees with batch loading")
{
    Rng rng(99);
    std::vector<std::tuple<std::string, std::string, std::int64_t>> raw;
    for (int i = 0; i < 300; ++i)
        raw.emplace_back("u" + std::to_string(rng.below(40)),
                         "t" + std::to_string(rng.below(10)),
                         static_cast<std::int64_t>(rng.below(2000)));

    EventStream batch = make_stream(raw, {0, 2000});

    // build the same stream from two chunks sharing dictionaries
    IdDictionary users;
    TagDictionary tags;
    std::vector<EventRecord> first, second;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& [u, t, ts] = raw[i];
        EventRecord rec{users.intern(u), tags.intern(t), ts};
        (i < raw.size() / 2 ? first : second).push_back(rec);
    }
    first.insert(first.end(), second.begin(), second.end());
    EventStream chunked =
        EventStream::from_records(std::move(first), {0, 2000}, std::move(users), std::move(tags));

    REQUIRE(batch.records().size() == chunked.records().size());
    for (TagId tag = 0; tag < batch.tags().size(); ++tag) {
        TagTimeline a = tag_timeline(batch, tag);
        TagTimeline b = tag_timeline(chunked, tag);
        CHECK(a.first_use == b.first_use);
        CHECK(a.total_uses == b.total_uses);
    }
}

TEST_CASE("load_messages windows and counts unknown users")
{
    IdDictionary users;
    users.intern("known");
    auto path = write_file("messages_window.tsv",
                           "known\t50\n"
                           "known\t5000\n"
                           "stranger\t60\n"
                           "# comment\n"
                           "known\t70\n");
    MessageCounts counts = load_messages(path.string(), {0, 100}, users);
    CHECK(counts.total_messages == 2);
    CHECK(counts.per_user.at(0) == 2);
    CHECK(counts.unknown_users == 1);
}
