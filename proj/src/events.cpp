#include "sensornet/events.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "sensornet/stats.hpp"

namespace sensornet {

namespace {

std::string fold_ascii(const std::string& s)
{
    std::string out = s;
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool parse_i64(const std::string& text, std::size_t begin, std::size_t end, std::int64_t& out)
{
    const char* first = text.data() + begin;
    const char* last = text.data() + end;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

constexpr std::int64_t kSecondsPerDay = 86400;

} // namespace

TagId TagDictionary::intern(const std::string& tag)
{
    std::string folded = fold_ascii(tag);
    auto [it, inserted] = index_.try_emplace(folded, static_cast<TagId>(names_.size()));
    if (inserted)
        names_.push_back(std::move(folded));
    return it->second;
}

TagId TagDictionary::lookup(const std::string& tag) const
{
    auto it = index_.find(fold_ascii(tag));
    return it == index_.end() ? size() : it->second;
}

EventStream EventStream::from_records(std::vector<EventRecord> records, TimeWindow window,
                                      IdDictionary users, TagDictionary tags,
                                      LoadReport* report)
{
    if (window.t_end < window.t_start)
        throw std::invalid_argument("window end precedes window start");

    std::vector<EventRecord> kept;
    kept.reserve(records.size());
    std::uint64_t dropped = 0;
    for (const EventRecord& r : records) {
        if (r.timestamp < window.t_start || r.timestamp > window.t_end) {
            ++dropped;
            continue;
        }
        kept.push_back(r);
    }
    if (report)
        report->out_of_window += dropped;
    if (kept.empty())
        throw std::runtime_error("empty event stream: no records inside the window");

    std::stable_sort(kept.begin(), kept.end(),
                     [](const EventRecord& a, const EventRecord& b) {
                         return a.timestamp < b.timestamp;
                     });

    EventStream stream;
    stream.records_ = std::move(kept);
    stream.window_ = window;
    stream.users_ = std::move(users);
    stream.tags_ = std::move(tags);
    return stream;
}

EventLoad load_events(const std::string& path, TimeWindow window, IdDictionary users)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read event file: " + path);

    TagDictionary tags;
    std::vector<EventRecord> records;
    LoadReport report;
    std::uint64_t data_lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            ++report.comment_lines;
            continue;
        }
        ++data_lines;
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        std::int64_t ts = 0;
        if (tab1 == std::string::npos || tab2 == std::string::npos || tab1 == 0 ||
            tab2 == tab1 + 1 || tab2 + 1 >= line.size() ||
            line.find('\t', tab2 + 1) != std::string::npos ||
            !parse_i64(line, tab2 + 1, line.size(), ts)) {
            ++report.malformed_lines;
            continue;
        }
        const NodeId user = users.intern(line.substr(0, tab1));
        const TagId tag = tags.intern(line.substr(tab1 + 1, tab2 - tab1 - 1));
        records.push_back({user, tag, ts});
        ++report.parsed;
    }
    if (data_lines == 0)
        throw std::runtime_error("empty event file: " + path);
    if (report.malformed_lines * 100 > data_lines)
        throw std::runtime_error("event file has more than 1% malformed lines: " + path);

    EventStream stream = EventStream::from_records(std::move(records), window, std::move(users),
                                                   std::move(tags), &report);
    return {std::move(stream), report};
}

const std::int64_t* TagTimeline::find(NodeId user) const
{
    const auto it = std::lower_bound(first_use.begin(), first_use.end(), user,
                                     [](const auto& entry, NodeId u) { return entry.first < u; });
    if (it == first_use.end() || it->first != user)
        return nullptr;
    return &it->second;
}

TagTimeline tag_timeline(const EventStream& stream, TagId tag)
{
    if (tag >= stream.tags().size())
        throw std::invalid_argument("unknown tag id " + std::to_string(tag));

    TagTimeline timeline;
    timeline.tag = tag;
    std::unordered_map<NodeId, std::int64_t> first;
    for (const EventRecord& r : stream.records()) {
        if (r.tag != tag)
            continue;
        ++timeline.total_uses;
        auto [it, inserted] = first.try_emplace(r.user, r.timestamp);
        if (!inserted && r.timestamp < it->second)
            it->second = r.timestamp;
    }
    timeline.first_use.assign(first.begin(), first.end());
    std::sort(timeline.first_use.begin(), timeline.first_use.end());
    return timeline;
}

std::vector<std::pair<NodeId, std::int64_t>> tag_records(const EventStream& stream, TagId tag)
{
    if (tag >= stream.tags().size())
        throw std::invalid_argument("unknown tag id " + std::to_string(tag));
    std::vector<std::pair<NodeId, std::int64_t>> out;
    for (const EventRecord& r : stream.records())
        if (r.tag == tag)
            out.emplace_back(r.user, r.timestamp);
    return out;
}

std::vector<TagId> born_tags(const EventStream& stream, std::uint32_t quiet_days,
                             std::uint64_t min_total_uses)
{
    const TagId nm = stream.tags().size();
    std::vector<std::int64_t> earliest(nm, std::numeric_limits<std::int64_t>::max());
    std::vector<std::uint64_t> uses(nm, 0);
    for (const EventRecord& r : stream.records()) {
        ++uses[r.tag];
        earliest[r.tag] = std::min(earliest[r.tag], r.timestamp);
    }
    const std::int64_t cutoff =
        stream.window().t_start + static_cast<std::int64_t>(quiet_days) * kSecondsPerDay;
    std::vector<TagId> out;
    for (TagId t = 0; t < nm; ++t)
        if (uses[t] >= min_total_uses && earliest[t] >= cutoff)
            out.push_back(t);
    return out;
}

std::vector<std::uint64_t> users_per_tag(const EventStream& stream)
{
    std::vector<std::pair<TagId, NodeId>> pairs;
    pairs.reserve(stream.records().size());
    for (const EventRecord& r : stream.records())
        pairs.emplace_back(r.tag, r.user);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<std::uint64_t> counts(stream.tags().size(), 0);
    for (const auto& [tag, user] : pairs)
        ++counts[tag];
    return counts;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> popularity_histogram(
    const EventStream& stream)
{
    std::vector<std::uint64_t> counts = users_per_tag(stream);
    std::sort(counts.begin(), counts.end());
    std::vector<std::pair<std::uint64_t, std::uint64_t>> bins;
    for (std::size_t i = 0; i < counts.size();) {
        std::size_t j = i;
        while (j < counts.size() && counts[j] == counts[i])
            ++j;
        if (counts[i] > 0)
            bins.emplace_back(counts[i], j - i);
        i = j;
    }
    return bins;
}

InducedNetwork hashtag_network(const EventStream& stream, const Graph& g, TagId tag)
{
    const TagTimeline timeline = tag_timeline(stream, tag);

    InducedNetwork net;
    for (const auto& [user, ts] : timeline.first_use)
        if (user < g.node_count())
            net.original_ids.push_back(user);
    if (net.original_ids.empty())
        throw std::runtime_error("tag used by nobody in the graph");

    std::unordered_map<NodeId, NodeId> to_induced;
    to_induced.reserve(net.original_ids.size());
    for (NodeId i = 0; i < net.original_ids.size(); ++i)
        to_induced.emplace(net.original_ids[i], i);

    std::vector<Edge> edges;
    for (NodeId i = 0; i < net.original_ids.size(); ++i) {
        const NodeId u = net.original_ids[i];
        for (NodeId v : g.out_neighbors(u)) {
            const auto it = to_induced.find(v);
            if (it == to_induced.end())
                continue;
            if (!g.is_directed() && it->second < i)
                continue; // the lower endpoint already added this pair
            edges.push_back({i, it->second});
        }
    }

    const NodeId n = static_cast<NodeId>(net.original_ids.size());
    if (edges.empty())
        net.graph = isolated_graph(n, g.directedness());
    else
        net.graph = build_graph(std::move(edges), g.directedness(), n).graph;
    return net;
}

MessageCounts load_messages(const std::string& path, TimeWindow window,
                            const IdDictionary& users)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read message file: " + path);

    MessageCounts counts;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const auto tab = line.find('\t');
        std::int64_t ts = 0;
        if (tab == std::string::npos || tab == 0 || !parse_i64(line, tab + 1, line.size(), ts))
            continue;
        if (ts < window.t_start || ts > window.t_end)
            continue;
        const NodeId user = users.lookup(line.substr(0, tab));
        if (user == users.size()) {
            ++counts.unknown_users;
            continue;
        }
        ++counts.per_user[user];
        ++counts.total_messages;
    }
    return counts;
}

ActivityProfile activity_profile(const EventStream& stream, const NodeSample& sample,
                                 const MessageCounts* messages)
{
    struct Agg {
        std::uint32_t uses = 0;
        std::uint32_t tagged_messages = 0;
        std::int64_t last_ts = std::numeric_limits<std::int64_t>::min();
        std::unordered_set<TagId> tags;
    };
    std::unordered_map<NodeId, Agg> agg;
    agg.reserve(sample.members.size());
    for (NodeId u : sample.members)
        agg.emplace(u, Agg{});

    // Records are time-sorted, so per user a new timestamp marks a new
    // message; several tags in one message share its timestamp.
    for (const EventRecord& r : stream.records()) {
        auto it = agg.find(r.user);
        if (it == agg.end())
            continue;
        Agg& a = it->second;
        ++a.uses;
        a.tags.insert(r.tag);
        if (r.timestamp != a.last_ts) {
            ++a.tagged_messages;
            a.last_ts = r.timestamp;
        }
    }

    ActivityProfile profile;
    std::vector<double> v_total, v_tagged, v_uses, v_unique, v_ratio;
    for (NodeId u : sample.members) {
        const Agg& a = agg.at(u);
        ActivityRow row;
        row.user = u;
        row.tagged_messages = a.tagged_messages;
        row.tag_uses = a.uses;
        row.unique_tags = static_cast<std::uint32_t>(a.tags.size());
        row.total_messages = row.tagged_messages;
        if (messages) {
            const auto it = messages->per_user.find(u);
            if (it != messages->per_user.end())
                row.total_messages = it->second;
        }
        if (row.tag_uses == 0 && row.total_messages == 0)
            ++profile.absent_users;
        v_total.push_back(row.total_messages);
        v_tagged.push_back(row.tagged_messages);
        v_uses.push_back(row.tag_uses);
        v_unique.push_back(row.unique_tags);
        if (row.unique_tags > 0)
            v_ratio.push_back(static_cast<double>(row.tag_uses) / row.unique_tags);
        profile.rows.push_back(row);
    }

    const auto group = [](const std::vector<double>& v) {
        GroupStat s;
        if (!v.empty()) {
            s.mean = mean(v);
            s.sem = standard_error(v);
        }
        return s;
    };
    profile.total_messages = group(v_total);
    profile.tagged_messages = group(v_tagged);
    profile.tag_uses = group(v_uses);
    profile.unique_tags = group(v_unique);
    profile.uses_per_unique_tag = group(v_ratio);

    // Power-of-two activity buckets: users with 2^b..2^{b+1}-1 messages.
    std::unordered_map<std::uint32_t, std::vector<double>> buckets;
    for (const ActivityRow& row : profile.rows) {
        if (row.total_messages == 0)
            continue;
        const auto b = static_cast<std::uint32_t>(std::floor(std::log2(row.total_messages)));
        buckets[b].push_back(row.unique_tags);
    }
    std::vector<std::uint32_t> keys;
    for (const auto& [b, v] : buckets)
        keys.push_back(b);
    std::sort(keys.begin(), keys.end());
    for (std::uint32_t b : keys) {
        ActivityBucket bucket;
        bucket.low = 1u << b;
        bucket.high = (b + 1 < 32) ? (1u << (b + 1)) - 1 : std::numeric_limits<std::uint32_t>::max();
        bucket.user_count = static_cast<std::uint32_t>(buckets[b].size());
        bucket.unique_tags = group(buckets[b]);
        profile.diversity_by_activity.push_back(bucket);
    }
    return profile;
}

} // namespace sensornet
