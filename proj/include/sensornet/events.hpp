#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensornet/graph.hpp"
#include "sensornet/graph_io.hpp"
#include "sensornet/paradox.hpp"

namespace sensornet {

using TagId = std::uint32_t;

// Interned tag names, ASCII case-folded so "OpenWebAwards" and
// "openwebawards" share one id.
class TagDictionary {
public:
    TagId intern(const std::string& tag);
    TagId lookup(const std::string& tag) const; // size() if unknown
    TagId size() const { return static_cast<TagId>(names_.size()); }
    const std::string& name(TagId id) const { return names_.at(id); }

private:
    std::vector<std::string> names_; // folded form
    std::unordered_map<std::string, TagId> index_;
};

struct EventRecord {
    NodeId user;
    TagId tag;
    std::int64_t timestamp; // seconds UTC
};

// Closed interval in seconds UTC.
struct TimeWindow {
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
};

struct LoadReport {
    std::uint64_t parsed = 0;
    std::uint64_t comment_lines = 0;
    std::uint64_t malformed_lines = 0;
    std::uint64_t out_of_window = 0;
};

// Timestamp-sorted adoption records plus the dictionaries mapping external
// user and tag names to dense ids.
class EventStream {
public:
    // Takes ownership of the dictionaries; out-of-window records are dropped
    // (counted into report when given) and the rest stably sorted by time.
    static EventStream from_records(std::vector<EventRecord> records, TimeWindow window,
                                    IdDictionary users, TagDictionary tags,
                                    LoadReport* report = nullptr);

    const std::vector<EventRecord>& records() const { return records_; }
    const TimeWindow& window() const { return window_; }
    const IdDictionary& users() const { return users_; }
    const TagDictionary& tags() const { return tags_; }

private:
    std::vector<EventRecord> records_;
    TimeWindow window_;
    IdDictionary users_;
    TagDictionary tags_;
};

struct EventLoad {
    EventStream stream;
    LoadReport report;
};

// TSV `user<TAB>tag<TAB>unix_seconds`; `#` starts a comment line. The seed
// dictionary lets event user ids line up with a previously loaded edge file.
// More than 1% malformed lines is a hard error.
EventLoad load_events(const std::string& path, TimeWindow window, IdDictionary users = {});

struct TagTimeline {
    TagId tag = 0;
    std::vector<std::pair<NodeId, std::int64_t>> first_use; // sorted by user id
    std::uint64_t total_uses = 0;

    std::uint64_t unique_users() const { return first_use.size(); }
    // Pointer into first_use, or nullptr if the user never used the tag.
    const std::int64_t* find(NodeId user) const;
};

TagTimeline tag_timeline(const EventStream& stream, TagId tag);

// All (user, timestamp) records of one tag, in stream order.
std::vector<std::pair<NodeId, std::int64_t>> tag_records(const EventStream& stream, TagId tag);

// Tags first seen at least quiet_days after window start whose total use
// count is at least min_total_uses, ascending by id.
std::vector<TagId> born_tags(const EventStream& stream, std::uint32_t quiet_days,
                             std::uint64_t min_total_uses);

// Unique-user count per tag, indexed by tag id.
std::vector<std::uint64_t> users_per_tag(const EventStream& stream);

// (unique users, number of tags with that many users), ascending.
std::vector<std::pair<std::uint64_t, std::uint64_t>> popularity_histogram(
    const EventStream& stream);

// Induced subgraph plus the original id of each induced node.
struct InducedNetwork {
    Graph graph;
    std::vector<NodeId> original_ids; // ascending; index = induced id
};

// Follow graph restricted to the tag's users that exist in the graph.
InducedNetwork hashtag_network(const EventStream& stream, const Graph& g, TagId tag);

struct MessageCounts {
    std::unordered_map<NodeId, std::uint32_t> per_user;
    std::uint64_t total_messages = 0;
    std::uint64_t unknown_users = 0; // lines whose user is not in the dictionary
};

// Optional sidecar `user<TAB>unix_seconds` per message; enables total-message
// counts beyond tagged messages. Unknown users are counted and skipped.
MessageCounts load_messages(const std::string& path, TimeWindow window,
                            const IdDictionary& users);

struct ActivityRow {
    NodeId user = 0;
    std::uint32_t total_messages = 0;
    std::uint32_t tagged_messages = 0; // distinct timestamps with >= 1 tag
    std::uint32_t tag_uses = 0;
    std::uint32_t unique_tags = 0;
};

struct GroupStat {
    double mean = 0.0;
    double sem = 0.0;
};

struct ActivityBucket {
    std::uint32_t low = 0; // message-count range [low, high]
    std::uint32_t high = 0;
    std::uint32_t user_count = 0;
    GroupStat unique_tags;
};

struct ActivityProfile {
    std::vector<ActivityRow> rows; // ascending by user id, zero rows included
    std::uint32_t absent_users = 0;
    GroupStat total_messages;
    GroupStat tagged_messages;
    GroupStat tag_uses;
    GroupStat unique_tags;
    GroupStat uses_per_unique_tag; // over users with at least one tag
    // Unique-tag diversity bucketed by total messages in powers of two, the
    // activity-matched comparison.
    std::vector<ActivityBucket> diversity_by_activity;
};

// Without messages, total_messages falls back to tagged_messages.
ActivityProfile activity_profile(const EventStream& stream, const NodeSample& sample,
                                 const MessageCounts* messages = nullptr);

} // namespace sensornet
