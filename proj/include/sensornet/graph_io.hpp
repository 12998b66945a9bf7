#pragma once

#include "sensornet/graph.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace sensornet {

// External id <-> dense id mapping, persisted as `external<TAB>dense` lines.
class IdDictionary {
public:
    NodeId intern(const std::string& external);
    NodeId size() const { return static_cast<NodeId>(externals_.size()); }
    const std::string& external(NodeId dense) const { return externals_.at(dense); }
    // Returns the dense id, or size() if unknown.
    NodeId lookup(const std::string& external) const;

    void save(const std::string& path) const;
    static IdDictionary load(const std::string& path);

private:
    std::vector<std::string> externals_;
    std::unordered_map<std::string, NodeId> index_;
};

struct EdgeFileLoad {
    std::vector<Edge> edges;
    std::uint64_t comment_lines = 0;
    std::uint64_t malformed_lines = 0;
};

// One `src<TAB>dst` edge per line, '#' comments ignored. External ids are
// interned into dict in first-seen order.
EdgeFileLoad load_edge_file(const std::string& path, IdDictionary& dict);

} // namespace sensornet
