#include "sensornet/graph_io.hpp"

#include <fstream>
#include <stdexcept>

namespace sensornet {

NodeId IdDictionary::intern(const std::string& external)
{
    auto [it, inserted] = index_.try_emplace(external, static_cast<NodeId>(externals_.size()));
    if (inserted)
        externals_.push_back(external);
    return it->second;
}

NodeId IdDictionary::lookup(const std::string& external) const
{
    auto it = index_.find(external);
    return it == index_.end() ? size() : it->second;
}

void IdDictionary::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write id dictionary: " + path);
    for (NodeId dense = 0; dense < size(); ++dense)
        out << externals_[dense] << '\t' << dense << '\n';
}

IdDictionary IdDictionary::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read id dictionary: " + path);
    IdDictionary dict;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("malformed dictionary line: " + line);
        const std::string external = line.substr(0, tab);
        const NodeId dense = static_cast<NodeId>(std::stoul(line.substr(tab + 1)));
        if (dense != dict.size())
            throw std::runtime_error("dictionary dense ids must be contiguous from 0");
        dict.intern(external);
    }
    return dict;
}

EdgeFileLoad load_edge_file(const std::string& path, IdDictionary& dict)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read edge file: " + path);

    EdgeFileLoad result;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            ++result.comment_lines;
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
            line.find('\t', tab + 1) != std::string::npos) {
            ++result.malformed_lines;
            continue;
        }
        const NodeId src = dict.intern(line.substr(0, tab));
        const NodeId dst = dict.intern(line.substr(tab + 1));
        result.edges.push_back({src, dst});
    }
    return result;
}

} // namespace sensornet
