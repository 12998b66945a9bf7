#include "doctest.h"

#include "sensornet/graph.hpp"
#include "sensornet/graph_io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace sensornet;

namespace {

std::filesystem::path tmp_dir()
{
    std::filesystem::path dir(SENSORNET_TEST_TMP_DIR);
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& body)
{
    auto path = tmp_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path;
}

} // namespace

TEST_CASE("IdDictionary interns in first-seen order and looks up")
{
    IdDictionary dict;
    CHECK(dict.intern("alice") == 0);
    CHECK(dict.intern("bob") == 1);
    CHECK(dict.intern("alice") == 0);
    CHECK(dict.size() == 2);
    CHECK(dict.external(1) == "bob");
    CHECK(dict.lookup("bob") == 1);
    CHECK(dict.lookup("carol") == dict.size());
}

TEST_CASE("IdDictionary round-trips through a file")
{
    IdDictionary dict;
    dict.intern("u-9");
    dict.intern("u-3");
    dict.intern("u-14");
    auto path = tmp_dir() / "dict_roundtrip.tsv";
    dict.save(path.string());

    IdDictionary loaded = IdDictionary::load(path.string());
    CHECK(loaded.size() == 3);
    CHECK(loaded.external(0) == "u-9");
    CHECK(loaded.external(2) == "u-14");
    CHECK(loaded.lookup("u-3") == 1);
}

TEST_CASE("IdDictionary::load rejects gaps and malformed lines")
{
    auto gap = write_file("dict_gap.tsv", "a\t0\nb\t2\n");
    CHECK_THROWS_AS(IdDictionary::load(gap.string()), std::runtime_error);
    auto junk = write_file("dict_junk.tsv", "a\t0\nnot-a-pair\n");
    CHECK_THROWS_AS(IdDictionary::load(junk.string()), std::runtime_error);
    CHECK_THROWS_AS(IdDictionary::load((tmp_dir() / "missing_dict.tsv").string()),
                    std::runtime_error);
}

TEST_CASE("load_edge_file parses edges, comments, and malformed lines")
{
    auto path = write_file("edges_basic.tsv",
                           "# follower graph sample\n"
                           "alice\tbob\n"
                           "bob\tcarol\n"
                           "\n"
                           "broken line without tab\n"
                           "alice\tcarol\n");
    IdDictionary dict;
    EdgeFileLoad load = load_edge_file(path.string(), dict);
    CHECK(load.comment_lines == 1);
    CHECK(load.malformed_lines == 1); // blank lines are skipped, tabless lines counted
    REQUIRE(load.edges.size() == 3);
    CHECK(dict.size() == 3);
    CHECK(dict.lookup("alice") == 0);
    CHECK(dict.lookup("bob") == 1);
    CHECK(dict.lookup("carol") == 2);
    CHECK(load.edges[0].src == 0);
    CHECK(load.edges[0].dst == 1);
    CHECK(load.edges[2].src == 0);
    CHECK(load.edges[2].dst == 2);
}

TEST_CASE("load_edge_file handles CRLF endings and builds a usable graph")
{
    auto path = write_file("edges_crlf.tsv", "x\ty\r\ny\tz\r\n");
    IdDictionary dict;
    EdgeFileLoad load = load_edge_file(path.string(), dict);
    REQUIRE(load.edges.size() == 2);
    auto built = build_graph(load.edges, Directedness::directed);
    CHECK(built.graph.node_count() == 3);
    CHECK(built.graph.has_edge(dict.lookup("x"), dict.lookup("y")));
    CHECK(built.graph.has_edge(dict.lookup("y"), dict.lookup("z")));
}

TEST_CASE("load_edge_file errors on missing file")
{
    IdDictionary dict;
    CHECK_THROWS_AS(load_edge_file((tmp_dir() / "missing_edges.tsv").string(), dict),
                    std::runtime_error);
}

TEST_CASE("load_edge_file keeps interning into a preloaded dictionary")
{
    IdDictionary dict;
    dict.intern("seed-user");
    auto path = write_file("edges_preloaded.tsv", "seed-user\tnewbie\n");
    EdgeFileLoad load = load_edge_file(path.string(), dict);
    REQUIRE(load.edges.size() == 1);
    CHECK(load.edges[0].src == 0);
    CHECK(load.edges[0].dst == 1);
    CHECK(dict.size() == 2);
}
