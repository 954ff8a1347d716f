#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "semkg/kg.hpp"

using namespace semkg;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content, const std::string& name = "kg_test.tmp") {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_kg parses a single tsv triple") {
    TempFile f(
        "Norway\tcountry\tmember of\tOrganisation for the Prohibition of Chemical "
        "Weapons\torganization\n");
    KnowledgeGraph kg = load_kg(f.path, TripleFormat::TsvTriples);
    CHECK(kg.node_count() == 2);
    CHECK(kg.triple_count() == 1);
    Triple t = kg.triple(0);
    CHECK(t.source.name == "Norway");
    CHECK(t.relation == "member of");
    CHECK(t.target.name == "Organisation for the Prohibition of Chemical Weapons");
    CHECK(t.target.type_label == "organization");
}

TEST_CASE("load_kg rejects an empty file") {
    TempFile f("");
    CHECK_THROWS_WITH_AS(load_kg(f.path, TripleFormat::TsvTriples), "no triples", ParseError);
}

TEST_CASE("load_kg builds indexes for a 3-node path") {
    TempFile f(
        "a\tta\tr1\tb\ttb\n"
        "b\ttb\tr2\tc\ttc\n");
    KnowledgeGraph kg = load_kg(f.path, TripleFormat::TsvTriples);
    CHECK(kg.node_count() == 3);
    CHECK(kg.triple_count() == 2);
    CHECK(kg.entity_type_vocab().size() == 3);
    CHECK(kg.relation_vocab() == std::vector<std::string>{"r1", "r2"});
    auto b = kg.find_node({"b", "tb"});
    REQUIRE(b.has_value());
    CHECK(kg.degree(*b) == 2);
    CHECK(kg.endpoints_resolve());
}

TEST_CASE("load_kg deduplicates and reports") {
    TempFile f(
        "a\tt\tr\tb\tt\n"
        "a\tt\tr\tb\tt\n"
        "a\tt\tr\tc\tt\n");
    KnowledgeGraph kg = load_kg(f.path, TripleFormat::TsvTriples);
    CHECK(kg.triple_count() == 2);
    CHECK(kg.load_report().duplicates_dropped == 1);
}

TEST_CASE("load_kg drops triples with empty node names and reports") {
    TempFile f(
        "a\tt\tr\tb\tt\n"
        "  \tt\tr\tb\tt\n");
    KnowledgeGraph kg = load_kg(f.path, TripleFormat::TsvTriples);
    CHECK(kg.triple_count() == 1);
    CHECK(kg.load_report().malformed_dropped == 1);
}

TEST_CASE("load_kg reports the failing line number") {
    TempFile f("a\tt\tr\tb\tt\nbad line without tabs\n");
    try {
        load_kg(f.path, TripleFormat::TsvTriples);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("load_kg is idempotent") {
    TempFile f(
        "a\tt\tr\tb\tt\n"
        "b\tt\tr\tc\tt\n"
        "c\tt\tr2\ta\tt\n");
    KnowledgeGraph kg1 = load_kg(f.path, TripleFormat::TsvTriples);
    KnowledgeGraph kg2 = load_kg(f.path, TripleFormat::TsvTriples);
    REQUIRE(kg1.triple_count() == kg2.triple_count());
    CHECK(kg1.nodes() == kg2.nodes());
    for (size_t i = 0; i < kg1.triple_count(); ++i) CHECK(kg1.triple(i) == kg2.triple(i));
}

TEST_CASE("structured-lines format round-trips through subgraph files") {
    Subgraph sub = Subgraph::from_triples(
        {oracle::t(oracle::n("a", "x"), "likes", oracle::n("b", "y")),
         oracle::t(oracle::n("b", "y"), "knows", oracle::n("c", "z"))},
        "g", "sub_0");
    std::string path = (std::filesystem::temp_directory_path() / "sub_rt.jsonl").string();
    write_subgraph(sub, path);
    Subgraph back = read_subgraph(path, "g");
    CHECK(back == sub);
    std::remove(path.c_str());
}

TEST_CASE("parse_structured_line flags bad records") {
    CHECK_THROWS_AS(parse_structured_line("{not json", 7), ParseError);
    CHECK_THROWS_AS(parse_structured_line(R"({"relation": {"name": "r"}})", 3), ParseError);
    Triple t = parse_structured_line(
        R"({"source_node":{"name":"a","type":"x"},"relation":{"name":"r"},"target_node":{"name":"b","type":"y"}})");
    CHECK(t.source.name == "a");
    CHECK(t.target.type_label == "y");
}

TEST_CASE("edge map accepts the biomedical activity/effect mapping") {
    EdgeReplacementMap map = EdgeReplacementMap::from_json(
        R"({"increase_activity": ["decrease_activity"], "decrease_activity": ["increase_activity"]})");
    CHECK(map.size() == 2);
    REQUIRE(map.lookup("increase_activity") != nullptr);
    CHECK(*map.lookup("increase_activity") == std::vector<std::string>{"decrease_activity"});
}

TEST_CASE("edge map rejects self-replacement") {
    CHECK_THROWS_AS(EdgeReplacementMap::from_json(R"({"child": ["child"]})"), ParseError);
}

TEST_CASE("edge map rejects empty replacement lists") {
    CHECK_THROWS_AS(EdgeReplacementMap::from_json(R"({"child": []})"), ParseError);
}

TEST_CASE("shipped financial edge map has symmetric raise/decrease") {
    EdgeReplacementMap map = load_edge_map(std::string(SEMKG_DATA_DIR) + "/edge_maps/findkg.json");
    REQUIRE(map.lookup("Raise") != nullptr);
    CHECK(*map.lookup("Raise") == std::vector<std::string>{"Decrease"});
    CHECK(*map.lookup("Decrease") == std::vector<std::string>{"Raise"});
}

TEST_CASE("edge map serialization round-trips") {
    for (const char* name : {"codex", "findkg", "globi", "oregano"}) {
        EdgeReplacementMap map =
            load_edge_map(std::string(SEMKG_DATA_DIR) + "/edge_maps/" + name + ".json");
        EdgeReplacementMap back = EdgeReplacementMap::from_json(map.to_json());
        CHECK(back.mapping() == map.mapping());
    }
}

TEST_CASE("edge map reports keys missing from a graph vocabulary") {
    KnowledgeGraph kg =
        KnowledgeGraph::from_triples({oracle::t(oracle::n("a"), "likes", oracle::n("b"))}, "g");
    EdgeReplacementMap map =
        EdgeReplacementMap::from_json(R"({"likes": ["dislikes"], "absent": ["likes"]})");
    CHECK(map.unknown_keys(kg) == std::vector<std::string>{"absent"});
}

TEST_CASE("subgraph degree") {
    Node a = oracle::n("a"), b = oracle::n("b"), c = oracle::n("c"), s = oracle::n("s");
    SUBCASE("path middle node") {
        Subgraph sub = Subgraph::from_triples({oracle::t(a, "r", b), oracle::t(b, "r", c)});
        CHECK(degree(sub, b) == 2);
        CHECK(degree(sub, a) == 1);
    }
    SUBCASE("single triple") {
        Subgraph sub = Subgraph::from_triples({oracle::t(a, "r", b)});
        CHECK(degree(sub, a) == 1);
    }
    SUBCASE("star center") {
        std::vector<Triple> triples;
        for (int i = 0; i < 4; ++i)
            triples.push_back(oracle::t(s, "r", oracle::n("leaf" + std::to_string(i))));
        Subgraph sub = Subgraph::from_triples(triples);
        CHECK(degree(sub, s) == 4);
    }
    SUBCASE("unknown node") {
        Subgraph sub = Subgraph::from_triples({oracle::t(a, "r", b)});
        CHECK_THROWS_AS(degree(sub, oracle::n("zz")), Error);
    }
}

TEST_CASE("subgraph invariants catch disconnection and undersize") {
    Node a = oracle::n("a"), b = oracle::n("b"), c = oracle::n("c"), d = oracle::n("d");
    Subgraph ok = Subgraph::from_triples({oracle::t(a, "r", b)});
    CHECK_NOTHROW(ok.check_invariants());
    Subgraph split = Subgraph::from_triples({oracle::t(a, "r", b), oracle::t(c, "r", d)});
    CHECK_THROWS_AS(split.check_invariants(), Error);
    Subgraph self_loop_only = Subgraph::from_triples({oracle::t(a, "r", a)});
    CHECK_THROWS_AS(self_loop_only.check_invariants(), Error);
}

TEST_CASE("knowledge graph admits parallel edges but not exact duplicates") {
    Node a = oracle::n("a"), b = oracle::n("b");
    KnowledgeGraph kg = KnowledgeGraph::from_triples(
        {oracle::t(a, "r1", b), oracle::t(a, "r2", b), oracle::t(a, "r1", b)}, "g");
    CHECK(kg.triple_count() == 2);
    CHECK(kg.load_report().duplicates_dropped == 1);
}
