#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semkg/errors.hpp"

namespace semkg {

// A typed entity. Identity is the (name, type_label) pair: the source KGs
// contain distinct entities of different types sharing a name, and merging
// them silently would corrupt adjacency.
struct Node {
    std::string name;
    std::string type_label;

    auto operator<=>(const Node&) const = default;
};

struct Triple {
    Node source;
    std::string relation;
    Node target;

    auto operator<=>(const Triple&) const = default;
};

enum class TripleFormat {
    TsvTriples,       // 5 tab-separated columns: src_name, src_type, relation, tgt_name, tgt_type
    StructuredLines,  // one JSON record per line: source_node{name,type}, relation{name}, target_node{name,type}
};

// A connected set of triples cut from one knowledge graph. Nodes and triples
// are kept sorted and unique so that equality, uniform draws and
// serialization are all order-independent.
struct Subgraph {
    std::vector<Node> nodes;
    std::vector<Triple> triples;
    std::string origin_graph_id;
    std::string id;

    static Subgraph from_triples(std::vector<Triple> triples,
                                 std::string origin_graph_id = "",
                                 std::string id = "");

    bool contains(const Node& n) const;
    bool contains(const Triple& t) const;
    size_t degree(const Node& n) const;  // incident triples, either direction
    bool connected() const;              // weak connectivity over all nodes
    bool has_isolated_node() const;
    bool is_tree() const { return connected() && triples.size() + 1 == nodes.size(); }

    // Throws if any Subgraph invariant is violated (>= 2 nodes, connected,
    // no isolated node, endpoints present, sorted unique storage).
    void check_invariants() const;

    bool operator==(const Subgraph& other) const {
        return nodes == other.nodes && triples == other.triples;
    }
};

// Counts of records dropped during a load.
struct LoadReport {
    size_t duplicates_dropped = 0;
    size_t malformed_dropped = 0;
};

// Immutable after construction; safe to share across threads.
class KnowledgeGraph {
public:
    using NodeId = uint32_t;

    struct TripleIds {
        NodeId source;
        uint32_t relation;  // index into relation_vocab()
        NodeId target;
    };

    // extra_nodes admits nodes that no triple touches (possible in source
    // KGs; unreachable from triple files, which only carry endpoints).
    static KnowledgeGraph from_triples(const std::vector<Triple>& triples,
                                       std::string graph_id = "",
                                       const std::vector<Node>& extra_nodes = {});

    const std::string& id() const { return id_; }
    size_t node_count() const { return nodes_.size(); }
    size_t triple_count() const { return triples_.size(); }

    const Node& node(NodeId id) const { return nodes_[id]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    Triple triple(size_t idx) const;
    const TripleIds& triple_ids(size_t idx) const { return triples_[idx]; }

    std::optional<NodeId> find_node(const Node& n) const;
    // Triple indices incident to the node, as source or target.
    const std::vector<uint32_t>& incident(NodeId id) const { return adjacency_[id]; }
    size_t degree(NodeId id) const { return adjacency_[id].size(); }

    const std::vector<NodeId>& nodes_of_type(const std::string& type_label) const;
    const std::vector<std::string>& relation_vocab() const { return relations_; }
    const std::string& relation_name(uint32_t rel) const { return relations_[rel]; }
    std::vector<std::string> entity_type_vocab() const;

    const LoadReport& load_report() const { return report_; }

    // True when every triple endpoint resolves through the node index.
    bool endpoints_resolve() const;

private:
    std::string id_;
    std::vector<Node> nodes_;                    // sorted, unique
    std::vector<std::string> relations_;         // sorted, unique
    std::vector<TripleIds> triples_;             // sorted, unique
    std::vector<std::vector<uint32_t>> adjacency_;
    std::map<std::string, std::vector<NodeId>> type_index_;
    LoadReport report_;
};

// Relation name -> allowed semantically-altering replacement relations.
class EdgeReplacementMap {
public:
    EdgeReplacementMap() = default;
    // Validates: no key contained in its own list, no empty list.
    explicit EdgeReplacementMap(std::map<std::string, std::vector<std::string>> mapping);

    const std::vector<std::string>* lookup(const std::string& relation) const;
    bool has(const std::string& relation) const { return lookup(relation) != nullptr; }
    size_t size() const { return mapping_.size(); }
    bool empty() const { return mapping_.empty(); }
    const std::map<std::string, std::vector<std::string>>& mapping() const { return mapping_; }

    // Keys that do not occur in the graph's relation vocabulary. Permitted,
    // but callers usually want to warn.
    std::vector<std::string> unknown_keys(const KnowledgeGraph& kg) const;

    std::string to_json() const;
    static EdgeReplacementMap from_json(const std::string& text);

private:
    std::map<std::string, std::vector<std::string>> mapping_;
};

KnowledgeGraph load_kg(const std::string& path, TripleFormat format);
EdgeReplacementMap load_edge_map(const std::string& path);

// Incident-triple count of `node` within `sub`; throws if absent.
size_t degree(const Subgraph& sub, const Node& node);

// Structured-lines serialization shared by KG files and subgraph files.
std::string to_structured_line(const Triple& t);
Triple parse_structured_line(const std::string& line, long line_no = -1);

void write_subgraph(const Subgraph& sub, const std::string& path);
Subgraph read_subgraph(const std::string& path, std::string origin_graph_id = "",
                       std::string id = "");

}  // namespace semkg
