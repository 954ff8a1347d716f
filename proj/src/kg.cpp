#include "semkg/kg.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace semkg {
namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string stem_of(const std::string& path) {
    size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

template <typename T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

// ---------------------------------------------------------------- Subgraph

Subgraph Subgraph::from_triples(std::vector<Triple> triples, std::string origin_graph_id,
                                std::string id) {
    Subgraph sub;
    sub.origin_graph_id = std::move(origin_graph_id);
    sub.id = std::move(id);
    for (const auto& t : triples) {
        sub.nodes.push_back(t.source);
        sub.nodes.push_back(t.target);
    }
    sub.triples = std::move(triples);
    sort_unique(sub.nodes);
    sort_unique(sub.triples);
    return sub;
}

bool Subgraph::contains(const Node& n) const {
    return std::binary_search(nodes.begin(), nodes.end(), n);
}

bool Subgraph::contains(const Triple& t) const {
    return std::binary_search(triples.begin(), triples.end(), t);
}

size_t Subgraph::degree(const Node& n) const {
    size_t d = 0;
    for (const auto& t : triples)
        if (t.source == n || t.target == n) ++d;
    return d;
}

bool Subgraph::connected() const {
    if (nodes.empty()) return false;
    if (nodes.size() == 1) return true;
    std::map<Node, std::vector<const Node*>> adj;
    for (const auto& t : triples) {
        adj[t.source].push_back(&t.target);
        adj[t.target].push_back(&t.source);
    }
    std::set<Node> seen;
    std::queue<Node> q;
    q.push(nodes.front());
    seen.insert(nodes.front());
    while (!q.empty()) {
        Node u = q.front();
        q.pop();
        for (const Node* v : adj[u]) {
            if (seen.insert(*v).second) q.push(*v);
        }
    }
    return seen.size() == nodes.size();
}

bool Subgraph::has_isolated_node() const {
    for (const auto& n : nodes)
        if (degree(n) == 0) return true;
    return false;
}

void Subgraph::check_invariants() const {
    if (nodes.size() < 2) throw Error("subgraph invariant: fewer than 2 nodes");
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw Error("subgraph invariant: node storage not sorted-unique");
    if (!std::is_sorted(triples.begin(), triples.end()) ||
        std::adjacent_find(triples.begin(), triples.end()) != triples.end())
        throw Error("subgraph invariant: triple storage not sorted-unique");
    for (const auto& t : triples) {
        if (!contains(t.source) || !contains(t.target))
            throw Error("subgraph invariant: triple endpoint missing from node set");
    }
    if (has_isolated_node()) throw Error("subgraph invariant: isolated node");
    if (!connected()) throw Error("subgraph invariant: not weakly connected");
}

// ---------------------------------------------------------- KnowledgeGraph

KnowledgeGraph KnowledgeGraph::from_triples(const std::vector<Triple>& input,
                                            std::string graph_id,
                                            const std::vector<Node>& extra_nodes) {
    KnowledgeGraph kg;
    kg.id_ = std::move(graph_id);

    std::vector<Triple> triples;
    triples.reserve(input.size());
    for (const auto& t : input) {
        Triple cleaned{{trim(t.source.name), trim(t.source.type_label)},
                       trim(t.relation),
                       {trim(t.target.name), trim(t.target.type_label)}};
        if (cleaned.source.name.empty() || cleaned.target.name.empty() ||
            cleaned.relation.empty()) {
            ++kg.report_.malformed_dropped;
            continue;
        }
        triples.push_back(std::move(cleaned));
    }
    if (triples.empty()) throw ParseError("no triples");

    size_t before = triples.size();
    sort_unique(triples);
    kg.report_.duplicates_dropped = before - triples.size();

    for (const auto& t : triples) {
        kg.nodes_.push_back(t.source);
        kg.nodes_.push_back(t.target);
        kg.relations_.push_back(t.relation);
    }
    for (const auto& n : extra_nodes)
        if (!trim(n.name).empty()) kg.nodes_.push_back({trim(n.name), trim(n.type_label)});
    sort_unique(kg.nodes_);
    sort_unique(kg.relations_);

    auto node_id = [&](const Node& n) {
        auto it = std::lower_bound(kg.nodes_.begin(), kg.nodes_.end(), n);
        return static_cast<NodeId>(it - kg.nodes_.begin());
    };
    auto rel_id = [&](const std::string& r) {
        auto it = std::lower_bound(kg.relations_.begin(), kg.relations_.end(), r);
        return static_cast<uint32_t>(it - kg.relations_.begin());
    };

    kg.adjacency_.resize(kg.nodes_.size());
    kg.triples_.reserve(triples.size());
    for (const auto& t : triples) {
        TripleIds ids{node_id(t.source), rel_id(t.relation), node_id(t.target)};
        auto idx = static_cast<uint32_t>(kg.triples_.size());
        kg.triples_.push_back(ids);
        kg.adjacency_[ids.source].push_back(idx);
        if (ids.target != ids.source) kg.adjacency_[ids.target].push_back(idx);
    }
    for (NodeId i = 0; i < kg.nodes_.size(); ++i)
        kg.type_index_[kg.nodes_[i].type_label].push_back(i);
    return kg;
}

Triple KnowledgeGraph::triple(size_t idx) const {
    const TripleIds& t = triples_[idx];
    return Triple{nodes_[t.source], relations_[t.relation], nodes_[t.target]};
}

std::optional<KnowledgeGraph::NodeId> KnowledgeGraph::find_node(const Node& n) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
    if (it == nodes_.end() || *it != n) return std::nullopt;
    return static_cast<NodeId>(it - nodes_.begin());
}

const std::vector<KnowledgeGraph::NodeId>& KnowledgeGraph::nodes_of_type(
    const std::string& type_label) const {
    static const std::vector<NodeId> empty;
    auto it = type_index_.find(type_label);
    return it == type_index_.end() ? empty : it->second;
}

std::vector<std::string> KnowledgeGraph::entity_type_vocab() const {
    std::vector<std::string> types;
    types.reserve(type_index_.size());
    for (const auto& [type, _] : type_index_) types.push_back(type);
    return types;
}

bool KnowledgeGraph::endpoints_resolve() const {
    for (const auto& t : triples_) {
        if (t.source >= nodes_.size() || t.target >= nodes_.size()) return false;
        if (!find_node(nodes_[t.source]) || !find_node(nodes_[t.target])) return false;
    }
    return true;
}

// ------------------------------------------------------------------ loaders

std::string to_structured_line(const Triple& t) {
    nlohmann::json j{
        {"source_node", {{"name", t.source.name}, {"type", t.source.type_label}}},
        {"relation", {{"name", t.relation}}},
        {"target_node", {{"name", t.target.name}, {"type", t.target.type_label}}},
    };
    return j.dump();
}

Triple parse_structured_line(const std::string& line, long line_no) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad structured line: ") + e.what(), line_no);
    }
    try {
        Triple t;
        t.source.name = j.at("source_node").at("name").get<std::string>();
        t.source.type_label = j.at("source_node").value("type", "");
        t.relation = j.at("relation").at("name").get<std::string>();
        t.target.name = j.at("target_node").at("name").get<std::string>();
        t.target.type_label = j.at("target_node").value("type", "");
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad structured record: ") + e.what(), line_no);
    }
}

namespace {

std::vector<Triple> read_triples(const std::string& path, TripleFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Triple> triples;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (format == TripleFormat::StructuredLines) {
            triples.push_back(parse_structured_line(line, line_no));
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '\t')) cols.push_back(col);
        if (cols.size() != 5)
            throw ParseError("expected 5 tab-separated columns, got " +
                                 std::to_string(cols.size()),
                             line_no);
        triples.push_back(Triple{{cols[0], cols[1]}, cols[2], {cols[3], cols[4]}});
    }
    return triples;
}

}  // namespace

KnowledgeGraph load_kg(const std::string& path, TripleFormat format) {
    return KnowledgeGraph::from_triples(read_triples(path, format), stem_of(path));
}

size_t degree(const Subgraph& sub, const Node& node) {
    if (!sub.contains(node)) throw Error("degree: node not in subgraph: " + node.name);
    return sub.degree(node);
}

void write_subgraph(const Subgraph& sub, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& t : sub.triples) out << to_structured_line(t) << "\n";
}

Subgraph read_subgraph(const std::string& path, std::string origin_graph_id,
                       std::string id) {
    auto triples = read_triples(path, TripleFormat::StructuredLines);
    if (triples.empty()) throw ParseError("no triples in subgraph file " + path);
    if (id.empty()) id = stem_of(path);
    return Subgraph::from_triples(std::move(triples), std::move(origin_graph_id),
                                  std::move(id));
}

// ------------------------------------------------------- EdgeReplacementMap

EdgeReplacementMap::EdgeReplacementMap(std::map<std::string, std::vector<std::string>> mapping)
    : mapping_(std::move(mapping)) {
    for (const auto& [key, values] : mapping_) {
        if (values.empty())
            throw ParseError("edge map: empty replacement list for \"" + key + "\"");
        if (std::find(values.begin(), values.end(), key) != values.end())
            throw ParseError("edge map: \"" + key + "\" lists itself as a replacement");
    }
}

const std::vector<std::string>* EdgeReplacementMap::lookup(const std::string& relation) const {
    auto it = mapping_.find(relation);
    return it == mapping_.end() ? nullptr : &it->second;
}

std::vector<std::string> EdgeReplacementMap::unknown_keys(const KnowledgeGraph& kg) const {
    const auto& vocab = kg.relation_vocab();
    std::vector<std::string> unknown;
    for (const auto& [key, _] : mapping_)
        if (!std::binary_search(vocab.begin(), vocab.end(), key)) unknown.push_back(key);
    return unknown;
}

std::string EdgeReplacementMap::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, values] : mapping_) j[key] = values;
    return j.dump(4);
}

EdgeReplacementMap EdgeReplacementMap::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("edge map: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("edge map: top level must be an object");
    std::map<std::string, std::vector<std::string>> mapping;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_array()) throw ParseError("edge map: value for \"" + key + "\" must be a list");
        mapping[key] = value.get<std::vector<std::string>>();
    }
    return EdgeReplacementMap(std::move(mapping));
}

EdgeReplacementMap load_edge_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return EdgeReplacementMap::from_json(buf.str());
}

}  // namespace semkg
