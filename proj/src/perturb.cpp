#include "semkg/perturb.hpp"

#include <algorithm>

#include <json.hpp>

namespace semkg {
namespace {

Subgraph without_node(const Subgraph& sub, const Node& victim) {
    std::vector<Triple> kept;
    kept.reserve(sub.triples.size());
    for (const auto& t : sub.triples)
        if (t.source != victim && t.target != victim) kept.push_back(t);
    Subgraph out = Subgraph::from_triples(std::move(kept), sub.origin_graph_id, sub.id);
    return out;
}

Subgraph without_triple(const Subgraph& sub, const Triple& victim) {
    std::vector<Triple> kept;
    kept.reserve(sub.triples.size() - 1);
    for (const auto& t : sub.triples)
        if (t != victim) kept.push_back(t);
    return Subgraph::from_triples(std::move(kept), sub.origin_graph_id, sub.id);
}

bool satisfies_invariants(const Subgraph& sub) {
    if (sub.nodes.size() < 2) return false;
    return !sub.has_isolated_node() && sub.connected();
}

nlohmann::json node_json(const Node& n) {
    return {{"name", n.name}, {"type", n.type_label}};
}

Node node_from_json(const nlohmann::json& j) {
    return Node{j.at("name").get<std::string>(), j.value("type", "")};
}

nlohmann::json triple_json(const Triple& t) {
    return {{"source", node_json(t.source)},
            {"relation", t.relation},
            {"target", node_json(t.target)}};
}

Triple triple_from_json(const nlohmann::json& j) {
    return Triple{node_from_json(j.at("source")), j.at("relation").get<std::string>(),
                  node_from_json(j.at("target"))};
}

}  // namespace

std::string to_string(PerturbationKind kind) {
    switch (kind) {
        case PerturbationKind::NodeRemoval: return "node-removal";
        case PerturbationKind::NodeReplacement: return "node-replacement";
        case PerturbationKind::EdgeRemoval: return "edge-removal";
        case PerturbationKind::EdgeReplacement: return "edge-replacement";
    }
    throw Error("unknown perturbation kind");
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
    // Tolerate underscore/space spellings and the "deletion" synonym that
    // external exports use.
    std::string dashed;
    for (char c : s)
        dashed += c == '_' || c == ' ' ? '-' : static_cast<char>(std::tolower(
                                                   static_cast<unsigned char>(c)));
    for (auto kind : kAllPerturbationKinds)
        if (to_string(kind) == dashed) return kind;
    if (dashed == "node-deletion") return PerturbationKind::NodeRemoval;
    if (dashed == "edge-deletion") return PerturbationKind::EdgeRemoval;
    throw ParseError("unknown perturbation kind: \"" + s + "\"");
}

void PerturbationRecord::check_shape() const {
    auto expect = [this](bool node_rm, bool node_rp, bool edge_rm, bool edge_rp) {
        if (removed_node.has_value() != node_rm || replaced_node.has_value() != node_rp ||
            removed_triple.has_value() != edge_rm || replaced_relation.has_value() != edge_rp)
            throw Error("perturbation record: detail fields do not match kind " +
                        to_string(kind));
    };
    switch (kind) {
        case PerturbationKind::NodeRemoval: expect(true, false, false, false); break;
        case PerturbationKind::NodeReplacement: expect(false, true, false, false); break;
        case PerturbationKind::EdgeRemoval: expect(false, false, true, false); break;
        case PerturbationKind::EdgeReplacement: expect(false, false, false, true); break;
    }
}

std::string PerturbationRecord::to_json() const {
    check_shape();
    nlohmann::json j{{"kind", to_string(kind)}};
    if (removed_node) j["removed_node"] = node_json(*removed_node);
    if (replaced_node)
        j["replaced_node"] = {{"old", node_json(replaced_node->first)},
                              {"new", node_json(replaced_node->second)}};
    if (removed_triple) j["removed_triple"] = triple_json(*removed_triple);
    if (replaced_relation)
        j["replaced_relation"] = {{"triple", triple_json(replaced_relation->triple)},
                                  {"old", replaced_relation->old_relation},
                                  {"new", replaced_relation->new_relation}};
    return j.dump();
}

PerturbationRecord PerturbationRecord::from_json(const std::string& line, long line_no) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad record: ") + e.what(), line_no);
    }
    PerturbationRecord rec;
    rec.kind = perturbation_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("removed_node")) rec.removed_node = node_from_json(j["removed_node"]);
    if (j.contains("replaced_node"))
        rec.replaced_node = {node_from_json(j["replaced_node"]["old"]),
                             node_from_json(j["replaced_node"]["new"])};
    if (j.contains("removed_triple")) rec.removed_triple = triple_from_json(j["removed_triple"]);
    if (j.contains("replaced_relation"))
        rec.replaced_relation = RelationChange{
            triple_from_json(j["replaced_relation"]["triple"]),
            j["replaced_relation"]["old"].get<std::string>(),
            j["replaced_relation"]["new"].get<std::string>()};
    rec.check_shape();
    return rec;
}

int sample_perturbation_count(int n_nodes, Rng& rng) {
    if (n_nodes < 2) throw Error("sample_perturbation_count: need >= 2 nodes");
    int upper = std::max(1, static_cast<int>(0.7 * n_nodes));
    return static_cast<int>(rng.next_in(1, upper));
}

std::pair<Subgraph, PerturbationRecord> remove_node(const Subgraph& sub, Rng& rng) {
    std::vector<size_t> eligible;
    for (size_t i = 0; i < sub.nodes.size(); ++i) {
        Subgraph candidate = without_node(sub, sub.nodes[i]);
        if (candidate.nodes.size() == sub.nodes.size() - 1 && satisfies_invariants(candidate))
            eligible.push_back(i);
    }
    if (eligible.empty()) throw InfeasibleError("no removable node");
    const Node& victim = sub.nodes[eligible[rng.next_below(eligible.size())]];
    PerturbationRecord rec;
    rec.kind = PerturbationKind::NodeRemoval;
    rec.removed_node = victim;
    return {without_node(sub, victim), rec};
}

std::pair<Subgraph, PerturbationRecord> replace_node(const Subgraph& sub,
                                                     const KnowledgeGraph& kg, Rng& rng) {
    // Candidates for a node: same-type KG nodes outside the subgraph.
    auto candidates_for = [&](const Node& n) {
        std::vector<Node> out;
        for (auto id : kg.nodes_of_type(n.type_label)) {
            const Node& cand = kg.node(id);
            if (!sub.contains(cand)) out.push_back(cand);
        }
        return out;
    };

    std::vector<size_t> replaceable;
    for (size_t i = 0; i < sub.nodes.size(); ++i)
        if (!candidates_for(sub.nodes[i]).empty()) replaceable.push_back(i);
    if (replaceable.empty())
        throw InfeasibleError("no node has a same-type replacement candidate");

    const Node& old_node = sub.nodes[replaceable[rng.next_below(replaceable.size())]];
    auto candidates = candidates_for(old_node);
    const Node& new_node = candidates[rng.next_below(candidates.size())];

    std::vector<Triple> rewritten;
    rewritten.reserve(sub.triples.size());
    for (Triple t : sub.triples) {
        if (t.source == old_node) t.source = new_node;
        if (t.target == old_node) t.target = new_node;
        rewritten.push_back(std::move(t));
    }
    Subgraph out = Subgraph::from_triples(std::move(rewritten), sub.origin_graph_id, sub.id);
    PerturbationRecord rec;
    rec.kind = PerturbationKind::NodeReplacement;
    rec.replaced_node = std::make_pair(old_node, new_node);
    return {out, rec};
}

std::pair<Subgraph, PerturbationRecord> remove_edge(const Subgraph& sub, Rng& rng) {
    std::vector<size_t> eligible;
    for (size_t i = 0; i < sub.triples.size(); ++i) {
        const Triple& t = sub.triples[i];
        if (sub.degree(t.source) < 2 || sub.degree(t.target) < 2) continue;
        Subgraph candidate = without_triple(sub, t);
        if (candidate.nodes.size() == sub.nodes.size() && satisfies_invariants(candidate))
            eligible.push_back(i);
    }
    if (eligible.empty()) throw InfeasibleError("no removable edge");
    const Triple& victim = sub.triples[eligible[rng.next_below(eligible.size())]];
    PerturbationRecord rec;
    rec.kind = PerturbationKind::EdgeRemoval;
    rec.removed_triple = victim;
    return {without_triple(sub, victim), rec};
}

std::pair<Subgraph, PerturbationRecord> replace_edge(const Subgraph& sub,
                                                     const EdgeReplacementMap& map, Rng& rng) {
    // A (triple, replacement) move is eligible when the relation is mapped
    // and the rewritten triple would not collide with an existing one.
    struct Move {
        size_t triple_idx;
        std::vector<std::string> replacements;
    };
    std::vector<Move> moves;
    for (size_t i = 0; i < sub.triples.size(); ++i) {
        const auto* values = map.lookup(sub.triples[i].relation);
        if (!values) continue;
        std::vector<std::string> usable;
        for (const auto& repl : *values) {
            Triple rewritten = sub.triples[i];
            rewritten.relation = repl;
            if (!sub.contains(rewritten)) usable.push_back(repl);
        }
        if (!usable.empty()) moves.push_back({i, std::move(usable)});
    }
    if (moves.empty()) throw InfeasibleError("no mapped relation present");

    const Move& move = moves[rng.next_below(moves.size())];
    const Triple& old_triple = sub.triples[move.triple_idx];
    const std::string& new_relation =
        move.replacements[rng.next_below(move.replacements.size())];

    std::vector<Triple> rewritten = sub.triples;
    rewritten[move.triple_idx].relation = new_relation;
    Subgraph out = Subgraph::from_triples(std::move(rewritten), sub.origin_graph_id, sub.id);
    PerturbationRecord rec;
    rec.kind = PerturbationKind::EdgeReplacement;
    rec.replaced_relation =
        PerturbationRecord::RelationChange{old_triple, old_triple.relation, new_relation};
    return {out, rec};
}

Subgraph densify(const Subgraph& sub, const KnowledgeGraph& kg) {
    std::vector<Triple> triples = sub.triples;
    for (size_t i = 0; i < kg.triple_count(); ++i) {
        Triple t = kg.triple(i);
        if (sub.contains(t.source) && sub.contains(t.target)) triples.push_back(std::move(t));
    }
    return Subgraph::from_triples(std::move(triples), sub.origin_graph_id, sub.id);
}

std::pair<Subgraph, std::vector<PerturbationRecord>> perturb(const Subgraph& sub,
                                                             const KnowledgeGraph& kg,
                                                             PerturbationKind kind,
                                                             const EdgeReplacementMap& map,
                                                             Rng& rng) {
    sub.check_invariants();
    int k = sample_perturbation_count(static_cast<int>(sub.nodes.size()), rng);

    Subgraph current = sub;
    std::vector<PerturbationRecord> records;
    for (int step = 0; step < k; ++step) {
        try {
            std::pair<Subgraph, PerturbationRecord> next = [&] {
                switch (kind) {
                    case PerturbationKind::NodeRemoval: return remove_node(current, rng);
                    case PerturbationKind::NodeReplacement: return replace_node(current, kg, rng);
                    case PerturbationKind::EdgeRemoval: return remove_edge(current, rng);
                    case PerturbationKind::EdgeReplacement: return replace_edge(current, map, rng);
                }
                throw Error("unknown perturbation kind");
            }();
            current = std::move(next.first);
            records.push_back(std::move(next.second));
        } catch (const InfeasibleError&) {
            break;  // eligibility exhausted mid-sequence
        }
    }
    if (records.empty()) throw InfeasibleError("perturbation infeasible");
    // A replacement chain can cancel itself out (A->B then B->A); callers
    // treat that like any other infeasible draw and move on.
    if (current == sub) throw InfeasibleError("perturbation cancelled itself out");
    return {std::move(current), std::move(records)};
}

Subgraph replay(const Subgraph& original, const std::vector<PerturbationRecord>& records) {
    Subgraph current = original;
    for (const auto& rec : records) {
        rec.check_shape();
        switch (rec.kind) {
            case PerturbationKind::NodeRemoval:
                current = without_node(current, *rec.removed_node);
                break;
            case PerturbationKind::NodeReplacement: {
                const auto& [old_node, new_node] = *rec.replaced_node;
                std::vector<Triple> rewritten;
                for (Triple t : current.triples) {
                    if (t.source == old_node) t.source = new_node;
                    if (t.target == old_node) t.target = new_node;
                    rewritten.push_back(std::move(t));
                }
                current = Subgraph::from_triples(std::move(rewritten), current.origin_graph_id,
                                                 current.id);
                break;
            }
            case PerturbationKind::EdgeRemoval:
                current = without_triple(current, *rec.removed_triple);
                break;
            case PerturbationKind::EdgeReplacement: {
                std::vector<Triple> rewritten = current.triples;
                auto it = std::find(rewritten.begin(), rewritten.end(),
                                    rec.replaced_relation->triple);
                if (it == rewritten.end())
                    throw Error("replay: recorded triple not present");
                it->relation = rec.replaced_relation->new_relation;
                current = Subgraph::from_triples(std::move(rewritten), current.origin_graph_id,
                                                 current.id);
                break;
            }
        }
    }
    return current;
}

}  // namespace semkg
