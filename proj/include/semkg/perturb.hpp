#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semkg/kg.hpp"
#include "semkg/rng.hpp"

namespace semkg {

enum class PerturbationKind {
    NodeRemoval,
    NodeReplacement,
    EdgeRemoval,
    EdgeReplacement,
};

std::string to_string(PerturbationKind kind);
PerturbationKind perturbation_kind_from_string(const std::string& s);
inline constexpr PerturbationKind kAllPerturbationKinds[] = {
    PerturbationKind::NodeRemoval,
    PerturbationKind::NodeReplacement,
    PerturbationKind::EdgeRemoval,
    PerturbationKind::EdgeReplacement,
};

// One applied edit. Exactly the detail fields matching `kind` are set.
struct PerturbationRecord {
    PerturbationKind kind;
    std::optional<Node> removed_node;                      // NodeRemoval
    std::optional<std::pair<Node, Node>> replaced_node;    // NodeReplacement: old -> new
    std::optional<Triple> removed_triple;                  // EdgeRemoval
    struct RelationChange {
        Triple triple;  // the triple before the change
        std::string old_relation;
        std::string new_relation;
    };
    std::optional<RelationChange> replaced_relation;       // EdgeReplacement

    void check_shape() const;  // throws unless fields match kind
    std::string to_json() const;
    static PerturbationRecord from_json(const std::string& line, long line_no = -1);
};

// Uniform over [1, max(1, floor(0.7 * n_nodes))].
int sample_perturbation_count(int n_nodes, Rng& rng);

// Each operator picks uniformly among eligible moves and returns the edited
// copy plus its audit record; InfeasibleError when no move is eligible.
std::pair<Subgraph, PerturbationRecord> remove_node(const Subgraph& sub, Rng& rng);
std::pair<Subgraph, PerturbationRecord> replace_node(const Subgraph& sub,
                                                     const KnowledgeGraph& kg, Rng& rng);
std::pair<Subgraph, PerturbationRecord> remove_edge(const Subgraph& sub, Rng& rng);
std::pair<Subgraph, PerturbationRecord> replace_edge(const Subgraph& sub,
                                                     const EdgeReplacementMap& map, Rng& rng);

// Adds every KG triple whose two endpoints are already in the subgraph.
// Fresh samples are trees, on which edge removal is never eligible; the
// pipeline densifies before running edge-removal perturbations.
Subgraph densify(const Subgraph& sub, const KnowledgeGraph& kg);

// Draws k = sample_perturbation_count(|nodes|) and applies the operator for
// `kind` k times, re-checking eligibility each step. Stops early once
// eligibility runs out after at least one success; throws InfeasibleError if
// no application succeeds at all.
std::pair<Subgraph, std::vector<PerturbationRecord>> perturb(const Subgraph& sub,
                                                             const KnowledgeGraph& kg,
                                                             PerturbationKind kind,
                                                             const EdgeReplacementMap& map,
                                                             Rng& rng);

// Re-applies recorded edits to a copy of `original`; used to audit that the
// record trail reproduces the perturbed subgraph exactly.
Subgraph replay(const Subgraph& original, const std::vector<PerturbationRecord>& records);

}  // namespace semkg
