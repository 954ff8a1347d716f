#pragma once

#include "semkg/kg.hpp"
#include "semkg/rng.hpp"

namespace semkg {

struct SamplerConfig {
    int min_budget = 5;   // minimum neighbor-exploration budget
    int max_budget = 20;  // maximum neighbor-exploration budget
    double type_decay = 0.5;
    uint64_t rng_seed = 0;

    void validate() const;
};

// Uniform over nodes with degree >= 1; throws if every node is isolated.
Node pick_seed(const KnowledgeGraph& kg, Rng& rng);

// Budgeted breadth-first sampling. A total exploration budget is drawn
// uniformly from [min_budget, max_budget]; traversal ignores edge direction;
// each candidate neighbor of type t is weighted type_decay^(visits(t)) so
// already-seen types become progressively less likely. Only the tree edges
// discovered by the BFS are retained, so a fresh sample always satisfies
// |triples| = |nodes| - 1.
Subgraph sample_subgraph(const KnowledgeGraph& kg, const SamplerConfig& config, Rng& rng);

}  // namespace semkg
