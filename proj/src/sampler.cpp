#include "semkg/sampler.hpp"

#include <deque>
#include <map>

namespace semkg {

void SamplerConfig::validate() const {
    if (min_budget < 1 || min_budget > max_budget)
        throw ConfigError("sampler: need 1 <= min_budget <= max_budget");
    if (!(type_decay > 0.0 && type_decay <= 1.0))
        throw ConfigError("sampler: type_decay must be in (0, 1]");
}

Node pick_seed(const KnowledgeGraph& kg, Rng& rng) {
    if (kg.node_count() == 0) throw Error("pick_seed: empty graph");
    std::vector<KnowledgeGraph::NodeId> eligible;
    eligible.reserve(kg.node_count());
    for (KnowledgeGraph::NodeId i = 0; i < kg.node_count(); ++i)
        if (kg.degree(i) >= 1) eligible.push_back(i);
    if (eligible.empty()) throw Error("pick_seed: all nodes isolated");
    return kg.node(eligible[rng.next_below(eligible.size())]);
}

Subgraph sample_subgraph(const KnowledgeGraph& kg, const SamplerConfig& config, Rng& rng) {
    config.validate();
    if (kg.node_count() < 2 || kg.triple_count() < 1)
        throw Error("sample_subgraph: graph needs >= 2 nodes and >= 1 triple");

    constexpr int kMaxReseeds = 32;
    for (int attempt = 0; attempt < kMaxReseeds; ++attempt) {
        Node seed = pick_seed(kg, rng);
        auto seed_id = kg.find_node(seed);
        if (!seed_id || kg.incident(*seed_id).empty()) continue;

        int budget = static_cast<int>(rng.next_in(config.min_budget, config.max_budget));

        std::vector<bool> visited(kg.node_count(), false);
        std::map<std::string, int> type_visits;  // per-subgraph; resets each sample
        std::vector<Triple> tree_triples;
        std::deque<KnowledgeGraph::NodeId> frontier;

        visited[*seed_id] = true;
        ++type_visits[kg.node(*seed_id).type_label];
        frontier.push_back(*seed_id);

        while (!frontier.empty() && budget > 0) {
            KnowledgeGraph::NodeId u = frontier.front();
            frontier.pop_front();

            // Unvisited neighbors of u, with the original directed triple
            // that would connect them into the tree. Parallel edges give a
            // neighbor several entries, matching its multiplicity in the KG.
            std::vector<std::pair<KnowledgeGraph::NodeId, uint32_t>> candidates;
            for (uint32_t ti : kg.incident(u)) {
                const auto& ids = kg.triple_ids(ti);
                KnowledgeGraph::NodeId v = ids.source == u ? ids.target : ids.source;
                if (!visited[v]) candidates.emplace_back(v, ti);
            }

            while (budget > 0 && !candidates.empty()) {
                std::vector<double> weights(candidates.size());
                for (size_t i = 0; i < candidates.size(); ++i) {
                    const std::string& type = kg.node(candidates[i].first).type_label;
                    auto it = type_visits.find(type);
                    int visits = it == type_visits.end() ? 0 : it->second;
                    double w = 1.0;
                    for (int k = 0; k < visits; ++k) w *= config.type_decay;
                    weights[i] = w;
                }
                size_t pick = rng.next_weighted(weights);
                auto [v, ti] = candidates[pick];

                visited[v] = true;
                ++type_visits[kg.node(v).type_label];
                tree_triples.push_back(kg.triple(ti));
                frontier.push_back(v);
                --budget;

                // Drop every candidate entry that led to v; the rest stay.
                std::erase_if(candidates, [v](const auto& c) { return c.first == v; });
            }
        }

        if (tree_triples.empty()) continue;  // seed turned out to be a dead end
        Subgraph sub = Subgraph::from_triples(std::move(tree_triples), kg.id());
        sub.check_invariants();
        return sub;
    }
    throw Error("sample_subgraph: graph too sparse");
}

}  // namespace semkg
