#pragma once

#include <memory>
#include <string>
#include <vector>

#include "semkg/dataset.hpp"
#include "semkg/gateway.hpp"
#include "semkg/kg.hpp"
#include "semkg/perturb.hpp"
#include "semkg/sampler.hpp"

namespace semkg {

struct RunConfig {
    std::string dataset_id;  // which prompt-template set to use
    std::string kg_path;
    TripleFormat kg_format = TripleFormat::TsvTriples;
    std::string edge_map_path;
    std::vector<PerturbationKind> kinds{kAllPerturbationKinds,
                                        kAllPerturbationKinds + 4};
    int samples_per_kind = 10;
    int originals_per_subgraph = 2;
    std::string backend = "template";  // template | replay | api
    std::string model_id;
    std::string replay_dir;  // replay source, or cache dir for the api backend
    std::string templates_dir = "templates";
    std::string out_dir;
    uint64_t seed = 0;
    int min_budget = 5;
    int max_budget = 20;
    double type_decay = 0.5;
    int generation_retry_cap = 5;
    int workers = 0;  // 0 = OpenMP default

    void validate() const;
    std::string canonical() const;
    uint64_t hash() const;
};

struct StageStatus {
    bool done = false;
    size_t count = 0;
};

struct RunManifest {
    uint64_t config_hash = 0;
    StageStatus sample, perturb, generate, validate, assemble;
    size_t sampled = 0;     // subgraph families sampled
    size_t perturbed = 0;   // families with a successful perturbation
    size_t generated = 0;   // statements generated, retries included
    size_t validated = 0;   // statements that passed validation
    size_t assembled = 0;   // pairs written

    void check_invariants() const;  // stage order, funnel monotonicity
    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
    static RunManifest load(const std::string& path);
    void save(const std::string& path) const;
};

std::shared_ptr<ChatBackend> make_chat_backend(const std::string& spec,
                                               const std::string& replay_or_cache_dir);

// Runs sample -> perturb -> generate -> validate -> assemble into the run
// directory (subgraphs/, perturbed/, statements/, outcomes/, pairs/,
// report/). Rerunning with an identical config resumes: completed stages are
// skipped. Any stage ending with zero survivors aborts with a stage-named
// error.
RunManifest run_pipeline(const RunConfig& config);

}  // namespace semkg
