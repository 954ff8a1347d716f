#include "semkg/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "semkg/prompts.hpp"
#include "semkg/text_template.hpp"
#include "semkg/validate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace semkg {
namespace fs = std::filesystem;

namespace {

constexpr uint64_t kPerturbSalt = 0xa24baed4963ee407ULL;
constexpr uint64_t kAssembleSalt = 0x9fb21c651e98df25ULL;

void atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp);
        out << content;
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string zero_pad(size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05zu", i);
    return buf;
}

template <typename Fn>
void parallel_indexed(size_t count, int workers, Fn&& fn) {
    auto n = static_cast<long>(count);
#ifdef _OPENMP
    if (workers > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
        for (long i = 0; i < n; ++i) fn(static_cast<size_t>(i));
    } else {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) fn(static_cast<size_t>(i));
    }
#else
    (void)workers;
    for (long i = 0; i < n; ++i) fn(static_cast<size_t>(i));
#endif
}

}  // namespace

void RunConfig::validate() const {
    if (dataset_id.empty()) throw ConfigError("config: dataset_id required");
    if (kg_path.empty()) throw ConfigError("config: kg path required");
    if (out_dir.empty()) throw ConfigError("config: output directory required");
    if (kinds.empty()) throw ConfigError("config: at least one perturbation kind");
    if (samples_per_kind < 1) throw ConfigError("config: samples_per_kind must be >= 1");
    if (originals_per_subgraph < 2)
        throw ConfigError("config: originals_per_subgraph must be >= 2");
    if (generation_retry_cap < 0) throw ConfigError("config: retry cap must be >= 0");
    bool needs_map = std::find(kinds.begin(), kinds.end(), PerturbationKind::EdgeReplacement) !=
                     kinds.end();
    if (needs_map && edge_map_path.empty())
        throw ConfigError("config: edge-replacement runs need an edge map");
    if (backend != "template" && backend != "replay" && backend != "api")
        throw ConfigError("config: backend must be template, replay or api");
    if (backend == "replay" && replay_dir.empty())
        throw ConfigError("config: replay backend needs a cache directory");
    SamplerConfig sc{min_budget, max_budget, type_decay, seed};
    sc.validate();
}

std::string RunConfig::canonical() const {
    nlohmann::json kinds_j = nlohmann::json::array();
    for (auto k : kinds) kinds_j.push_back(to_string(k));
    nlohmann::json j{{"dataset_id", dataset_id},
                     {"kg_path", kg_path},
                     {"kg_format", kg_format == TripleFormat::TsvTriples ? "tsv" : "jsonl"},
                     {"edge_map_path", edge_map_path},
                     {"kinds", kinds_j},
                     {"samples_per_kind", samples_per_kind},
                     {"originals_per_subgraph", originals_per_subgraph},
                     {"backend", backend},
                     {"model_id", model_id},
                     {"seed", seed},
                     {"min_budget", min_budget},
                     {"max_budget", max_budget},
                     {"type_decay", type_decay},
                     {"generation_retry_cap", generation_retry_cap}};
    return j.dump();
}

uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

void RunManifest::check_invariants() const {
    const StageStatus* stages[] = {&sample, &perturb, &generate, &validate, &assemble};
    bool prev_done = true;
    for (const auto* s : stages) {
        if (s->done && !prev_done) throw Error("manifest: stages completed out of order");
        prev_done = s->done;
    }
    if (validate.done && validated > generated)
        throw Error("manifest: validated exceeds generated");
}

std::string RunManifest::to_json() const {
    auto stage = [](const StageStatus& s) {
        return nlohmann::json{{"done", s.done}, {"count", s.count}};
    };
    nlohmann::json j{{"config_hash", config_hash},
                     {"stages",
                      {{"sample", stage(sample)},
                       {"perturb", stage(perturb)},
                       {"generate", stage(generate)},
                       {"validate", stage(validate)},
                       {"assemble", stage(assemble)}}},
                     {"counts",
                      {{"sampled", sampled},
                       {"perturbed", perturbed},
                       {"generated", generated},
                       {"validated", validated},
                       {"assembled", assembled}}}};
    return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    RunManifest m;
    m.config_hash = j.value("config_hash", uint64_t{0});
    auto stage = [&](const char* name) {
        StageStatus s;
        if (j.contains("stages") && j["stages"].contains(name)) {
            s.done = j["stages"][name].value("done", false);
            s.count = j["stages"][name].value("count", size_t{0});
        }
        return s;
    };
    m.sample = stage("sample");
    m.perturb = stage("perturb");
    m.generate = stage("generate");
    m.validate = stage("validate");
    m.assemble = stage("assemble");
    if (j.contains("counts")) {
        const auto& c = j["counts"];
        m.sampled = c.value("sampled", size_t{0});
        m.perturbed = c.value("perturbed", size_t{0});
        m.generated = c.value("generated", size_t{0});
        m.validated = c.value("validated", size_t{0});
        m.assembled = c.value("assembled", size_t{0});
    }
    return m;
}

RunManifest RunManifest::load(const std::string& path) {
    return from_json(read_file(path));
}

void RunManifest::save(const std::string& path) const { atomic_write_file(path, to_json()); }

std::shared_ptr<ChatBackend> make_chat_backend(const std::string& spec,
                                               const std::string& replay_or_cache_dir) {
    if (spec == "template") return std::make_shared<TemplateChatBackend>();
    if (spec == "replay") return std::make_shared<ReplayChatBackend>(replay_or_cache_dir);
    if (spec == "api") {
        auto api = std::make_shared<ApiChatBackend>();
        if (!replay_or_cache_dir.empty())
            return std::make_shared<CachingChatBackend>(api, replay_or_cache_dir);
        return api;
    }
    throw ConfigError("unknown backend \"" + spec + "\" (template|replay|api)");
}

namespace {

struct Family {
    size_t index = 0;
    std::string id;
    PerturbationKind kind;
    Subgraph base;       // densified for edge-removal families
    Subgraph perturbed;  // empty until the perturb stage succeeds
    bool survived = false;
};

struct PipelineState {
    RunConfig config;
    KnowledgeGraph kg;
    EdgeReplacementMap edge_map;
    std::vector<Family> families;
    std::vector<Statement> statements;
    std::vector<ValidationOutcome> outcomes;
    RunManifest manifest;
    std::string manifest_path;
};

std::string index_path(const RunConfig& c) { return c.out_dir + "/subgraphs/index.jsonl"; }

void save_index(const PipelineState& st) {
    std::string body;
    for (const auto& f : st.families) {
        nlohmann::json j{{"id", f.id}, {"kind", to_string(f.kind)}, {"survived", f.survived}};
        body += j.dump() + "\n";
    }
    atomic_write_file(index_path(st.config), body);
}

void load_families(PipelineState& st, bool with_perturbed) {
    std::ifstream in(index_path(st.config));
    if (!in) throw IoError("resume: missing " + index_path(st.config));
    st.families.clear();
    std::string line;
    size_t i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        Family f;
        f.index = i++;
        f.id = j.at("id").get<std::string>();
        f.kind = perturbation_kind_from_string(j.at("kind").get<std::string>());
        f.survived = j.value("survived", false);
        f.base = read_subgraph(st.config.out_dir + "/subgraphs/" + f.id + ".jsonl",
                               st.kg.id(), f.id);
        if (with_perturbed && f.survived)
            f.perturbed = read_subgraph(st.config.out_dir + "/perturbed/" + f.id + ".jsonl",
                                        st.kg.id(), f.id);
        st.families.push_back(std::move(f));
    }
}

void stage_sample(PipelineState& st) {
    const RunConfig& c = st.config;
    size_t total = c.kinds.size() * static_cast<size_t>(c.samples_per_kind);
    st.families.assign(total, {});
    SamplerConfig sampler{c.min_budget, c.max_budget, c.type_decay, c.seed};

    std::vector<std::string> errors(total);
    parallel_indexed(total, c.workers, [&](size_t i) {
        try {
            Family& f = st.families[i];
            f.index = i;
            f.id = "sub_" + zero_pad(i);
            f.kind = c.kinds[i / static_cast<size_t>(c.samples_per_kind)];
            Rng rng = rng_for_item(c.seed, i);
            Subgraph sub = sample_subgraph(st.kg, sampler, rng);
            sub.id = f.id;
            // Edge removal is never eligible on a fresh BFS tree; the family
            // base becomes the densified subgraph so the removal is the only
            // difference between the pair's two sides.
            if (f.kind == PerturbationKind::EdgeRemoval) {
                sub = densify(sub, st.kg);
                sub.id = f.id;
            }
            f.base = std::move(sub);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    for (size_t i = 0; i < total; ++i)
        if (!errors[i].empty())
            throw Error("sample stage: " + errors[i]);

    for (const auto& f : st.families)
        write_subgraph(f.base, c.out_dir + "/subgraphs/" + f.id + ".jsonl");
    save_index(st);

    st.manifest.sampled = total;
    st.manifest.sample = {true, total};
    st.manifest.save(st.manifest_path);
}

void stage_perturb(PipelineState& st) {
    const RunConfig& c = st.config;
    std::vector<std::string> errors(st.families.size());
    parallel_indexed(st.families.size(), c.workers, [&](size_t i) {
        Family& f = st.families[i];
        Rng rng = rng_for_item(c.seed ^ kPerturbSalt, i);
        try {
            auto [perturbed, records] = perturb(f.base, st.kg, f.kind, st.edge_map, rng);
            perturbed.id = f.id;
            f.perturbed = std::move(perturbed);
            f.survived = true;
            std::string log;
            for (const auto& rec : records) log += rec.to_json() + "\n";
            atomic_write_file(c.out_dir + "/perturbed/" + f.id + ".records.jsonl", log);
        } catch (const InfeasibleError&) {
            f.survived = false;  // family dropped, not fatal
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw Error("perturb stage (" + st.families[i].id + "): " + errors[i]);

    size_t survivors = 0;
    for (const auto& f : st.families) {
        if (!f.survived) continue;
        write_subgraph(f.perturbed, c.out_dir + "/perturbed/" + f.id + ".jsonl");
        ++survivors;
    }
    save_index(st);
    if (survivors == 0) throw Error("perturb stage: zero families survived perturbation");

    st.manifest.perturbed = survivors;
    st.manifest.perturb = {true, survivors};
    st.manifest.save(st.manifest_path);
}

std::string generate_text(PipelineState& st, ChatBackend& backend, const PromptLibrary& prompts,
                          const Subgraph& sub, uint64_t variant) {
    if (st.config.backend == "template") return template_generate(sub.triples, variant);
    ChatRequest req = prompts.render_generation_prompt(st.config.dataset_id, sub.triples);
    req.model_id = st.config.model_id;
    return chat_with_retry(backend, req, RetryPolicy{});
}

void stage_generate(PipelineState& st, ChatBackend& backend, const PromptLibrary& prompts) {
    const RunConfig& c = st.config;
    auto n_orig = static_cast<size_t>(c.originals_per_subgraph);

    std::vector<std::vector<Statement>> per_family(st.families.size());
    std::vector<std::string> errors(st.families.size());
    parallel_indexed(st.families.size(), c.workers, [&](size_t i) {
        Family& f = st.families[i];
        if (!f.survived) return;
        try {
            for (size_t j = 0; j < n_orig; ++j) {
                std::string text = generate_text(st, backend, prompts, f.base, j);
                per_family[i].push_back(Statement::make(f.id + ":o" + std::to_string(j), f.id,
                                                        c.dataset_id, std::move(text), false,
                                                        static_cast<int>(j), std::nullopt));
            }
            std::string text = generate_text(st, backend, prompts, f.perturbed, 0);
            per_family[i].push_back(Statement::make(f.id + ":p0", f.id, c.dataset_id,
                                                    std::move(text), true, 0, f.kind));
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    for (size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) throw Error("generate stage (" + st.families[i].id + "): " + errors[i]);

    st.statements.clear();
    for (auto& group : per_family)
        for (auto& s : group) st.statements.push_back(std::move(s));
    if (st.statements.empty()) throw Error("generate stage: zero statements generated");
    write_statements(st.statements, c.out_dir + "/statements/statements.jsonl");

    st.manifest.generated = st.statements.size();
    st.manifest.generate = {true, st.statements.size()};
    st.manifest.save(st.manifest_path);
}

void stage_validate(PipelineState& st, ChatBackend& backend, const PromptLibrary& prompts) {
    const RunConfig& c = st.config;
    std::vector<std::string> entity_types = st.kg.entity_type_vocab();
    std::vector<std::string> relations = st.kg.relation_vocab();

    std::map<std::string, const Family*> family_by_id;
    for (const auto& f : st.families) family_by_id[f.id] = &f;

    st.outcomes.assign(st.statements.size(), {});
    std::vector<size_t> retries(st.statements.size(), 0);
    std::vector<std::string> errors(st.statements.size());
    auto n_orig = static_cast<uint64_t>(c.originals_per_subgraph);

    parallel_indexed(st.statements.size(), c.workers, [&](size_t i) {
        try {
            Statement& stmt = st.statements[i];
            const Family* fam = family_by_id.at(stmt.subgraph_id);
            const Subgraph& target = stmt.perturbed ? fam->perturbed : fam->base;

            ValidationOutcome outcome =
                validate_statement(backend, prompts, c.dataset_id, stmt.text, target,
                                   entity_types, relations, RetryPolicy{}, stmt.id);
            // Regenerate failed statements up to the cap, then give up; the
            // family drops out at assembly if too few statements survive.
            for (int attempt = 1; !outcome.passed && attempt <= c.generation_retry_cap;
                 ++attempt) {
                uint64_t variant = stmt.perturbed
                                       ? static_cast<uint64_t>(attempt)
                                       : static_cast<uint64_t>(stmt.original_index) +
                                             n_orig * static_cast<uint64_t>(attempt);
                std::string text;
                try {
                    text = generate_text(st, backend, prompts, target, variant);
                } catch (const Error&) {
                    break;
                }
                ++retries[i];
                outcome = validate_statement(backend, prompts, c.dataset_id, text, target,
                                             entity_types, relations, RetryPolicy{}, stmt.id);
                if (outcome.passed) {
                    stmt.text = text;
                    stmt.word_count = count_words(text);
                }
            }
            stmt.validated = outcome.passed;
            st.outcomes[i] = std::move(outcome);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw Error("validate stage (" + st.statements[i].id + "): " + errors[i]);

    size_t validated = 0, total_retries = 0;
    for (size_t i = 0; i < st.statements.size(); ++i) {
        if (st.statements[i].validated) ++validated;
        total_retries += retries[i];
    }
    if (validated == 0) throw Error("validate stage: zero statements validated");

    write_statements(st.statements, c.out_dir + "/statements/statements.jsonl");
    std::string body;
    for (const auto& o : st.outcomes) body += o.to_json() + "\n";
    atomic_write_file(c.out_dir + "/outcomes/outcomes.jsonl", body);

    st.manifest.generated += total_retries;
    st.manifest.generate.count = st.manifest.generated;
    st.manifest.validated = validated;
    st.manifest.validate = {true, validated};
    st.manifest.save(st.manifest_path);
}

void stage_assemble(PipelineState& st) {
    const RunConfig& c = st.config;
    Rng rng(fnv1a64("assemble", c.seed ^ kAssembleSalt));
    AssembleResult result = assemble_pairs(st.statements, rng);
    for (const auto& id : result.skipped_subgraphs)
        std::cerr << "assemble: skipping subgraph " << id
                  << " (needs >= 2 validated originals and a validated perturbed statement)\n";
    if (result.pairs.empty()) throw Error("assemble stage: zero pairs assembled");
    write_pairs(result.pairs, c.out_dir + "/pairs/pairs.jsonl");

    std::string shapes;
    for (const auto& f : st.families) {
        if (!f.survived) continue;
        nlohmann::json j{{"subgraph_id", f.id},
                         {"kind", to_string(f.kind)},
                         {"original_nodes", f.base.nodes.size()},
                         {"original_edges", f.base.triples.size()},
                         {"perturbed_nodes", f.perturbed.nodes.size()},
                         {"perturbed_edges", f.perturbed.triples.size()}};
        shapes += j.dump() + "\n";
    }
    atomic_write_file(c.out_dir + "/pairs/shapes.jsonl", shapes);

    st.manifest.assembled = result.pairs.size();
    st.manifest.assemble = {true, result.pairs.size()};
    st.manifest.save(st.manifest_path);
}

}  // namespace

RunManifest run_pipeline(const RunConfig& config) {
    config.validate();
    for (const char* sub : {"", "/subgraphs", "/perturbed", "/statements", "/outcomes", "/pairs",
                            "/report"})
        fs::create_directories(config.out_dir + sub);

    PipelineState st;
    st.config = config;
    st.manifest_path = config.out_dir + "/manifest.json";
    st.kg = load_kg(config.kg_path, config.kg_format);
    if (!config.edge_map_path.empty()) {
        st.edge_map = load_edge_map(config.edge_map_path);
        for (const auto& key : st.edge_map.unknown_keys(st.kg))
            std::cerr << "edge map: key \"" << key << "\" not in graph relation vocabulary\n";
    }

    uint64_t config_hash = config.hash();
    if (fs::exists(st.manifest_path)) {
        RunManifest existing = RunManifest::load(st.manifest_path);
        if (existing.config_hash == config_hash) st.manifest = existing;
        // A different config in the same directory starts the run over.
    }
    st.manifest.config_hash = config_hash;

    PromptLibrary prompts(config.templates_dir);
    if (!prompts.has_dataset(config.dataset_id))
        throw ConfigError("no prompt templates for dataset \"" + config.dataset_id + "\"");
    std::shared_ptr<ChatBackend> backend = make_chat_backend(config.backend, config.replay_dir);

    if (!st.manifest.sample.done) {
        stage_sample(st);
    } else {
        load_families(st, st.manifest.perturb.done);
    }
    if (!st.manifest.perturb.done) stage_perturb(st);
    if (!st.manifest.generate.done) {
        stage_generate(st, *backend, prompts);
    } else if (st.statements.empty()) {
        st.statements = read_statements(config.out_dir + "/statements/statements.jsonl");
    }
    if (!st.manifest.validate.done) stage_validate(st, *backend, prompts);
    if (!st.manifest.assemble.done) stage_assemble(st);

    st.manifest.check_invariants();
    st.manifest.save(st.manifest_path);
    return st.manifest;
}

}  // namespace semkg
