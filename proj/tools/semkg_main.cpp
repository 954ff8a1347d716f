#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semkg/dataset.hpp"
#include "semkg/eval.hpp"
#include "semkg/kg.hpp"
#include "semkg/normalize.hpp"
#include "semkg/perturb.hpp"
#include "semkg/pipeline.hpp"
#include "semkg/prompts.hpp"
#include "semkg/sampler.hpp"
#include "semkg/text_template.hpp"
#include "semkg/validate.hpp"

namespace fs = std::filesystem;
using namespace semkg;

namespace {

TripleFormat parse_format(const std::string& name) {
    if (name == "tsv" || name == "tsv-triples") return TripleFormat::TsvTriples;
    if (name == "jsonl" || name == "structured-lines") return TripleFormat::StructuredLines;
    throw ConfigError("unknown triple format \"" + name + "\" (tsv|structured-lines)");
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<Subgraph> load_subgraph_dir(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".jsonl") &&
            name.find(".records.") == std::string::npos && name != "index.jsonl")
            paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<Subgraph> subs;
    for (const auto& p : paths) subs.push_back(read_subgraph(p));
    if (subs.empty()) throw IoError("no subgraph files in " + dir);
    return subs;
}

std::shared_ptr<EmbeddingBackend> make_embedding_backend(const std::string& model,
                                                         const std::string& cache_dir) {
    std::shared_ptr<EmbeddingBackend> inner;
    if (model == "hash" || model.empty())
        inner = std::make_shared<HashEmbeddingBackend>();
    else
        inner = std::make_shared<ApiEmbeddingBackend>(model);
    if (cache_dir.empty()) return inner;
    return std::make_shared<CachedEmbeddingBackend>(inner, cache_dir);
}

int cmd_sample(const std::string& kg_path, const std::string& format, int count, uint64_t seed,
               int min_budget, int max_budget, double type_decay, const std::string& out_dir) {
    KnowledgeGraph kg = load_kg(kg_path, parse_format(format));
    if (kg.load_report().duplicates_dropped > 0)
        std::cerr << "load: dropped " << kg.load_report().duplicates_dropped
                  << " duplicate triples\n";
    if (kg.load_report().malformed_dropped > 0)
        std::cerr << "load: dropped " << kg.load_report().malformed_dropped
                  << " malformed triples\n";
    fs::create_directories(out_dir);
    SamplerConfig config{min_budget, max_budget, type_decay, seed};
    for (int i = 0; i < count; ++i) {
        Rng rng = rng_for_item(seed, static_cast<uint64_t>(i));
        Subgraph sub = sample_subgraph(kg, config, rng);
        char name[32];
        std::snprintf(name, sizeof name, "sub_%05d", i);
        sub.id = name;
        write_subgraph(sub, out_dir + "/" + sub.id + ".jsonl");
    }
    std::cout << "sampled " << count << " subgraphs into " << out_dir << "\n";
    return 0;
}

int cmd_perturb(const std::string& subgraph_dir, const std::string& kg_path,
                const std::string& format, const std::string& kind_name,
                const std::string& edge_map_path, uint64_t seed, const std::string& out_dir,
                bool no_densify) {
    KnowledgeGraph kg = load_kg(kg_path, parse_format(format));
    PerturbationKind kind = perturbation_kind_from_string(kind_name);
    EdgeReplacementMap map;
    if (!edge_map_path.empty()) {
        map = load_edge_map(edge_map_path);
        for (const auto& key : map.unknown_keys(kg))
            std::cerr << "edge map: key \"" << key << "\" not in graph relation vocabulary\n";
    } else if (kind == PerturbationKind::EdgeReplacement) {
        throw ConfigError("edge-replacement needs --edge-map");
    }

    fs::create_directories(out_dir);
    size_t done = 0, infeasible = 0, index = 0;
    for (auto& sub : load_subgraph_dir(subgraph_dir)) {
        Rng rng = rng_for_item(seed, index++);
        if (kind == PerturbationKind::EdgeRemoval && !no_densify) {
            std::string id = sub.id;
            sub = densify(sub, kg);
            sub.id = id;
        }
        try {
            auto [perturbed, records] = perturb(sub, kg, kind, map, rng);
            write_subgraph(perturbed, out_dir + "/" + sub.id + ".jsonl");
            std::ofstream log(out_dir + "/" + sub.id + ".records.jsonl");
            for (const auto& rec : records) log << rec.to_json() << "\n";
            ++done;
        } catch (const InfeasibleError& e) {
            std::cerr << sub.id << ": " << e.what() << "\n";
            ++infeasible;
        }
    }
    std::cout << "perturbed " << done << " subgraphs (" << infeasible << " infeasible) into "
              << out_dir << "\n";
    return 0;
}

int cmd_generate(const std::string& subgraph_dir, const std::string& dataset,
                 const std::string& backend_spec, const std::string& replay_dir,
                 const std::string& templates_dir, const std::string& model, int originals,
                 uint64_t /*seed*/, const std::string& out_path) {
    PromptLibrary prompts(templates_dir);
    auto backend = make_chat_backend(backend_spec, replay_dir);
    std::vector<Statement> statements;
    for (const auto& sub : load_subgraph_dir(subgraph_dir)) {
        for (int j = 0; j < originals; ++j) {
            std::string text;
            if (backend_spec == "template") {
                text = template_generate(sub.triples, static_cast<uint64_t>(j));
            } else {
                ChatRequest req = prompts.render_generation_prompt(dataset, sub.triples);
                req.model_id = model;
                text = chat_with_retry(*backend, req, RetryPolicy{});
            }
            statements.push_back(Statement::make(sub.id + ":o" + std::to_string(j), sub.id,
                                                 dataset, std::move(text), false, j,
                                                 std::nullopt));
        }
    }
    write_statements(statements, out_path);
    std::cout << "generated " << statements.size() << " statements into " << out_path << "\n";
    return 0;
}

int cmd_validate(const std::string& statements_path, const std::string& subgraph_dir,
                 const std::string& dataset, const std::string& backend_spec,
                 const std::string& replay_dir, const std::string& templates_dir,
                 const std::string& kg_path, const std::string& format,
                 const std::string& out_path) {
    KnowledgeGraph kg = load_kg(kg_path, parse_format(format));
    PromptLibrary prompts(templates_dir);
    auto backend = make_chat_backend(backend_spec, replay_dir);
    std::vector<std::string> entity_types = kg.entity_type_vocab();
    std::vector<std::string> relations = kg.relation_vocab();

    std::map<std::string, Subgraph> subs;
    for (auto& sub : load_subgraph_dir(subgraph_dir)) subs[sub.id] = std::move(sub);

    std::vector<Statement> statements = read_statements(statements_path);
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    size_t passed = 0;
    std::vector<ValidationOutcome> outcomes;
    for (auto& stmt : statements) {
        auto it = subs.find(stmt.subgraph_id);
        if (it == subs.end())
            throw Error("statement " + stmt.id + " references unknown subgraph " +
                        stmt.subgraph_id);
        ValidationOutcome outcome =
            validate_statement(*backend, prompts, dataset, stmt.text, it->second, entity_types,
                               relations, RetryPolicy{}, stmt.id);
        if (outcome.passed) ++passed;
        out << outcome.to_json() << "\n";
        outcomes.push_back(std::move(outcome));
    }
    std::cout << "validated " << passed << "/" << statements.size() << " statements -> "
              << out_path << "\n";
    std::cout << "reconstruction rate by subgraph size (triples):\n";
    for (const auto& [size, rate] : reconstruction_rate(outcomes))
        std::printf("  %zu: %.3f\n", size, rate);
    return 0;
}

int cmd_assemble(const std::string& statements_path, uint64_t seed, const std::string& out_path) {
    std::vector<Statement> statements = read_statements(statements_path);
    Rng rng(fnv1a64("assemble", seed));
    AssembleResult result = assemble_pairs(statements, rng);
    for (const auto& id : result.skipped_subgraphs)
        std::cerr << "skipping subgraph " << id << " (insufficient validated statements)\n";
    write_pairs(result.pairs, out_path);
    std::cout << "assembled " << result.pairs.size() << " pairs into " << out_path << "\n";
    return 0;
}

int cmd_split(const std::string& pairs_path, double fraction, uint64_t seed,
              const std::string& out_validation, const std::string& out_test) {
    std::vector<StatementPair> pairs = read_pairs(pairs_path);
    SplitResult result = split(pairs, fraction, seed);
    write_pairs(result.validation, out_validation);
    write_pairs(result.test, out_test);
    std::cout << "split " << pairs.size() << " pairs into " << result.validation.size()
              << " validation / " << result.test.size() << " test\n";
    return 0;
}

int cmd_evaluate(const std::string& pairs_path, const std::string& methods_csv, double fraction,
                 uint64_t seed, double alpha, const std::string& out_dir,
                 const std::string& templates_dir, const std::string& replay_dir,
                 const std::vector<std::string>& field_maps, int threads) {
    std::map<std::string, std::string> mapping;
    for (const auto& m : field_maps) {
        size_t eq = m.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--map expects external=ours, got \"" + m + "\"");
        mapping[m.substr(0, eq)] = m.substr(eq + 1);
    }
    std::vector<StatementPair> pairs =
        mapping.empty() ? read_pairs(pairs_path) : read_pairs_mapped(pairs_path, mapping);
    fs::create_directories(out_dir);

    std::shared_ptr<const PromptLibrary> prompts;
    std::vector<EvalRow> all_rows;
    for (const auto& method : split_csv(methods_csv)) {
        std::unique_ptr<Scorer> scorer;
        if (method == "rouge1") scorer = make_rouge_scorer(1);
        else if (method == "rouge2") scorer = make_rouge_scorer(2);
        else if (method == "rougeL") scorer = make_rouge_l_scorer();
        else if (method == "bleu") scorer = make_bleu_scorer();
        else if (method.starts_with("cosine:")) {
            scorer = make_cosine_scorer(
                make_embedding_backend(method.substr(7), out_dir + "/embedding_cache"));
        } else if (method.starts_with("judge:")) {
            if (!prompts) prompts = std::make_shared<const PromptLibrary>(templates_dir);
            std::string spec = method.substr(6);
            std::shared_ptr<ChatBackend> backend;
            if (spec == "template" || spec == "replay") {
                backend = make_chat_backend(spec, replay_dir);
            } else {
                auto api = std::make_shared<ApiChatBackend>();
                backend = replay_dir.empty()
                              ? std::static_pointer_cast<ChatBackend>(api)
                              : std::make_shared<CachingChatBackend>(api, replay_dir);
            }
            scorer = make_judge_scorer(backend, prompts);
        } else {
            throw ConfigError("unknown method \"" + method + "\"");
        }
        std::cerr << "evaluating " << scorer->name() << " on " << pairs.size() << " pairs\n";
        std::vector<EvalRow> rows = evaluate_method(pairs, *scorer, fraction, seed, alpha, threads);
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }
    write_report_rows(all_rows, out_dir + "/rows.jsonl");
    std::string table = stratified_report(all_rows, alpha);
    std::ofstream table_out(out_dir + "/report.txt");
    table_out << table;
    std::cout << table;
    std::cout << "rows written to " << out_dir << "/rows.jsonl\n";
    return 0;
}

// Key=value run configuration; flags given on the command line win.
void apply_run_config_file(const CLI::App& run_cmd, const std::string& path, RunConfig& rc,
                           std::string& format, std::string& kinds) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    auto given = [&](const std::string& flag) { return run_cmd.count(flag) > 0; };
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line.substr(0, line.find('#'));
        size_t begin = trimmed.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ParseError("config: expected key=value", line_no);
        auto strip = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = strip(trimmed.substr(0, eq));
        std::string value = strip(trimmed.substr(eq + 1));

        if (key == "dataset" && !given("--dataset")) rc.dataset_id = value;
        else if (key == "kg" && !given("--kg")) rc.kg_path = value;
        else if (key == "format" && !given("--format")) format = value;
        else if (key == "edge-map" && !given("--edge-map")) rc.edge_map_path = value;
        else if (key == "kinds" && !given("--kinds")) kinds = value;
        else if (key == "samples-per-kind" && !given("--samples-per-kind"))
            rc.samples_per_kind = std::stoi(value);
        else if (key == "originals" && !given("--originals"))
            rc.originals_per_subgraph = std::stoi(value);
        else if (key == "backend" && !given("--backend")) rc.backend = value;
        else if (key == "model" && !given("--model")) rc.model_id = value;
        else if (key == "replay-dir" && !given("--replay-dir")) rc.replay_dir = value;
        else if (key == "templates" && !given("--templates")) rc.templates_dir = value;
        else if (key == "out" && !given("--out")) rc.out_dir = value;
        else if (key == "seed" && !given("--seed")) rc.seed = std::stoull(value);
        else if (key == "min-budget" && !given("--min-budget")) rc.min_budget = std::stoi(value);
        else if (key == "max-budget" && !given("--max-budget")) rc.max_budget = std::stoi(value);
        else if (key == "type-decay" && !given("--type-decay")) rc.type_decay = std::stod(value);
        else if (key == "retry-cap" && !given("--retry-cap"))
            rc.generation_retry_cap = std::stoi(value);
        else if (key == "workers" && !given("--workers")) rc.workers = std::stoi(value);
        else if (run_cmd.count("--" + key) == 0)
            throw ParseError("config: unknown key \"" + key + "\"", line_no);
    }
}

int cmd_report(const std::string& rows_path, double alpha) {
    std::ifstream in(rows_path);
    if (!in) throw IoError("cannot open " + rows_path);
    std::vector<EvalRow> rows;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad row: ") + e.what(), line_no);
        }
        EvalRow r;
        r.method = j.at("method").get<std::string>();
        r.dataset = j.value("dataset", "all");
        r.kind = j.value("kind", "all");
        r.n = j.value("n", 0L);
        r.tp = j.value("tp", 0L);
        r.fp = j.value("fp", 0L);
        r.fn = j.value("fn", 0L);
        r.tn = j.value("tn", 0L);
        r.invalid = j.value("invalid", 0L);
        r.precision = j.value("precision", 0.0);
        r.recall = j.value("recall", 0.0);
        r.f1 = j.value("f1", 0.0);
        r.ci_low = j.value("ci_low", 0.0);
        r.ci_high = j.value("ci_high", 1.0);
        r.threshold = j.value("threshold", 0.5);
        rows.push_back(std::move(r));
    }
    std::cout << stratified_report(rows, alpha);
    return 0;
}

int cmd_stats(const std::string& pairs_path, const std::string& statements_path,
              const std::string& shapes_path, bool print_stopwords) {
    if (print_stopwords) {
        for (const auto& w : stopwords()) std::cout << w << "\n";
        return 0;
    }
    std::vector<Statement> statements;
    std::vector<SubgraphShape> shapes;
    if (!statements_path.empty()) {
        statements = read_statements(statements_path);
    } else if (!pairs_path.empty()) {
        // Rebuild a statement view from a pair file: one entry per distinct
        // statement, perturbed side identified by the pair label.
        std::set<std::string> seen;
        for (const auto& p : read_pairs(pairs_path)) {
            auto add = [&](const std::string& text, bool perturbed) {
                if (!seen.insert(p.subgraph_id + "\x1f" + text).second) return;
                Statement s = Statement::make(
                    p.subgraph_id + ":" + std::to_string(seen.size()), p.subgraph_id,
                    p.dataset_name, text, perturbed, 0,
                    perturbed ? p.perturbation_kind : std::nullopt);
                s.validated = true;
                statements.push_back(std::move(s));
            };
            add(p.statement_1, false);
            add(p.statement_2, p.label == 0);
        }
    } else {
        throw ConfigError("stats: give --pairs or --statements");
    }
    if (!shapes_path.empty()) {
        std::ifstream in(shapes_path);
        if (!in) throw IoError("cannot open " + shapes_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            SubgraphShape sh;
            sh.subgraph_id = j.at("subgraph_id").get<std::string>();
            if (j.contains("kind"))
                sh.kind = perturbation_kind_from_string(j["kind"].get<std::string>());
            sh.original_nodes = j.value("original_nodes", size_t{0});
            sh.original_edges = j.value("original_edges", size_t{0});
            sh.perturbed_nodes = j.value("perturbed_nodes", size_t{0});
            sh.perturbed_edges = j.value("perturbed_edges", size_t{0});
            shapes.push_back(std::move(sh));
        }
    }
    std::cout << render_corpus_stats(corpus_stats(statements, shapes));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semkg: knowledge-graph based semantic-similarity benchmark toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // ---- sample
    auto* sample = app.add_subcommand("sample", "sample subgraphs from a knowledge graph");
    std::string s_kg, s_format = "tsv", s_out;
    int s_count = 10, s_min = 5, s_max = 20;
    double s_decay = 0.5;
    uint64_t s_seed = 0;
    sample->add_option("--kg", s_kg, "triple file")->required();
    sample->add_option("--format", s_format, "tsv|structured-lines");
    sample->add_option("--count", s_count, "number of subgraphs");
    sample->add_option("--seed", s_seed, "rng seed");
    sample->add_option("--min-budget", s_min, "minimum exploration budget");
    sample->add_option("--max-budget", s_max, "maximum exploration budget");
    sample->add_option("--type-decay", s_decay, "type-diversity decay in (0,1]");
    sample->add_option("--out", s_out, "output directory")->required();

    // ---- perturb
    auto* perturb_cmd = app.add_subcommand("perturb", "apply one perturbation kind to subgraphs");
    std::string p_dir, p_kg, p_format = "tsv", p_kind, p_map, p_out;
    uint64_t p_seed = 0;
    bool p_no_densify = false;
    perturb_cmd->add_option("--subgraphs", p_dir, "subgraph directory")->required();
    perturb_cmd->add_option("--kg", p_kg, "triple file")->required();
    perturb_cmd->add_option("--format", p_format, "tsv|structured-lines");
    perturb_cmd->add_option("--kind", p_kind,
                            "node-removal|node-replacement|edge-removal|edge-replacement")
        ->required();
    perturb_cmd->add_option("--edge-map", p_map, "edge replacement map (JSON)");
    perturb_cmd->add_option("--seed", p_seed, "rng seed");
    perturb_cmd->add_option("--out", p_out, "output directory")->required();
    perturb_cmd->add_flag("--no-densify", p_no_densify,
                          "skip closure-edge densification before edge removal");

    // ---- generate
    auto* gen = app.add_subcommand("generate", "verbalize subgraphs into statements");
    std::string g_dir, g_dataset, g_backend = "template", g_replay, g_templates = "templates",
                g_model, g_out;
    int g_originals = 2;
    uint64_t g_seed = 0;
    gen->add_option("--subgraphs", g_dir, "subgraph directory")->required();
    gen->add_option("--dataset", g_dataset, "prompt template set")->required();
    gen->add_option("--backend", g_backend, "template|replay|api");
    gen->add_option("--replay-dir", g_replay, "replay source / api cache directory");
    gen->add_option("--templates", g_templates, "templates directory");
    gen->add_option("--model", g_model, "model id for the api backend");
    gen->add_option("--originals", g_originals, "original statements per subgraph");
    gen->add_option("--seed", g_seed, "rng seed");
    gen->add_option("--out", g_out, "output statements file")->required();

    // ---- validate
    auto* val = app.add_subcommand("validate", "reconstruction-validate statements");
    std::string v_statements, v_dir, v_dataset, v_backend = "template", v_replay,
                v_templates = "templates", v_kg, v_format = "tsv", v_out;
    val->add_option("--statements", v_statements, "statements file")->required();
    val->add_option("--subgraphs", v_dir, "subgraph directory")->required();
    val->add_option("--dataset", v_dataset, "prompt template set")->required();
    val->add_option("--backend", v_backend, "template|replay|api");
    val->add_option("--replay-dir", v_replay, "replay source / api cache directory");
    val->add_option("--templates", v_templates, "templates directory");
    val->add_option("--kg", v_kg, "full KG (entity-type and relation vocabularies)")->required();
    val->add_option("--format", v_format, "tsv|structured-lines");
    val->add_option("--out", v_out, "output outcomes file")->required();

    // ---- assemble
    auto* asm_cmd = app.add_subcommand("assemble", "build labeled statement pairs");
    std::string a_statements, a_out;
    uint64_t a_seed = 0;
    asm_cmd->add_option("--statements", a_statements, "statements file")->required();
    asm_cmd->add_option("--seed", a_seed, "rng seed");
    asm_cmd->add_option("--out", a_out, "output pairs file")->required();

    // ---- split
    auto* split_cmd = app.add_subcommand("split", "stratified validation/test split");
    std::string sp_pairs, sp_val, sp_test;
    double sp_fraction = 0.5;
    uint64_t sp_seed = 0;
    split_cmd->add_option("--pairs", sp_pairs, "pairs file")->required();
    split_cmd->add_option("--fraction", sp_fraction, "validation fraction in (0,1)");
    split_cmd->add_option("--seed", sp_seed, "rng seed");
    split_cmd->add_option("--out-validation", sp_val, "validation output")->required();
    split_cmd->add_option("--out-test", sp_test, "test output")->required();

    // ---- evaluate
    auto* ev = app.add_subcommand("evaluate", "run semantic-similarity methods on pairs");
    std::string e_pairs, e_methods = "rouge1,rouge2,rougeL,bleu", e_out = "report",
                e_templates = "templates", e_replay;
    double e_fraction = 0.5, e_alpha = 0.05;
    uint64_t e_seed = 0;
    int e_threads = 0;
    std::vector<std::string> e_maps;
    ev->add_option("--pairs", e_pairs, "pairs file")->required();
    ev->add_option("--methods", e_methods,
                   "comma list: rouge1,rouge2,rougeL,bleu,cosine:<model>,judge:<model>");
    ev->add_option("--fraction", e_fraction, "validation fraction");
    ev->add_option("--seed", e_seed, "split seed");
    ev->add_option("--alpha", e_alpha, "CI significance level");
    ev->add_option("--out", e_out, "report directory");
    ev->add_option("--templates", e_templates, "templates directory (judge prompt)");
    ev->add_option("--replay-dir", e_replay, "replay source / api cache directory");
    ev->add_option("--map", e_maps, "field mapping external=ours (repeatable)");
    ev->add_option("--threads", e_threads, "scoring threads (0 = default)");

    // ---- report
    auto* rep = app.add_subcommand("report", "render a report from exported rows");
    std::string r_rows;
    double r_alpha = 0.05;
    rep->add_option("--rows", r_rows, "rows.jsonl from evaluate")->required();
    rep->add_option("--alpha", r_alpha, "CI significance level");

    // ---- stats
    auto* st = app.add_subcommand("stats", "corpus statistics summary");
    std::string st_pairs, st_statements, st_shapes;
    bool st_stopwords = false;
    st->add_option("--pairs", st_pairs, "pairs file");
    st->add_option("--statements", st_statements, "statements file");
    st->add_option("--shapes", st_shapes, "subgraph shapes file");
    st->add_flag("--print-stopwords", st_stopwords, "print the embedded stopword list");

    // ---- run (full pipeline)
    auto* run = app.add_subcommand("run", "run the full pipeline");
    std::string run_config_path;
    run->add_option("--config", run_config_path,
                    "key=value config file; explicit flags take precedence");
    RunConfig rc;
    std::string run_format = "tsv", run_kinds = "";
    run->add_option("--dataset", rc.dataset_id, "prompt template set");
    run->add_option("--kg", rc.kg_path, "triple file");
    run->add_option("--format", run_format, "tsv|structured-lines");
    run->add_option("--edge-map", rc.edge_map_path, "edge replacement map");
    run->add_option("--kinds", run_kinds, "comma list of perturbation kinds (default all)");
    run->add_option("--samples-per-kind", rc.samples_per_kind, "subgraphs per kind");
    run->add_option("--originals", rc.originals_per_subgraph, "originals per subgraph (>=2)");
    run->add_option("--backend", rc.backend, "template|replay|api");
    run->add_option("--model", rc.model_id, "model id for the api backend");
    run->add_option("--replay-dir", rc.replay_dir, "replay source / api cache directory");
    run->add_option("--templates", rc.templates_dir, "templates directory");
    run->add_option("--out", rc.out_dir, "run directory");
    run->add_option("--seed", rc.seed, "rng seed");
    run->add_option("--min-budget", rc.min_budget, "sampler min budget");
    run->add_option("--max-budget", rc.max_budget, "sampler max budget");
    run->add_option("--type-decay", rc.type_decay, "sampler type decay");
    run->add_option("--retry-cap", rc.generation_retry_cap, "generation retries per statement");
    run->add_option("--workers", rc.workers, "stage parallelism (0 = default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed())
            return cmd_sample(s_kg, s_format, s_count, s_seed, s_min, s_max, s_decay, s_out);
        if (perturb_cmd->parsed())
            return cmd_perturb(p_dir, p_kg, p_format, p_kind, p_map, p_seed, p_out, p_no_densify);
        if (gen->parsed())
            return cmd_generate(g_dir, g_dataset, g_backend, g_replay, g_templates, g_model,
                                g_originals, g_seed, g_out);
        if (val->parsed())
            return cmd_validate(v_statements, v_dir, v_dataset, v_backend, v_replay, v_templates,
                                v_kg, v_format, v_out);
        if (asm_cmd->parsed()) return cmd_assemble(a_statements, a_seed, a_out);
        if (split_cmd->parsed()) return cmd_split(sp_pairs, sp_fraction, sp_seed, sp_val, sp_test);
        if (ev->parsed())
            return cmd_evaluate(e_pairs, e_methods, e_fraction, e_seed, e_alpha, e_out,
                                e_templates, e_replay, e_maps, e_threads);
        if (rep->parsed()) return cmd_report(r_rows, r_alpha);
        if (st->parsed()) return cmd_stats(st_pairs, st_statements, st_shapes, st_stopwords);
        if (run->parsed()) {
            if (!run_config_path.empty())
                apply_run_config_file(*run, run_config_path, rc, run_format, run_kinds);
            rc.kg_format = parse_format(run_format);
            if (!run_kinds.empty()) {
                rc.kinds.clear();
                for (const auto& k : split_csv(run_kinds))
                    rc.kinds.push_back(perturbation_kind_from_string(k));
            }
            RunManifest manifest = run_pipeline(rc);
            std::cout << manifest.to_json() << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 5;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 6;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
