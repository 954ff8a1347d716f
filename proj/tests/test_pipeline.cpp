#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "semkg/dataset.hpp"
#include "semkg/pipeline.hpp"

using namespace semkg;
namespace fs = std::filesystem;

namespace {

const std::string kTemplates = SEMKG_TEMPLATES_DIR;
const std::string kData = SEMKG_DATA_DIR;

RunConfig toy_config(const std::string& out_dir, uint64_t seed = 42, int samples_per_kind = 5) {
    RunConfig config;
    config.dataset_id = "toy";
    config.kg_path = kData + "/toy/toy_kg.tsv";
    config.kg_format = TripleFormat::TsvTriples;
    config.edge_map_path = kData + "/toy/edge_map.json";
    config.samples_per_kind = samples_per_kind;
    config.originals_per_subgraph = 2;
    config.backend = "template";
    config.templates_dir = kTemplates;
    config.out_dir = out_dir;
    config.seed = seed;
    return config;
}

std::string fresh_dir(const std::string& name) {
    auto path = fs::temp_directory_path() / name;
    fs::remove_all(path);
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("template-backend pipeline run produces a balanced pair set") {
    std::string dir = fresh_dir("semkg_run_balanced");
    RunManifest manifest = run_pipeline(toy_config(dir));

    CHECK(manifest.sampled == 20);
    CHECK(manifest.perturbed <= manifest.sampled);
    CHECK(manifest.perturbed >= 1);
    // template statements always validate, so no retries happen offline
    CHECK(manifest.validated == manifest.generated);
    CHECK(manifest.assembled == 2 * manifest.perturbed);

    std::vector<StatementPair> pairs = read_pairs(dir + "/pairs/pairs.jsonl");
    REQUIRE(pairs.size() == manifest.assembled);
    long positives = 0;
    std::map<std::string, std::set<int>> labels_by_subgraph;
    for (const auto& p : pairs) {
        positives += p.label;
        labels_by_subgraph[p.subgraph_id].insert(p.label);
    }
    CHECK(positives * 2 == static_cast<long>(pairs.size()));
    for (const auto& [sub, labels] : labels_by_subgraph)
        CHECK(labels == std::set<int>{0, 1});

    // negatives trace back to the same subgraph lineage
    for (const auto& p : pairs)
        if (p.label == 0) CHECK(p.perturbation_kind.has_value());

    fs::remove_all(dir);
}

TEST_CASE("pipeline reruns byte-identically and resumes") {
    std::string dir_a = fresh_dir("semkg_run_a");
    std::string dir_b = fresh_dir("semkg_run_b");
    RunManifest first = run_pipeline(toy_config(dir_a));
    run_pipeline(toy_config(dir_b));

    CHECK(slurp(dir_a + "/pairs/pairs.jsonl") == slurp(dir_b + "/pairs/pairs.jsonl"));
    CHECK(slurp(dir_a + "/manifest.json") == slurp(dir_b + "/manifest.json"));

    // resuming a completed run changes nothing
    std::string manifest_before = slurp(dir_a + "/manifest.json");
    RunManifest resumed = run_pipeline(toy_config(dir_a));
    CHECK(slurp(dir_a + "/manifest.json") == manifest_before);
    CHECK(resumed.assembled == first.assembled);

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("different seeds give different datasets") {
    std::string dir_a = fresh_dir("semkg_seed_a");
    std::string dir_b = fresh_dir("semkg_seed_b");
    run_pipeline(toy_config(dir_a, 1));
    run_pipeline(toy_config(dir_b, 2));
    CHECK(slurp(dir_a + "/pairs/pairs.jsonl") != slurp(dir_b + "/pairs/pairs.jsonl"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("config validation") {
    RunConfig config = toy_config("/tmp/never_used");
    config.originals_per_subgraph = 1;
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config = toy_config("/tmp/never_used");
    config.samples_per_kind = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config = toy_config("/tmp/never_used");
    config.edge_map_path = "";
    CHECK_THROWS_AS(config.validate(), ConfigError);  // edge-replacement without a map

    config = toy_config("/tmp/never_used");
    config.kinds = {PerturbationKind::NodeRemoval};
    config.edge_map_path = "";
    CHECK_NOTHROW(config.validate());

    config = toy_config("/tmp/never_used");
    config.backend = "imaginary";
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
    RunConfig a = toy_config("/tmp/x");
    RunConfig b = toy_config("/tmp/y");  // out_dir not part of the hash
    CHECK(a.hash() == b.hash());
    b.seed = 43;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("manifest invariants reject out-of-order stages and bad funnels") {
    RunManifest m;
    m.sample = {true, 10};
    m.perturb = {true, 9};
    m.generate = {true, 27};
    m.validate = {true, 27};
    m.assemble = {true, 18};
    m.generated = 27;
    m.validated = 27;
    CHECK_NOTHROW(m.check_invariants());

    RunManifest out_of_order;
    out_of_order.perturb = {true, 5};  // sample not done
    CHECK_THROWS_AS(out_of_order.check_invariants(), Error);

    RunManifest bad_funnel = m;
    bad_funnel.validated = 30;
    CHECK_THROWS_AS(bad_funnel.check_invariants(), Error);
}

TEST_CASE("manifest serializes and restores") {
    RunManifest m;
    m.config_hash = 12345;
    m.sample = {true, 20};
    m.sampled = 20;
    RunManifest back = RunManifest::from_json(m.to_json());
    CHECK(back.config_hash == 12345);
    CHECK(back.sample.done);
    CHECK(back.sample.count == 20);
    CHECK(back.sampled == 20);
}

TEST_CASE("unknown chat backend specs are rejected") {
    CHECK_THROWS_AS(make_chat_backend("imaginary", ""), ConfigError);
    CHECK(make_chat_backend("template", "")->name() == "template");
}

TEST_CASE("pipeline statements file records the funnel") {
    std::string dir = fresh_dir("semkg_run_funnel");
    RunManifest manifest = run_pipeline(toy_config(dir, 7));
    std::vector<Statement> statements = read_statements(dir + "/statements/statements.jsonl");
    size_t validated = 0;
    for (const auto& s : statements) validated += s.validated ? 1 : 0;
    CHECK(validated == manifest.validated);
    CHECK(statements.size() <= manifest.generated);
    fs::remove_all(dir);
}
