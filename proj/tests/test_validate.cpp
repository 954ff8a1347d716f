#include <doctest.h>

#include "oracles.hpp"
#include "semkg/perturb.hpp"
#include "semkg/sampler.hpp"
#include "semkg/text_template.hpp"
#include "semkg/validate.hpp"

using namespace semkg;
using oracle::n;
using oracle::t;

namespace {

const std::string kTemplates = SEMKG_TEMPLATES_DIR;

struct CannedBackend : ChatBackend {
    std::string entity_reply;
    std::string kg_reply;
    std::string complete(const ChatRequest& req) override {
        const std::string& text = req.messages.back().content;
        if (text.find("'entities'") != std::string::npos) return entity_reply;
        return kg_reply;
    }
    std::string name() const override { return "canned"; }
};

std::vector<std::string> toy_types() { return {"t"}; }
std::vector<std::string> toy_relations() { return {"likes", "knows"}; }

}  // namespace

TEST_CASE("template statements validate against their own subgraph") {
    Subgraph sub = Subgraph::from_triples(
        {t(n("alpha"), "likes", n("beta")), t(n("beta"), "knows", n("gamma"))});
    PromptLibrary prompts(kTemplates);
    TemplateChatBackend backend;
    for (uint64_t variant : {0ULL, 1ULL}) {
        std::string statement = template_generate(sub.triples, variant);
        ValidationOutcome outcome =
            validate_statement(backend, prompts, "toy", statement, sub, toy_types(),
                               toy_relations(), RetryPolicy{}, "s1");
        CHECK(outcome.passed);
        CHECK_FALSE(outcome.parse_failed);
        CHECK(outcome.missing.empty());
        CHECK(outcome.extra.empty());
        CHECK(outcome.subgraph_triple_count == 2);
    }
}

TEST_CASE("perturbed statements fail against the original subgraph with a diff") {
    KnowledgeGraph kg = oracle::random_kg(50, 80, 91);
    SamplerConfig cfg{5, 8, 0.5, 0};
    Rng rng(7);
    Subgraph sub = sample_subgraph(kg, cfg, rng);
    EdgeReplacementMap map;
    auto [perturbed, records] = perturb(sub, kg, PerturbationKind::NodeRemoval, map, rng);

    PromptLibrary prompts(kTemplates);
    TemplateChatBackend backend;
    std::string statement = template_generate(perturbed.triples, 0);
    ValidationOutcome outcome = validate_statement(
        backend, prompts, "toy", statement, sub, kg.entity_type_vocab(), kg.relation_vocab());
    CHECK_FALSE(outcome.passed);
    CHECK_FALSE(outcome.parse_failed);
    CHECK_FALSE(outcome.missing.empty());
}

TEST_CASE("an empty reconstruction reports every original triple as missing") {
    Subgraph sub = Subgraph::from_triples({t(n("alpha"), "likes", n("beta"))});
    CannedBackend backend;
    backend.entity_reply = R"({"entities": ["alpha", "beta"]})";
    backend.kg_reply = R"({"triples": []})";
    PromptLibrary prompts(kTemplates);
    ValidationOutcome outcome = validate_statement(backend, prompts, "toy", "whatever", sub,
                                                   toy_types(), toy_relations());
    CHECK_FALSE(outcome.passed);
    CHECK_FALSE(outcome.parse_failed);
    CHECK(outcome.missing == sub.triples);
    CHECK(outcome.extra.empty());
}

TEST_CASE("unparseable completions set the parse-failure flag, not a mismatch") {
    Subgraph sub = Subgraph::from_triples({t(n("alpha"), "likes", n("beta"))});
    CannedBackend backend;
    backend.entity_reply = "I refuse to answer in JSON";
    backend.kg_reply = "still no";
    PromptLibrary prompts(kTemplates);
    ValidationOutcome outcome = validate_statement(backend, prompts, "toy", "whatever", sub,
                                                   toy_types(), toy_relations());
    CHECK_FALSE(outcome.passed);
    CHECK(outcome.parse_failed);
    CHECK(outcome.missing == sub.triples);
}

TEST_CASE("extra reconstructed triples are reported") {
    Subgraph sub = Subgraph::from_triples({t(n("alpha"), "likes", n("beta"))});
    CannedBackend backend;
    backend.entity_reply = R"({"entities": ["alpha", "beta", "gamma"]})";
    backend.kg_reply =
        R"({"triples": [
            {"source_node": {"name": "alpha"}, "relation": {"name": "likes"}, "target_node": {"name": "beta"}},
            {"source_node": {"name": "alpha"}, "relation": {"name": "likes"}, "target_node": {"name": "gamma"}}]})";
    PromptLibrary prompts(kTemplates);
    ValidationOutcome outcome = validate_statement(backend, prompts, "toy", "whatever", sub,
                                                   toy_types(), toy_relations());
    CHECK_FALSE(outcome.passed);
    CHECK(outcome.missing.empty());
    REQUIRE(outcome.extra.size() == 1);
    CHECK(outcome.extra[0].target.name == "gamma");
}

TEST_CASE("validate_statement requires vocabularies") {
    Subgraph sub = Subgraph::from_triples({t(n("a"), "likes", n("b"))});
    TemplateChatBackend backend;
    PromptLibrary prompts(kTemplates);
    CHECK_THROWS_AS(
        validate_statement(backend, prompts, "toy", "s", sub, {}, toy_relations()),
        ConfigError);
}

TEST_CASE("reconstruction_rate buckets by subgraph size") {
    auto outcome = [](bool passed, size_t size) {
        ValidationOutcome o;
        o.passed = passed;
        o.subgraph_triple_count = size;
        return o;
    };
    SUBCASE("single bucket fraction") {
        std::vector<ValidationOutcome> outcomes;
        for (int i = 0; i < 7; ++i) outcomes.push_back(outcome(true, 4));
        for (int i = 0; i < 3; ++i) outcomes.push_back(outcome(false, 4));
        auto rates = reconstruction_rate(outcomes);
        REQUIRE(rates.size() == 1);
        CHECK(rates[4] == doctest::Approx(0.7));
    }
    SUBCASE("two buckets") {
        std::vector<ValidationOutcome> outcomes{outcome(true, 5), outcome(true, 5),
                                                outcome(true, 5), outcome(true, 5),
                                                outcome(true, 12), outcome(false, 12)};
        auto rates = reconstruction_rate(outcomes);
        CHECK(rates[5] == doctest::Approx(1.0));
        CHECK(rates[12] == doctest::Approx(0.5));
    }
    SUBCASE("all failed") {
        std::vector<ValidationOutcome> outcomes{outcome(false, 3), outcome(false, 9)};
        for (const auto& [size, rate] : reconstruction_rate(outcomes)) CHECK(rate == 0.0);
    }
    SUBCASE("empty input errors") { CHECK_THROWS_AS(reconstruction_rate({}), Error); }
}

TEST_CASE("validation outcomes serialize and restore") {
    ValidationOutcome o;
    o.statement_id = "sub_1:o0";
    o.passed = false;
    o.parse_failed = false;
    o.extracted_entities = {"alpha", "beta"};
    o.missing = {t(n("a", "x"), "likes", n("b", "y"))};
    o.subgraph_triple_count = 3;
    ValidationOutcome back = ValidationOutcome::from_json(o.to_json());
    CHECK(back.statement_id == o.statement_id);
    CHECK(back.passed == o.passed);
    CHECK(back.extracted_entities == o.extracted_entities);
    CHECK(back.missing == o.missing);
    CHECK(back.subgraph_triple_count == 3);
    CHECK_THROWS_AS(ValidationOutcome::from_json("{bad", 4), ParseError);
}
