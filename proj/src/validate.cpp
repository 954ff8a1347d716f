#include "semkg/validate.hpp"

#include <set>

#include <json.hpp>

namespace semkg {

MatchResult triples_match(const std::vector<Triple>& original,
                          const std::vector<Triple>& reconstructed) {
    std::set<NormalizedTriple> orig_keys, recon_keys;
    for (const auto& t : original) orig_keys.insert(normalize_triple(t));
    for (const auto& t : reconstructed) recon_keys.insert(normalize_triple(t));

    MatchResult result;
    std::set<NormalizedTriple> reported;
    for (const auto& t : original) {
        NormalizedTriple key = normalize_triple(t);
        if (!recon_keys.count(key) && reported.insert(key).second) result.missing.push_back(t);
    }
    reported.clear();
    for (const auto& t : reconstructed) {
        NormalizedTriple key = normalize_triple(t);
        if (!orig_keys.count(key) && reported.insert(key).second) result.extra.push_back(t);
    }
    result.matched = result.missing.empty() && result.extra.empty();
    return result;
}

namespace {

nlohmann::json triple_to_json(const Triple& t) {
    return {{"source", {{"name", t.source.name}, {"type", t.source.type_label}}},
            {"relation", t.relation},
            {"target", {{"name", t.target.name}, {"type", t.target.type_label}}}};
}

Triple triple_from_json(const nlohmann::json& j) {
    return Triple{{j.at("source").at("name").get<std::string>(), j.at("source").value("type", "")},
                  j.at("relation").get<std::string>(),
                  {j.at("target").at("name").get<std::string>(), j.at("target").value("type", "")}};
}

}  // namespace

std::string ValidationOutcome::to_json() const {
    nlohmann::json missing_j = nlohmann::json::array(), extra_j = nlohmann::json::array();
    for (const auto& t : missing) missing_j.push_back(triple_to_json(t));
    for (const auto& t : extra) extra_j.push_back(triple_to_json(t));
    nlohmann::json j{{"statement_id", statement_id},
                     {"passed", passed},
                     {"parse_failed", parse_failed},
                     {"extracted_entities", extracted_entities},
                     {"missing", missing_j},
                     {"extra", extra_j},
                     {"subgraph_triple_count", subgraph_triple_count}};
    return j.dump();
}

ValidationOutcome ValidationOutcome::from_json(const std::string& line, long line_no) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad outcome record: ") + e.what(), line_no);
    }
    ValidationOutcome out;
    out.statement_id = j.value("statement_id", "");
    out.passed = j.at("passed").get<bool>();
    out.parse_failed = j.value("parse_failed", false);
    out.extracted_entities = j.value("extracted_entities", std::vector<std::string>{});
    for (const auto& t : j.value("missing", nlohmann::json::array()))
        out.missing.push_back(triple_from_json(t));
    for (const auto& t : j.value("extra", nlohmann::json::array()))
        out.extra.push_back(triple_from_json(t));
    out.subgraph_triple_count = j.value("subgraph_triple_count", size_t{0});
    return out;
}

ValidationOutcome validate_statement(ChatBackend& backend, const PromptLibrary& prompts,
                                     const std::string& dataset_id, const std::string& statement,
                                     const Subgraph& subgraph,
                                     const std::vector<std::string>& entity_types,
                                     const std::vector<std::string>& relations,
                                     const RetryPolicy& retry, const std::string& statement_id) {
    if (entity_types.empty() || relations.empty())
        throw ConfigError("validate_statement: vocabularies must be non-empty");

    ValidationOutcome outcome;
    outcome.statement_id = statement_id;
    outcome.subgraph_triple_count = subgraph.triples.size();

    auto fail_all = [&](bool parse_failure) {
        outcome.passed = false;
        outcome.parse_failed = parse_failure;
        outcome.missing = subgraph.triples;
        return outcome;
    };

    // Stage 1: entity extraction.
    try {
        ChatRequest req = prompts.render_entity_prompt(dataset_id, statement, entity_types);
        std::string completion = chat_with_retry(backend, req, retry);
        nlohmann::json j = nlohmann::json::parse(extract_first_json_object(completion));
        outcome.extracted_entities = j.at("entities").get<std::vector<std::string>>();
    } catch (const TransportError&) {
        return fail_all(true);
    } catch (const ParseError&) {
        return fail_all(true);
    } catch (const nlohmann::json::exception&) {
        return fail_all(true);
    }
    if (outcome.extracted_entities.empty()) return fail_all(false);

    // Stage 2: KG extraction.
    try {
        ChatRequest req = prompts.render_kg_prompt(dataset_id, statement,
                                                   outcome.extracted_entities, relations);
        std::string completion = chat_with_retry(backend, req, retry);
        nlohmann::json j = nlohmann::json::parse(extract_first_json_object(completion));
        outcome.reconstructed = parse_prompt_triples(j.at("triples").dump());
    } catch (const TransportError&) {
        return fail_all(true);
    } catch (const ParseError&) {
        return fail_all(true);
    } catch (const nlohmann::json::exception&) {
        return fail_all(true);
    }

    MatchResult match = triples_match(subgraph.triples, outcome.reconstructed);
    outcome.passed = match.matched;
    outcome.missing = std::move(match.missing);
    outcome.extra = std::move(match.extra);
    return outcome;
}

std::map<size_t, double> reconstruction_rate(const std::vector<ValidationOutcome>& outcomes) {
    if (outcomes.empty()) throw Error("reconstruction_rate: no outcomes");
    std::map<size_t, std::pair<size_t, size_t>> buckets;  // size -> (passed, total)
    for (const auto& o : outcomes) {
        auto& [passed, total] = buckets[o.subgraph_triple_count];
        if (o.passed) ++passed;
        ++total;
    }
    std::map<size_t, double> rates;
    for (const auto& [size, counts] : buckets)
        rates[size] = static_cast<double>(counts.first) / counts.second;
    return rates;
}

}  // namespace semkg
