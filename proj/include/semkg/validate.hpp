#pragma once

#include <map>
#include <string>
#include <vector>

#include "semkg/gateway.hpp"
#include "semkg/kg.hpp"
#include "semkg/normalize.hpp"
#include "semkg/prompts.hpp"

namespace semkg {

struct MatchResult {
    bool matched = false;
    std::vector<Triple> missing;  // in original, absent from reconstruction
    std::vector<Triple> extra;    // reconstructed, absent from original
};

// Set equality of normalized triples, direction-sensitive; returns the
// symmetric difference in original (pre-normalization) form.
MatchResult triples_match(const std::vector<Triple>& original,
                          const std::vector<Triple>& reconstructed);

struct ValidationOutcome {
    std::string statement_id;
    bool passed = false;
    // Backend produced no parseable structured output; tracked separately
    // from a semantic mismatch.
    bool parse_failed = false;
    std::vector<std::string> extracted_entities;
    std::vector<Triple> reconstructed;
    std::vector<Triple> missing;
    std::vector<Triple> extra;
    size_t subgraph_triple_count = 0;

    std::string to_json() const;
    static ValidationOutcome from_json(const std::string& line, long line_no = -1);
};

// Two-stage reconstruction check: entity extraction, then KG extraction,
// then normalized exact matching against the subgraph's triples.
ValidationOutcome validate_statement(ChatBackend& backend, const PromptLibrary& prompts,
                                     const std::string& dataset_id, const std::string& statement,
                                     const Subgraph& subgraph,
                                     const std::vector<std::string>& entity_types,
                                     const std::vector<std::string>& relations,
                                     const RetryPolicy& retry = {},
                                     const std::string& statement_id = "");

// Fraction of passed outcomes per subgraph-size (triple count) bucket.
std::map<size_t, double> reconstruction_rate(const std::vector<ValidationOutcome>& outcomes);

}  // namespace semkg
