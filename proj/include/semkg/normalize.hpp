#pragma once

#include <string>
#include <vector>

#include "semkg/kg.hpp"

namespace semkg {

// Reduces an inflected word form to a base form. Implementations must be
// deterministic; validation results are only reproducible if this is.
class Lemmatizer {
public:
    virtual ~Lemmatizer() = default;
    virtual std::string lemma(const std::string& lowercase_token) const = 0;
};

// Suffix stripper covering regular plurals (-s/-es/-ies), -ing and -ed with
// doubled-consonant handling, plus a small irregular-form table. Words the
// rules would mangle ("united") are pinned in the exceptions table.
class RuleLemmatizer : public Lemmatizer {
public:
    std::string lemma(const std::string& lowercase_token) const override;
};

const Lemmatizer& default_lemmatizer();
const std::vector<std::string>& stopwords();
bool is_stopword(const std::string& lowercase_token);

// Lowercase, tokenize on non-alphanumerics, drop stopwords, lemmatize each
// token, concatenate with no separators — iterated to a fixed point so the
// function is idempotent by construction. Empty output is allowed.
std::string normalize_entity(const std::string& text, const Lemmatizer& lemmatizer);
std::string normalize_entity(const std::string& text);

// Relations come from a closed vocabulary: lowercase and strip whitespace
// only, no stopword filtering or lemmatization.
std::string normalize_relation(const std::string& relation);

struct NormalizedTriple {
    std::string source_key;
    std::string relation_key;
    std::string target_key;

    auto operator<=>(const NormalizedTriple&) const = default;
};

NormalizedTriple normalize_triple(const Triple& t);
NormalizedTriple normalize_triple(const Triple& t, const Lemmatizer& lemmatizer);

}  // namespace semkg
