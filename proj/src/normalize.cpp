#include "semkg/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

namespace semkg {
namespace {

bool has_vowel(const std::string& s) {
    return s.find_first_of("aeiouy") != std::string::npos;
}

bool ends_with(const std::string& s, const char* suffix) {
    return s.ends_with(suffix);
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }

// Undo consonant doubling after stripping -ing/-ed (planned -> plan), but
// leave -ll/-ss/-zz alone (fill, miss, buzz).
std::string undouble(std::string s) {
    size_t n = s.size();
    if (n >= 3 && s[n - 1] == s[n - 2] && !is_vowel(s[n - 1]) && s[n - 1] != 'l' &&
        s[n - 1] != 's' && s[n - 1] != 'z')
        s.pop_back();
    return s;
}

const std::unordered_map<std::string, std::string>& exceptions() {
    static const std::unordered_map<std::string, std::string> table{
        {"children", "child"}, {"men", "man"},     {"women", "woman"},
        {"mice", "mouse"},     {"feet", "foot"},   {"teeth", "tooth"},
        {"geese", "goose"},    {"people", "person"},
        // words the suffix rules would wrongly reduce
        {"united", "united"},  {"series", "series"}, {"species", "species"},
        {"status", "status"},  {"analysis", "analysis"},
    };
    return table;
}

}  // namespace

std::string RuleLemmatizer::lemma(const std::string& token) const {
    auto it = exceptions().find(token);
    if (it != exceptions().end()) return it->second;

    const size_t n = token.size();
    if (n >= 5 && ends_with(token, "ies")) return token.substr(0, n - 3) + "y";
    if (n >= 5 && (ends_with(token, "sses") || ends_with(token, "ches") ||
                   ends_with(token, "shes") || ends_with(token, "xes") ||
                   ends_with(token, "zes")))
        return token.substr(0, n - 2);
    if (n >= 4 && token.back() == 's' && !ends_with(token, "ss") && !ends_with(token, "us") &&
        !ends_with(token, "is"))
        return token.substr(0, n - 1);
    if (n >= 6 && ends_with(token, "ing")) {
        std::string stem = token.substr(0, n - 3);
        if (has_vowel(stem)) return undouble(std::move(stem));
    }
    if (n >= 5 && ends_with(token, "ed")) {
        std::string stem = token.substr(0, n - 2);
        if (has_vowel(stem)) return undouble(std::move(stem));
    }
    return token;
}

const Lemmatizer& default_lemmatizer() {
    static const RuleLemmatizer instance;
    return instance;
}

const std::vector<std::string>& stopwords() {
    static const std::vector<std::string> words{
        "a",          "about",   "above",    "after",   "again",      "against", "all",
        "am",         "an",      "and",      "any",     "are",        "as",      "at",
        "be",         "because", "been",     "before",  "being",      "below",   "between",
        "both",       "but",     "by",       "could",   "did",        "do",      "does",
        "doing",      "down",    "during",   "each",    "few",        "for",     "from",
        "further",    "had",     "has",      "have",    "having",     "he",      "her",
        "here",       "hers",    "herself",  "him",     "himself",    "his",     "how",
        "i",          "if",      "in",       "into",    "is",         "it",      "its",
        "itself",     "just",    "me",       "more",    "most",       "my",      "myself",
        "no",         "nor",     "not",      "now",     "of",         "off",     "on",
        "once",       "only",    "or",       "other",   "our",        "ours",    "ourselves",
        "out",        "over",    "own",      "same",    "she",        "should",  "so",
        "some",       "such",    "than",     "that",    "the",        "their",   "theirs",
        "them",       "themselves", "then",  "there",   "these",      "they",    "this",
        "those",      "through", "to",       "too",     "under",      "until",   "up",
        "very",       "was",     "we",       "were",    "what",       "when",    "where",
        "which",      "while",   "who",      "whom",    "why",        "will",    "with",
        "you",        "your",    "yours",    "yourself", "yourselves",
    };
    return words;
}

bool is_stopword(const std::string& token) {
    static const std::set<std::string> lookup(stopwords().begin(), stopwords().end());
    return lookup.count(token) > 0;
}

namespace {

std::string normalize_pass(const std::string& text, const Lemmatizer& lemmatizer) {
    std::vector<std::string> tokens;
    std::string current;
    for (char raw : text) {
        auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));

    std::string out;
    for (const auto& token : tokens) {
        if (is_stopword(token)) continue;
        out += lemmatizer.lemma(token);
    }
    return out;
}

}  // namespace

std::string normalize_entity(const std::string& text, const Lemmatizer& lemmatizer) {
    // Iterate to a fixed point: a single pass can expose a new strippable
    // suffix at the token seam after concatenation. Every pass shrinks or
    // stabilizes the string, so this terminates quickly.
    std::string current = normalize_pass(text, lemmatizer);
    for (size_t i = 0, cap = current.size() + 1; i < cap; ++i) {
        std::string next = normalize_pass(current, lemmatizer);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

std::string normalize_entity(const std::string& text) {
    return normalize_entity(text, default_lemmatizer());
}

std::string normalize_relation(const std::string& relation) {
    std::string out;
    out.reserve(relation.size());
    for (char raw : relation) {
        auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) continue;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

NormalizedTriple normalize_triple(const Triple& t, const Lemmatizer& lemmatizer) {
    return NormalizedTriple{normalize_entity(t.source.name, lemmatizer),
                            normalize_relation(t.relation),
                            normalize_entity(t.target.name, lemmatizer)};
}

NormalizedTriple normalize_triple(const Triple& t) {
    return normalize_triple(t, default_lemmatizer());
}

}  // namespace semkg
