#include "semkg/text_template.hpp"

#include <limits>
#include <sstream>

namespace semkg {
namespace {

// n! with saturation; only the relative order of ranks matters.
uint64_t saturating_factorial(size_t n) {
    uint64_t f = 1;
    for (size_t i = 2; i <= n; ++i) {
        if (f > std::numeric_limits<uint64_t>::max() / i)
            return std::numeric_limits<uint64_t>::max();
        f *= i;
    }
    return f;
}

}  // namespace

std::vector<size_t> permutation_for(size_t n, uint64_t variant) {
    std::vector<size_t> remaining(n);
    for (size_t i = 0; i < n; ++i) remaining[i] = i;
    std::vector<size_t> perm;
    perm.reserve(n);
    uint64_t rank = n == 0 ? 0 : variant % saturating_factorial(n);
    for (size_t i = 0; i < n; ++i) {
        uint64_t f = saturating_factorial(n - 1 - i);
        size_t idx = static_cast<size_t>(rank / f);
        if (idx >= remaining.size()) idx = remaining.size() - 1;
        rank %= f;
        perm.push_back(remaining[idx]);
        remaining.erase(remaining.begin() + static_cast<long>(idx));
    }
    return perm;
}

std::string template_generate(const std::vector<Triple>& triples, uint64_t variant) {
    if (triples.empty()) throw Error("template_generate: no triples");
    auto perm = permutation_for(triples.size(), variant);
    std::string out;
    for (size_t i = 0; i < perm.size(); ++i) {
        const Triple& t = triples[perm[i]];
        if (i > 0) out += ' ';
        out += t.source.name;
        out += ' ';
        out += t.relation;
        out += ' ';
        out += t.target.name;
        out += '.';
    }
    return out;
}

std::vector<Triple> template_extract(const std::string& text) {
    std::vector<Triple> triples;
    size_t pos = 0;
    long sentence_index = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == ' ') ++pos;
        if (pos >= text.size()) break;
        size_t dot = text.find('.', pos);
        ++sentence_index;
        if (dot == std::string::npos)
            throw ParseError("unterminated sentence", sentence_index);
        std::string sentence = text.substr(pos, dot - pos);
        pos = dot + 1;

        std::stringstream ss(sentence);
        std::vector<std::string> fields;
        std::string field;
        while (ss >> field) fields.push_back(field);
        if (fields.size() != 3)
            throw ParseError("expected 'source relation target', got " +
                                 std::to_string(fields.size()) + " fields",
                             sentence_index);
        triples.push_back(Triple{{fields[0], ""}, fields[1], {fields[2], ""}});
    }
    if (triples.empty()) throw ParseError("no sentences", 1);
    return triples;
}

}  // namespace semkg
