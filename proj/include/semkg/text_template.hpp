#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semkg/kg.hpp"

namespace semkg {

// Deterministic verbalization used by the offline pipeline path: one
// sentence "<source> <relation> <target>." per triple, sentences joined by a
// single space, sentence order given by `variant` (0 = input order; distinct
// variants < n! give distinct orders). The grammar requires whitespace-free,
// dot-free field names; that is what the synthetic and toy KGs provide.
std::string template_generate(const std::vector<Triple>& triples, uint64_t variant);

// Inverse of template_generate up to sentence order. Type labels are not
// present in the text, so extracted nodes carry empty type labels; matching
// downstream is by normalized names. Throws ParseError naming the 1-based
// sentence index on a grammar violation.
std::vector<Triple> template_extract(const std::string& text);

// Lehmer-code decoding of `variant` into a permutation of [0, n).
std::vector<size_t> permutation_for(size_t n, uint64_t variant);

}  // namespace semkg
