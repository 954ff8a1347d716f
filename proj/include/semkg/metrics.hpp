#pragma once

#include <string>
#include <vector>

namespace semkg {

// Shared tokenization for all token metrics: lowercase, split on whitespace,
// strip leading/trailing punctuation from each token.
std::vector<std::string> metric_tokens(const std::string& text);

// F1 over clipped n-gram multiset overlap; 0 when either side has no n-grams.
double rouge_n(const std::string& candidate, const std::string& reference, int n);

// F1 from longest-common-subsequence length over token sequences.
double rouge_l(const std::string& candidate, const std::string& reference);

size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Sentence-level BLEU, max order 4, clipped precisions. Higher-order zero
// counts get add-one smoothing; brevity penalty exp(1 - |ref|/|cand|) applies
// when the candidate is shorter than the reference.
double bleu(const std::string& candidate, const std::string& reference);

// Throws on dimension mismatch or zero vector.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace semkg
