#include "semkg/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "semkg/errors.hpp"

namespace semkg {

std::vector<std::string> metric_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::stringstream ss(text);
    std::string raw;
    while (ss >> raw) {
        size_t b = 0, e = raw.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(raw[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(raw[e - 1]))) --e;
        if (b == e) continue;
        std::string token = raw.substr(b, e - b);
        std::transform(token.begin(), token.end(), token.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        tokens.push_back(std::move(token));
    }
    return tokens;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, size_t>;

NgramCounts ngrams(const std::vector<std::string>& tokens, int n) {
    NgramCounts counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[{tokens.begin() + i, tokens.begin() + i + n}];
    return counts;
}

size_t clipped_overlap(const NgramCounts& cand, const NgramCounts& ref) {
    size_t overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

}  // namespace

double rouge_n(const std::string& candidate, const std::string& reference, int n) {
    if (n < 1) throw ConfigError("rouge_n: n must be >= 1");
    NgramCounts cand = ngrams(metric_tokens(candidate), n);
    NgramCounts ref = ngrams(metric_tokens(reference), n);
    size_t cand_total = 0, ref_total = 0;
    for (const auto& [_, c] : cand) cand_total += c;
    for (const auto& [_, c] : ref) ref_total += c;
    if (cand_total == 0 || ref_total == 0) return 0.0;
    size_t overlap = clipped_overlap(cand, ref);
    return f1_of(static_cast<double>(overlap) / cand_total,
                 static_cast<double>(overlap) / ref_total);
}

size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

double rouge_l(const std::string& candidate, const std::string& reference) {
    auto cand = metric_tokens(candidate);
    auto ref = metric_tokens(reference);
    if (cand.empty() || ref.empty()) return 0.0;
    double lcs = static_cast<double>(lcs_length(cand, ref));
    return f1_of(lcs / cand.size(), lcs / ref.size());
}

double bleu(const std::string& candidate, const std::string& reference) {
    constexpr int kMaxOrder = 4;
    auto cand = metric_tokens(candidate);
    auto ref = metric_tokens(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    double log_sum = 0.0;
    int orders_used = 0;
    for (int n = 1; n <= kMaxOrder; ++n) {
        NgramCounts cgrams = ngrams(cand, n);
        size_t total = 0;
        for (const auto& [_, c] : cgrams) total += c;
        if (total == 0) break;  // candidate shorter than n tokens
        size_t matched = clipped_overlap(cgrams, ngrams(ref, n));
        double p;
        if (matched > 0) {
            p = static_cast<double>(matched) / total;
        } else if (n > 1) {
            p = 1.0 / (total + 1);  // add-one smoothing for higher-order zeros
        } else {
            return 0.0;  // no unigram overlap at all
        }
        log_sum += std::log(p);
        ++orders_used;
    }
    if (orders_used == 0) return 0.0;
    double geo_mean = std::exp(log_sum / orders_used);

    double bp = 1.0;
    if (cand.size() < ref.size())
        bp = std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
    return bp * geo_mean;
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw Error("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()) + ")");
    if (u.empty()) throw Error("cosine: empty vectors");
    double dot = 0, nu = 0, nv = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw Error("cosine: zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace semkg
