// Independent reference implementations used to check the library. These
// deliberately avoid the library's own code paths: different algorithms,
// different data structures, written against the definitions directly.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "semkg/kg.hpp"
#include "semkg/rng.hpp"

namespace oracle {

// ---- token metrics ---------------------------------------------------

// Lowercase whitespace tokens with surrounding punctuation stripped; mirrors
// the documented tokenization rule (shared definition, separate code).
inline std::vector<std::string> tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        size_t b = 0, e = cur.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
        if (e > b) {
            std::string t = cur.substr(b, e - b);
            for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            out.push_back(t);
        }
        cur.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)))
            flush();
        else
            cur.push_back(c);
    }
    flush();
    return out;
}

// Clipped n-gram overlap by direct list scanning (no hash maps).
inline double rouge_n_f1(const std::vector<std::string>& cand,
                         const std::vector<std::string>& ref, int n) {
    auto grams = [n](const std::vector<std::string>& t) {
        std::vector<std::vector<std::string>> g;
        for (size_t i = 0; i + n <= t.size(); ++i)
            g.push_back({t.begin() + i, t.begin() + i + n});
        return g;
    };
    auto cg = grams(cand), rg = grams(ref);
    if (cg.empty() || rg.empty()) return 0.0;
    std::vector<bool> used(rg.size(), false);
    size_t overlap = 0;
    for (const auto& g : cg) {
        for (size_t j = 0; j < rg.size(); ++j) {
            if (!used[j] && rg[j] == g) {
                used[j] = true;
                ++overlap;
                break;
            }
        }
    }
    double p = static_cast<double>(overlap) / cg.size();
    double r = static_cast<double>(overlap) / rg.size();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

// Plain full-table LCS.
inline size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<size_t>> dp(a.size() + 1, std::vector<size_t>(b.size() + 1, 0));
    for (size_t i = 1; i <= a.size(); ++i)
        for (size_t j = 1; j <= b.size(); ++j)
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
    return dp[a.size()][b.size()];
}

inline double rouge_l_f1(const std::vector<std::string>& cand,
                         const std::vector<std::string>& ref) {
    if (cand.empty() || ref.empty()) return 0.0;
    double l = static_cast<double>(lcs(cand, ref));
    double p = l / cand.size(), r = l / ref.size();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

// ---- binomial / Clopper-Pearson --------------------------------------

// P(X >= k) and P(X <= k) for X ~ Binomial(n, p), by direct summation of
// exact terms in log space.
inline double binom_tail_ge(long k, long n, double p) {
    if (p <= 0.0) return k <= 0 ? 1.0 : 0.0;
    if (p >= 1.0) return 1.0;
    double total = 0.0;
    for (long i = k; i <= n; ++i) {
        double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                          std::lgamma(n - i + 1.0) + i * std::log(p) +
                          (n - i) * std::log1p(-p);
        total += std::exp(log_term);
    }
    return std::min(total, 1.0);
}

inline double binom_tail_le(long k, long n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return k >= n ? 1.0 : 0.0;
    double total = 0.0;
    for (long i = 0; i <= k; ++i) {
        double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                          std::lgamma(n - i + 1.0) + i * std::log(p) +
                          (n - i) * std::log1p(-p);
        total += std::exp(log_term);
    }
    return std::min(total, 1.0);
}

// Clopper-Pearson by bisection on the exact binomial tails: the lower bound
// solves P(X >= k | p) = alpha/2, the upper solves P(X <= k | p) = alpha/2.
inline std::pair<double, double> clopper_pearson(long k, long n, double alpha) {
    double lo = 0.0, hi = 1.0;
    double lower = 0.0, upper = 1.0;
    if (k > 0) {
        lo = 0.0;
        hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (binom_tail_ge(k, n, mid) < alpha / 2)
                lo = mid;
            else
                hi = mid;
        }
        lower = 0.5 * (lo + hi);
    }
    if (k < n) {
        lo = 0.0;
        hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (binom_tail_le(k, n, mid) > alpha / 2)
                lo = mid;
            else
                hi = mid;
        }
        upper = 0.5 * (lo + hi);
    }
    return {lower, upper};
}

// ---- threshold search -------------------------------------------------

inline double f1_at_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                              double threshold) {
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        int pred = scores[i] >= threshold ? 1 : 0;
        if (pred == 1 && labels[i] == 1) ++tp;
        if (pred == 1 && labels[i] == 0) ++fp;
        if (pred == 0 && labels[i] == 1) ++fn;
    }
    double p = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    double r = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

// Exhaustive search over every candidate threshold (all midpoints and the
// two sentinels), trying candidates in ascending order.
inline std::pair<double, double> best_threshold(const std::vector<double>& scores,
                                                const std::vector<int>& labels) {
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
    for (size_t i = 1; i < sorted.size(); ++i)
        candidates.push_back(sorted[i - 1] + (sorted[i] - sorted[i - 1]) / 2);
    candidates.push_back(std::numeric_limits<double>::infinity());
    double best_t = candidates.front(), best_f1 = -1.0;
    for (double t : candidates) {
        double f1 = f1_at_threshold(scores, labels, t);
        if (f1 > best_f1) {
            best_f1 = f1;
            best_t = t;
        }
    }
    return {best_t, best_f1};
}

// ---- graph helpers ----------------------------------------------------

inline semkg::Node n(const std::string& name, const std::string& type = "t") {
    return semkg::Node{name, type};
}

inline semkg::Triple t(const semkg::Node& a, const std::string& rel, const semkg::Node& b) {
    return semkg::Triple{a, rel, b};
}

// Weak connectivity check written against plain adjacency sets.
inline bool connected(const std::vector<semkg::Triple>& triples) {
    std::set<semkg::Node> nodes;
    std::map<semkg::Node, std::set<semkg::Node>> adj;
    for (const auto& tr : triples) {
        nodes.insert(tr.source);
        nodes.insert(tr.target);
        adj[tr.source].insert(tr.target);
        adj[tr.target].insert(tr.source);
    }
    if (nodes.empty()) return false;
    std::set<semkg::Node> seen{*nodes.begin()};
    std::vector<semkg::Node> stack{*nodes.begin()};
    while (!stack.empty()) {
        semkg::Node u = stack.back();
        stack.pop_back();
        for (const auto& v : adj[u])
            if (seen.insert(v).second) stack.push_back(v);
    }
    return seen.size() == nodes.size();
}

// Nodes whose removal (with incident triples) keeps every survivor
// non-isolated, keeps the rest connected, and leaves >= 2 nodes.
inline std::set<semkg::Node> removable_nodes(const semkg::Subgraph& sub) {
    std::set<semkg::Node> eligible;
    for (const auto& victim : sub.nodes) {
        std::vector<semkg::Triple> rest;
        for (const auto& tr : sub.triples)
            if (tr.source != victim && tr.target != victim) rest.push_back(tr);
        std::set<semkg::Node> surviving;
        for (const auto& tr : rest) {
            surviving.insert(tr.source);
            surviving.insert(tr.target);
        }
        // every non-victim node must still appear in some triple
        if (surviving.size() != sub.nodes.size() - 1) continue;
        if (surviving.size() < 2) continue;
        if (!connected(rest)) continue;
        eligible.insert(victim);
    }
    return eligible;
}

// Triples whose removal keeps both endpoints at degree >= 1, all nodes
// present, and the subgraph connected.
inline std::set<semkg::Triple> removable_edges(const semkg::Subgraph& sub) {
    std::set<semkg::Triple> eligible;
    for (const auto& victim : sub.triples) {
        std::vector<semkg::Triple> rest;
        for (const auto& tr : sub.triples)
            if (tr != victim) rest.push_back(tr);
        std::set<semkg::Node> surviving;
        for (const auto& tr : rest) {
            surviving.insert(tr.source);
            surviving.insert(tr.target);
        }
        if (surviving.size() != sub.nodes.size()) continue;
        if (!connected(rest)) continue;
        eligible.insert(victim);
    }
    return eligible;
}

// Random typed KG for property tests: a spanning chain plus extra edges.
inline semkg::KnowledgeGraph random_kg(size_t nodes, size_t extra_edges, uint64_t seed,
                                       size_t n_types = 6) {
    semkg::Rng rng(seed);
    const char* rels[] = {"r_alpha", "r_beta", "r_gamma", "r_delta", "r_up", "r_down"};
    auto node = [&](size_t i) {
        return semkg::Node{"n" + std::to_string(i), "type" + std::to_string(i % n_types)};
    };
    std::vector<semkg::Triple> triples;
    for (size_t i = 1; i < nodes; ++i)
        triples.push_back({node(rng.next_below(i)), rels[rng.next_below(6)], node(i)});
    for (size_t i = 0; i < extra_edges; ++i) {
        size_t a = rng.next_below(nodes), b = rng.next_below(nodes);
        if (a == b) continue;
        triples.push_back({node(a), rels[rng.next_below(6)], node(b)});
    }
    return semkg::KnowledgeGraph::from_triples(triples, "random_kg");
}

inline std::string random_word(semkg::Rng& rng, int min_len = 1, int max_len = 10) {
    int len = static_cast<int>(rng.next_in(min_len, max_len));
    std::string w;
    for (int i = 0; i < len; ++i)
        w.push_back(static_cast<char>('a' + rng.next_below(26)));
    return w;
}

inline std::string random_sentence(semkg::Rng& rng, int words) {
    std::string s;
    for (int i = 0; i < words; ++i) {
        if (i) s += ' ';
        s += random_word(rng, 1, 8);
    }
    return s;
}

}  // namespace oracle
