#pragma once

#include <memory>
#include <string>
#include <vector>

#include "semkg/dataset.hpp"
#include "semkg/gateway.hpp"
#include "semkg/metrics.hpp"
#include "semkg/prompts.hpp"
#include "semkg/stats.hpp"

namespace semkg {

// A semantic-similarity method under evaluation.
class Scorer {
public:
    enum class Kind { Continuous, Binary };
    virtual ~Scorer() = default;
    virtual std::string name() const = 0;
    virtual Kind kind() const = 0;
    // Binary scorers return exactly 0.0 or 1.0, or NaN for a non-conforming
    // (invalid) result. Must be callable from multiple threads.
    virtual double score(const std::string& statement_1, const std::string& statement_2) = 0;
};

std::unique_ptr<Scorer> make_rouge_scorer(int n);
std::unique_ptr<Scorer> make_rouge_l_scorer();
std::unique_ptr<Scorer> make_bleu_scorer();
std::unique_ptr<Scorer> make_cosine_scorer(std::shared_ptr<EmbeddingBackend> backend);
std::unique_ptr<Scorer> make_judge_scorer(std::shared_ptr<ChatBackend> backend,
                                          std::shared_ptr<const PromptLibrary> prompts,
                                          RetryPolicy retry = {});

enum class JudgeVerdict { No = 0, Yes = 1, Invalid = 2 };

// Renders the judge prompt at temperature 0 and parses the completion:
// trimmed, lowercased, surrounding punctuation stripped; "yes" -> Yes,
// "no" -> No, anything else (including transport failure) -> Invalid.
JudgeVerdict judge_pair(ChatBackend& backend, const PromptLibrary& prompts,
                        const std::string& statement_1, const std::string& statement_2,
                        const RetryPolicy& retry = {});

// Batch scoring kernels. The OpenMP version partitions pairs across threads
// (0 = library default); the serial version is the reference the tests and
// the benchmark compare against.
std::vector<double> score_pairs_serial(Scorer& scorer, const std::vector<StatementPair>& pairs);
std::vector<double> score_pairs(Scorer& scorer, const std::vector<StatementPair>& pairs,
                                int threads = 0);

struct EvalRow {
    std::string method;
    std::string dataset;  // "all" aggregates over datasets
    std::string kind;     // "all" aggregates over perturbation kinds
    long n = 0;           // scored pairs in the stratum (invalid excluded)
    long tp = 0, fp = 0, fn = 0, tn = 0;
    long invalid = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    double ci_low = 0.0, ci_high = 1.0;
    double threshold = 0.5;

    std::string to_json() const;
};

// Calibrates a threshold on the validation split for continuous scorers
// (binary scorers are used as-is) and reports per-stratum precision/recall/F1
// with Clopper-Pearson-derived F1 intervals on the test split. A pair's
// stratum kind is its own perturbation kind for negatives; positives inherit
// the kind of their subgraph family's negative pair.
std::vector<EvalRow> evaluate_method(const std::vector<StatementPair>& pairs, Scorer& scorer,
                                     double validation_fraction, uint64_t seed,
                                     double alpha = 0.05, int threads = 0);

// Human-readable method x kind and method x dataset matrices with
// "F1 ± half-width" cells, aggregated from row counts.
std::string stratified_report(const std::vector<EvalRow>& rows, double alpha = 0.05);

void write_report_rows(const std::vector<EvalRow>& rows, const std::string& path);

}  // namespace semkg
