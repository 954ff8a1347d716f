#include "semkg/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace semkg {
namespace {

class RougeNScorer : public Scorer {
public:
    explicit RougeNScorer(int n) : n_(n) {}
    std::string name() const override { return "rouge" + std::to_string(n_); }
    Kind kind() const override { return Kind::Continuous; }
    double score(const std::string& a, const std::string& b) override { return rouge_n(a, b, n_); }

private:
    int n_;
};

class RougeLScorer : public Scorer {
public:
    std::string name() const override { return "rougeL"; }
    Kind kind() const override { return Kind::Continuous; }
    double score(const std::string& a, const std::string& b) override { return rouge_l(a, b); }
};

class BleuScorer : public Scorer {
public:
    std::string name() const override { return "bleu"; }
    Kind kind() const override { return Kind::Continuous; }
    double score(const std::string& a, const std::string& b) override { return bleu(a, b); }
};

class CosineScorer : public Scorer {
public:
    explicit CosineScorer(std::shared_ptr<EmbeddingBackend> backend)
        : backend_(std::move(backend)) {}
    std::string name() const override { return "cosine:" + backend_->model_id(); }
    Kind kind() const override { return Kind::Continuous; }
    double score(const std::string& a, const std::string& b) override {
        return cosine(backend_->embed(a), backend_->embed(b));
    }

private:
    std::shared_ptr<EmbeddingBackend> backend_;
};

class JudgeScorer : public Scorer {
public:
    JudgeScorer(std::shared_ptr<ChatBackend> backend,
                std::shared_ptr<const PromptLibrary> prompts, RetryPolicy retry)
        : backend_(std::move(backend)), prompts_(std::move(prompts)), retry_(retry) {}
    std::string name() const override { return "judge:" + backend_->name(); }
    Kind kind() const override { return Kind::Binary; }
    double score(const std::string& a, const std::string& b) override {
        switch (judge_pair(*backend_, *prompts_, a, b, retry_)) {
            case JudgeVerdict::Yes: return 1.0;
            case JudgeVerdict::No: return 0.0;
            case JudgeVerdict::Invalid: return std::nan("");
        }
        return std::nan("");
    }

private:
    std::shared_ptr<ChatBackend> backend_;
    std::shared_ptr<const PromptLibrary> prompts_;
    RetryPolicy retry_;
};

}  // namespace

std::unique_ptr<Scorer> make_rouge_scorer(int n) { return std::make_unique<RougeNScorer>(n); }
std::unique_ptr<Scorer> make_rouge_l_scorer() { return std::make_unique<RougeLScorer>(); }
std::unique_ptr<Scorer> make_bleu_scorer() { return std::make_unique<BleuScorer>(); }
std::unique_ptr<Scorer> make_cosine_scorer(std::shared_ptr<EmbeddingBackend> backend) {
    return std::make_unique<CosineScorer>(std::move(backend));
}
std::unique_ptr<Scorer> make_judge_scorer(std::shared_ptr<ChatBackend> backend,
                                          std::shared_ptr<const PromptLibrary> prompts,
                                          RetryPolicy retry) {
    return std::make_unique<JudgeScorer>(std::move(backend), std::move(prompts), retry);
}

JudgeVerdict judge_pair(ChatBackend& backend, const PromptLibrary& prompts,
                        const std::string& statement_1, const std::string& statement_2,
                        const RetryPolicy& retry) {
    ChatRequest req = prompts.render_judge_prompt(statement_1, statement_2);
    std::string completion;
    try {
        completion = chat_with_retry(backend, req, retry);
    } catch (const TransportError&) {
        return JudgeVerdict::Invalid;
    }
    std::string cleaned;
    for (char raw : completion) {
        auto c = static_cast<unsigned char>(raw);
        if (!std::isspace(c)) cleaned.push_back(static_cast<char>(std::tolower(c)));
    }
    size_t b = 0, e = cleaned.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cleaned[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cleaned[e - 1]))) --e;
    std::string word = cleaned.substr(b, e - b);
    if (word == "yes") return JudgeVerdict::Yes;
    if (word == "no") return JudgeVerdict::No;
    return JudgeVerdict::Invalid;
}

std::vector<double> score_pairs_serial(Scorer& scorer, const std::vector<StatementPair>& pairs) {
    std::vector<double> scores(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i)
        scores[i] = scorer.score(pairs[i].statement_1, pairs[i].statement_2);
    return scores;
}

std::vector<double> score_pairs(Scorer& scorer, const std::vector<StatementPair>& pairs,
                                int threads) {
    std::vector<double> scores(pairs.size());
    auto n = static_cast<long>(pairs.size());
    // Exceptions must not escape the parallel region; capture the first one
    // and rethrow after the join.
    std::string first_error;
    std::mutex error_mutex;
    auto score_one = [&](long i) {
        try {
            scores[static_cast<size_t>(i)] =
                scorer.score(pairs[static_cast<size_t>(i)].statement_1,
                             pairs[static_cast<size_t>(i)].statement_2);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (first_error.empty()) first_error = e.what();
        }
    };
#ifdef _OPENMP
    if (threads > 0) {
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
        for (long i = 0; i < n; ++i) score_one(i);
    } else {
#pragma omp parallel for schedule(dynamic, 8)
        for (long i = 0; i < n; ++i) score_one(i);
    }
#else
    (void)threads;
    for (long i = 0; i < n; ++i) score_one(i);
#endif
    if (!first_error.empty()) throw Error("score_pairs: " + first_error);
    return scores;
}

std::string EvalRow::to_json() const {
    nlohmann::json j{{"method", method},   {"dataset", dataset},   {"kind", kind},
                     {"n", n},             {"tp", tp},             {"fp", fp},
                     {"fn", fn},           {"tn", tn},             {"invalid", invalid},
                     {"precision", precision}, {"recall", recall}, {"f1", f1},
                     {"ci_low", ci_low},   {"ci_high", ci_high},   {"threshold", threshold}};
    return j.dump();
}

namespace {

Interval interval_or_trivial(long tp, long fp, long fn, double alpha) {
    if (tp + fp < 1 || tp + fn < 1) return Interval{0.0, 1.0};
    return f1_confidence_interval(tp, fp, fn, alpha);
}

// A positive pair has no kind of its own; it inherits the kind of its
// subgraph family, identified through the family's negative pair.
std::string stratum_kind(const StatementPair& pair,
                         const std::map<std::string, std::string>& family_kind) {
    if (pair.perturbation_kind) return to_string(*pair.perturbation_kind);
    auto it = family_kind.find(pair.subgraph_id);
    return it == family_kind.end() ? "unknown" : it->second;
}

}  // namespace

std::vector<EvalRow> evaluate_method(const std::vector<StatementPair>& pairs, Scorer& scorer,
                                     double validation_fraction, uint64_t seed, double alpha,
                                     int threads) {
    if (pairs.empty()) throw Error("evaluate_method: no pairs");

    std::map<std::string, std::string> family_kind;
    for (const auto& p : pairs)
        if (p.perturbation_kind) family_kind[p.subgraph_id] = to_string(*p.perturbation_kind);

    SplitResult splits = split(pairs, validation_fraction, seed);

    double threshold = 0.5;
    if (scorer.kind() == Scorer::Kind::Continuous) {
        std::vector<double> val_scores = score_pairs(scorer, splits.validation, threads);
        std::vector<int> val_labels;
        val_labels.reserve(splits.validation.size());
        for (const auto& p : splits.validation) val_labels.push_back(p.label);
        threshold = select_threshold(val_scores, val_labels);
    }

    std::vector<double> test_scores = score_pairs(scorer, splits.test, threads);

    struct Counts {
        long tp = 0, fp = 0, fn = 0, tn = 0, invalid = 0;
    };
    std::map<std::pair<std::string, std::string>, Counts> strata;
    for (size_t i = 0; i < splits.test.size(); ++i) {
        const auto& p = splits.test[i];
        Counts& c = strata[{p.dataset_name, stratum_kind(p, family_kind)}];
        if (std::isnan(test_scores[i])) {
            ++c.invalid;
            continue;
        }
        int predicted = test_scores[i] >= threshold ? 1 : 0;
        if (predicted == 1 && p.label == 1) ++c.tp;
        if (predicted == 1 && p.label == 0) ++c.fp;
        if (predicted == 0 && p.label == 1) ++c.fn;
        if (predicted == 0 && p.label == 0) ++c.tn;
    }

    std::vector<EvalRow> rows;
    for (const auto& [key, c] : strata) {
        EvalRow row;
        row.method = scorer.name();
        row.dataset = key.first;
        row.kind = key.second;
        row.tp = c.tp;
        row.fp = c.fp;
        row.fn = c.fn;
        row.tn = c.tn;
        row.invalid = c.invalid;
        row.n = c.tp + c.fp + c.fn + c.tn;
        if (row.n == 0) continue;  // stratum had only invalid responses
        Prf prf = prf_from_counts(c.tp, c.fp, c.fn);
        row.precision = prf.precision;
        row.recall = prf.recall;
        row.f1 = prf.f1;
        Interval ci = interval_or_trivial(c.tp, c.fp, c.fn, alpha);
        row.ci_low = std::min(ci.lower, row.f1);
        row.ci_high = std::max(ci.upper, row.f1);
        row.threshold = threshold;
        rows.push_back(row);
    }
    return rows;
}

namespace {

struct Agg {
    long tp = 0, fp = 0, fn = 0, tn = 0, invalid = 0;
    void add(const EvalRow& r) {
        tp += r.tp;
        fp += r.fp;
        fn += r.fn;
        tn += r.tn;
        invalid += r.invalid;
    }
};

std::string cell(const Agg& a, double alpha) {
    if (a.tp + a.fp + a.fn + a.tn == 0) return "-";
    Prf prf = prf_from_counts(a.tp, a.fp, a.fn);
    Interval ci = interval_or_trivial(a.tp, a.fp, a.fn, alpha);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f ± %.3f", prf.f1, (ci.upper - ci.lower) / 2.0);
    return buf;
}

std::string render_matrix(const std::vector<EvalRow>& rows,
                          const std::string& column_axis, double alpha) {
    std::vector<std::string> methods, columns;
    std::map<std::pair<std::string, std::string>, Agg> cells;
    for (const auto& r : rows) {
        std::string col = column_axis == "kind" ? r.kind : r.dataset;
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        if (std::find(columns.begin(), columns.end(), col) == columns.end())
            columns.push_back(col);
        cells[{r.method, col}].add(r);
    }
    std::sort(columns.begin(), columns.end());
    std::sort(methods.begin(), methods.end());

    size_t method_width = 8;
    for (const auto& m : methods) method_width = std::max(method_width, m.size());
    constexpr size_t kCellWidth = 16;

    std::ostringstream out;
    out << std::string(method_width, ' ');
    for (const auto& col : columns) {
        out << "  ";
        out << col;
        if (col.size() < kCellWidth) out << std::string(kCellWidth - col.size(), ' ');
    }
    out << "\n";
    for (const auto& m : methods) {
        out << m << std::string(method_width - m.size(), ' ');
        for (const auto& col : columns) {
            auto it = cells.find({m, col});
            std::string text = it == cells.end() ? "-" : cell(it->second, alpha);
            out << "  " << text;
            if (text.size() < kCellWidth) out << std::string(kCellWidth - text.size(), ' ');
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace

std::string stratified_report(const std::vector<EvalRow>& rows, double alpha) {
    if (rows.empty()) throw Error("stratified_report: no rows");
    std::ostringstream out;
    out << "F1 by perturbation kind (cells: F1 ± CI half-width)\n";
    out << render_matrix(rows, "kind", alpha);
    out << "\nF1 by dataset (cells: F1 ± CI half-width)\n";
    out << render_matrix(rows, "dataset", alpha);
    long invalid = 0, n = 0;
    for (const auto& r : rows) {
        invalid += r.invalid;
        n += r.n + r.invalid;
    }
    if (invalid > 0)
        out << "\ninvalid judge responses: " << invalid << " / " << n << "\n";
    return out.str();
}

void write_report_rows(const std::vector<EvalRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& r : rows) out << r.to_json() << "\n";
}

}  // namespace semkg
