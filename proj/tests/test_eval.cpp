#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "oracles.hpp"
#include "semkg/eval.hpp"

using namespace semkg;

namespace {

const std::string kTemplates = SEMKG_TEMPLATES_DIR;

struct ScriptedBackend : ChatBackend {
    std::string reply;
    bool fail = false;
    std::string complete(const ChatRequest&) override {
        if (fail) throw TransportError("down");
        return reply;
    }
    std::string name() const override { return "scripted"; }
};

// Positives share identical statements; negatives share no tokens at all, so
// any overlap metric separates them perfectly.
std::vector<StatementPair> separable_pairs(int families) {
    std::vector<StatementPair> pairs;
    Rng rng(23);
    for (int i = 0; i < families; ++i) {
        std::string sub = "sub_" + std::to_string(i);
        std::string base = oracle::random_sentence(rng, 8) + " shared" + std::to_string(i);
        std::string disjoint = "qq" + std::to_string(i) + "x zz" + std::to_string(i) + "y";
        pairs.push_back({"toy", std::nullopt, base, base, 1, sub});
        pairs.push_back({"toy", kAllPerturbationKinds[i % 4], base, disjoint, 0, sub});
    }
    return pairs;
}

struct ConstantScorer : Scorer {
    std::string name() const override { return "constant"; }
    Kind kind() const override { return Kind::Continuous; }
    double score(const std::string&, const std::string&) override { return 0.5; }
};

}  // namespace

TEST_CASE("judge_pair parses verdicts leniently") {
    PromptLibrary prompts(kTemplates);
    ScriptedBackend backend;
    backend.reply = "Yes";
    CHECK(judge_pair(backend, prompts, "s1", "s2") == JudgeVerdict::Yes);
    backend.reply = "no.";
    CHECK(judge_pair(backend, prompts, "s1", "s2") == JudgeVerdict::No);
    backend.reply = "  \"YES\"  ";
    CHECK(judge_pair(backend, prompts, "s1", "s2") == JudgeVerdict::Yes);
    backend.reply = "It depends";
    CHECK(judge_pair(backend, prompts, "s1", "s2") == JudgeVerdict::Invalid);
    backend.fail = true;
    CHECK(judge_pair(backend, prompts, "s1", "s2", RetryPolicy{2, {}, false}) ==
          JudgeVerdict::Invalid);
}

TEST_CASE("evaluate_method separates a separable dataset perfectly") {
    auto pairs = separable_pairs(40);
    auto scorer = make_rouge_scorer(1);
    auto rows = evaluate_method(pairs, *scorer, 0.5, 3);
    REQUIRE(!rows.empty());
    for (const auto& row : rows) {
        CHECK(row.f1 == doctest::Approx(1.0));
        CHECK(row.ci_low <= row.f1);
        CHECK(row.f1 <= row.ci_high);
        CHECK(row.n > 0);
    }
}

TEST_CASE("a constant scorer degenerates to the better trivial baseline") {
    auto pairs = separable_pairs(40);
    ConstantScorer scorer;
    auto rows = evaluate_method(pairs, scorer, 0.5, 3);
    long tp = 0, fp = 0, fn = 0;
    for (const auto& row : rows) {
        tp += row.tp;
        fp += row.fp;
        fn += row.fn;
    }
    // With every score equal, the calibrated threshold predicts everything
    // positive (the all-negative baseline has F1 = 0).
    double f1 = prf_from_counts(tp, fp, fn).f1;
    long pos = 0, total = 0;
    for (const auto& row : rows) {
        pos += row.tp + row.fn;
        total += row.n;
    }
    double prevalence = static_cast<double>(pos) / total;
    double all_positive_f1 = 2 * prevalence / (prevalence + 1.0);
    CHECK(f1 == doctest::Approx(all_positive_f1).epsilon(1e-9));
}

TEST_CASE("an always-yes judge has recall 1 and precision equal to prevalence") {
    auto pairs = separable_pairs(40);
    auto prompts = std::make_shared<const PromptLibrary>(kTemplates);
    auto backend = std::make_shared<ScriptedBackend>();
    backend->reply = "yes";
    auto scorer = make_judge_scorer(backend, prompts);
    auto rows = evaluate_method(pairs, *scorer, 0.5, 3);
    long tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& row : rows) {
        tp += row.tp;
        fp += row.fp;
        fn += row.fn;
        tn += row.tn;
    }
    CHECK(fn == 0);
    CHECK(tn == 0);
    Prf prf = prf_from_counts(tp, fp, fn);
    CHECK(prf.recall == doctest::Approx(1.0));
    CHECK(prf.precision == doctest::Approx(static_cast<double>(tp) / (tp + fp)));
}

TEST_CASE("judge evaluation works through a recorded replay cache") {
    auto pairs = separable_pairs(10);
    auto prompts = std::make_shared<const PromptLibrary>(kTemplates);

    auto cache_dir =
        (std::filesystem::temp_directory_path() / "semkg_judge_replay").string();
    std::filesystem::remove_all(cache_dir);

    // record a run against a scripted backend
    auto scripted = std::make_shared<ScriptedBackend>();
    scripted->reply = "yes";
    auto recording = std::make_shared<CachingChatBackend>(scripted, cache_dir);
    auto record_scorer = make_judge_scorer(recording, prompts);
    auto recorded_rows = evaluate_method(pairs, *record_scorer, 0.5, 3);

    // replay offline
    auto replay = std::make_shared<ReplayChatBackend>(cache_dir);
    auto replay_scorer = make_judge_scorer(replay, prompts);
    auto replayed_rows = evaluate_method(pairs, *replay_scorer, 0.5, 3);

    REQUIRE(recorded_rows.size() == replayed_rows.size());
    for (size_t i = 0; i < recorded_rows.size(); ++i) {
        CHECK(recorded_rows[i].f1 == doctest::Approx(replayed_rows[i].f1));
        CHECK(recorded_rows[i].n == replayed_rows[i].n);
    }
    std::filesystem::remove_all(cache_dir);
}

TEST_CASE("invalid judge verdicts are excluded and counted") {
    auto pairs = separable_pairs(10);
    auto prompts = std::make_shared<const PromptLibrary>(kTemplates);
    auto backend = std::make_shared<ScriptedBackend>();
    backend->reply = "cannot say";
    auto scorer = make_judge_scorer(backend, prompts);
    auto rows = evaluate_method(pairs, *scorer, 0.5, 3);
    // every response invalid: no stratum has a confusion matrix entry
    CHECK(rows.empty());
}

TEST_CASE("evaluation is invariant under pair order shuffling") {
    auto pairs = separable_pairs(30);
    auto scorer = make_rouge_scorer(1);
    auto rows_a = evaluate_method(pairs, *scorer, 0.5, 17);
    Rng rng(9);
    rng.shuffle(pairs);
    auto rows_b = evaluate_method(pairs, *scorer, 0.5, 17);
    auto key = [](const EvalRow& r) { return r.dataset + "/" + r.kind; };
    std::map<std::string, std::pair<double, long>> a, b;
    for (const auto& r : rows_a) a[key(r)] = {r.f1, r.n};
    for (const auto& r : rows_b) b[key(r)] = {r.f1, r.n};
    CHECK(a == b);
}

TEST_CASE("positives inherit the family kind for stratification") {
    auto pairs = separable_pairs(8);  // kinds cycle over families
    auto scorer = make_rouge_scorer(1);
    auto rows = evaluate_method(pairs, *scorer, 0.5, 5);
    std::set<std::string> kinds;
    for (const auto& row : rows) kinds.insert(row.kind);
    CHECK(kinds.count("unknown") == 0);
}

TEST_CASE("stratified report renders a method-by-kind matrix") {
    auto pairs = separable_pairs(40);
    auto scorer = make_rouge_scorer(1);
    auto rows = evaluate_method(pairs, *scorer, 0.5, 3);
    std::string table = stratified_report(rows);
    CHECK(table.find("rouge1") != std::string::npos);
    for (auto kind : kAllPerturbationKinds)
        CHECK(table.find(to_string(kind)) != std::string::npos);
    // cells look like "1.000 ± 0.123"
    CHECK(table.find(" ± ") != std::string::npos);
    CHECK_THROWS_AS(stratified_report({}), Error);
}

TEST_CASE("report rows serialize to one json object per line") {
    EvalRow row;
    row.method = "rouge1";
    row.dataset = "toy";
    row.kind = "node-removal";
    row.n = 10;
    row.f1 = 0.935;
    std::string json = row.to_json();
    CHECK(json.find("\"rouge1\"") != std::string::npos);
    CHECK(json.find("0.935") != std::string::npos);
}

TEST_CASE("empty inputs are rejected") {
    auto scorer = make_rouge_scorer(1);
    CHECK_THROWS_AS(evaluate_method({}, *scorer, 0.5, 1), Error);
}
