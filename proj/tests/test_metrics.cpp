#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "semkg/metrics.hpp"

using namespace semkg;

TEST_CASE("metric tokenization lowercases and strips surrounding punctuation") {
    CHECK(metric_tokens("The cat, sat.") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(metric_tokens("  ") == std::vector<std::string>{});
    CHECK(metric_tokens("''--''") == std::vector<std::string>{});
}

TEST_CASE("rouge_n on the worked pair") {
    const char* cand = "the cat sat on the mat";
    const char* ref = "the cat lay on the mat";
    CHECK(rouge_n(cand, cand, 1) == doctest::Approx(1.0));
    CHECK(rouge_n(cand, ref, 1) == doctest::Approx(5.0 / 6).epsilon(1e-9));
    CHECK(rouge_n("alpha beta", "gamma delta", 1) == 0.0);
    CHECK(rouge_n("", "the cat", 1) == 0.0);
}

TEST_CASE("rouge_l on the worked pair") {
    const char* cand = "the cat sat on the mat";
    const char* ref = "the cat lay on the mat";
    CHECK(lcs_length(metric_tokens(cand), metric_tokens(ref)) == 5);
    CHECK(rouge_l(cand, cand) == doctest::Approx(1.0));
    CHECK(rouge_l(cand, ref) == doctest::Approx(5.0 / 6).epsilon(1e-9));
    CHECK(rouge_l("", "the cat") == 0.0);
}

TEST_CASE("rouge metrics equal their brute-force oracles on random pairs") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        std::string a = oracle::random_sentence(rng, static_cast<int>(rng.next_in(1, 20)));
        std::string b = oracle::random_sentence(rng, static_cast<int>(rng.next_in(1, 20)));
        auto ta = oracle::tokens(a), tb = oracle::tokens(b);
        for (int n = 1; n <= 2; ++n)
            CHECK(rouge_n(a, b, n) == doctest::Approx(oracle::rouge_n_f1(ta, tb, n)).epsilon(1e-9));
        CHECK(rouge_l(a, b) == doctest::Approx(oracle::rouge_l_f1(ta, tb)).epsilon(1e-9));
        CHECK(lcs_length(ta, tb) == oracle::lcs(ta, tb));
    }
}

TEST_CASE("bleu basics") {
    CHECK(bleu("the cat sat on the mat", "the cat sat on the mat") == doctest::Approx(1.0));
    CHECK(bleu("ab cd", "ab cd") == doctest::Approx(1.0));  // shorter than max order
    CHECK(bleu("", "the cat") == 0.0);
    CHECK(bleu("xyz", "abc") == 0.0);
}

TEST_CASE("bleu brevity penalty for a half-length candidate") {
    // Candidate is the reference truncated to half: all clipped precisions
    // are 1, so bleu = exp(1 - |ref|/|cand|) = e^-1.
    std::string ref = "alpha beta gamma delta epsilon zeta eta theta";
    std::string cand = "alpha beta gamma delta";
    CHECK(bleu(cand, ref) == doctest::Approx(std::exp(1.0 - 2.0)).epsilon(1e-12));
}

TEST_CASE("bleu stays within [0,1] and rewards exact matches most") {
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        std::string a = oracle::random_sentence(rng, static_cast<int>(rng.next_in(1, 15)));
        std::string b = oracle::random_sentence(rng, static_cast<int>(rng.next_in(1, 15)));
        double v = bleu(a, b);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
        CHECK(bleu(a, a) == doctest::Approx(1.0));
    }
}

TEST_CASE("cosine") {
    std::vector<double> u{1, 0}, v{1, 1}, z{0, 0};
    CHECK(cosine(u, u) == doctest::Approx(1.0));
    CHECK(cosine(u, {0, 1}) == doctest::Approx(0.0));
    CHECK(cosine(u, v) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-9));
    CHECK_THROWS_AS(cosine(u, z), Error);
    CHECK_THROWS_AS(cosine(u, {1, 2, 3}), Error);
    CHECK_THROWS_AS(cosine({}, {}), Error);
}
