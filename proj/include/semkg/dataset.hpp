#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semkg/perturb.hpp"
#include "semkg/rng.hpp"

namespace semkg {

// A generated verbalization, tied to its source subgraph. `original_index`
// numbers the originals within one subgraph family; perturbed statements
// carry the family's perturbation kind instead.
struct Statement {
    std::string id;
    std::string subgraph_id;
    std::string dataset_name;
    std::string text;
    bool perturbed = false;
    int original_index = 0;                        // meaningful when !perturbed
    std::optional<PerturbationKind> kind;          // meaningful when perturbed
    bool validated = false;
    int word_count = 0;                            // whitespace tokens

    static Statement make(std::string id, std::string subgraph_id, std::string dataset_name,
                          std::string text, bool perturbed, int original_index,
                          std::optional<PerturbationKind> kind);
    std::string to_json() const;
    static Statement from_json(const std::string& line, long line_no = -1);
};

int count_words(const std::string& text);

struct StatementPair {
    std::string dataset_name;
    std::optional<PerturbationKind> perturbation_kind;  // present iff label == 0
    std::string statement_1;
    std::string statement_2;
    int label = 0;  // 1 = semantically similar, 0 = dissimilar
    std::string subgraph_id;

    // Stable identity used for split membership; independent of file order.
    std::string pair_key() const;
    void check_invariants() const;  // label/kind coupling
};

struct AssembleResult {
    std::vector<StatementPair> pairs;
    std::vector<std::string> skipped_subgraphs;  // <2 originals or 0 perturbed
};

// Per eligible subgraph: one positive pair from the two lowest-index
// validated originals, one negative pair from a uniformly chosen validated
// original and the perturbed statement. Output is sorted by subgraph id, so
// label balance is exactly 50/50 and reruns are byte-identical.
AssembleResult assemble_pairs(const std::vector<Statement>& statements, Rng& rng);

struct SplitResult {
    std::vector<StatementPair> validation;
    std::vector<StatementPair> test;
};

// Stratified by (label, perturbation kind, dataset); membership depends only
// on pair identity and seed, not input order. Throws naming any stratum with
// fewer than 2 pairs.
SplitResult split(const std::vector<StatementPair>& pairs, double validation_fraction,
                  uint64_t seed);

// Node/edge counts of one subgraph family, for corpus statistics.
struct SubgraphShape {
    std::string subgraph_id;
    std::optional<PerturbationKind> kind;
    size_t original_nodes = 0;
    size_t original_edges = 0;
    size_t perturbed_nodes = 0;
    size_t perturbed_edges = 0;
};

struct CorpusStatsRow {
    std::string dataset;
    std::string kind;
    size_t statement_count = 0;
    double mean_word_count = 0.0;
    double mean_subgraph_nodes = 0.0;
    double mean_subgraph_edges = 0.0;
    double mean_perturbed_nodes = 0.0;
    double mean_perturbed_edges = 0.0;
};

std::vector<CorpusStatsRow> corpus_stats(const std::vector<Statement>& statements,
                                         const std::vector<SubgraphShape>& shapes);
std::string render_corpus_stats(const std::vector<CorpusStatsRow>& rows);

struct ReadabilityScores {
    double flesch = 0.0;
    double fk_grade = 0.0;
    double gunning_fog = 0.0;
    double ttr = 0.0;
    double lexical_density = 0.0;
};

// Deterministic vowel-group syllable heuristic with a silent-e adjustment;
// shared by the readability formulas and their tests.
int syllable_count(const std::string& word);
ReadabilityScores readability(const std::string& text);

void write_pairs(const std::vector<StatementPair>& pairs, const std::string& path);
std::vector<StatementPair> read_pairs(const std::string& path);
// Import adapter: external field name -> our field name is given explicitly
// instead of guessed (e.g. {{"sentence1", "statement_1"}}).
std::vector<StatementPair> read_pairs_mapped(const std::string& path,
                                             const std::map<std::string, std::string>& mapping);

void write_statements(const std::vector<Statement>& statements, const std::string& path);
std::vector<Statement> read_statements(const std::string& path);

}  // namespace semkg
