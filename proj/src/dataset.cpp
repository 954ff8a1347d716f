#include "semkg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semkg/metrics.hpp"
#include "semkg/normalize.hpp"

namespace semkg {

int count_words(const std::string& text) {
    std::stringstream ss(text);
    std::string w;
    int n = 0;
    while (ss >> w) ++n;
    return n;
}

Statement Statement::make(std::string id, std::string subgraph_id, std::string dataset_name,
                          std::string text, bool perturbed, int original_index,
                          std::optional<PerturbationKind> kind) {
    Statement s;
    s.id = std::move(id);
    s.subgraph_id = std::move(subgraph_id);
    s.dataset_name = std::move(dataset_name);
    s.word_count = count_words(text);
    s.text = std::move(text);
    s.perturbed = perturbed;
    s.original_index = original_index;
    s.kind = kind;
    return s;
}

std::string Statement::to_json() const {
    nlohmann::json j{{"id", id},
                     {"subgraph_id", subgraph_id},
                     {"dataset_name", dataset_name},
                     {"text", text},
                     {"validated", validated},
                     {"word_count", word_count}};
    if (perturbed)
        j["perturbation_kind"] = to_string(*kind);
    else
        j["original_index"] = original_index;
    return j.dump();
}

Statement Statement::from_json(const std::string& line, long line_no) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad statement record: ") + e.what(), line_no);
    }
    try {
        Statement s;
        s.id = j.at("id").get<std::string>();
        s.subgraph_id = j.at("subgraph_id").get<std::string>();
        s.dataset_name = j.value("dataset_name", "");
        s.text = j.at("text").get<std::string>();
        s.validated = j.value("validated", false);
        s.word_count = j.value("word_count", count_words(s.text));
        if (j.contains("perturbation_kind")) {
            s.perturbed = true;
            s.kind = perturbation_kind_from_string(j["perturbation_kind"].get<std::string>());
        } else {
            s.perturbed = false;
            s.original_index = j.value("original_index", 0);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad statement record: ") + e.what(), line_no);
    }
}

// ------------------------------------------------------------------- pairs

std::string StatementPair::pair_key() const {
    return subgraph_id + "\x1f" + std::to_string(label) + "\x1f" +
           std::to_string(fnv1a64(statement_1 + "\x1f" + statement_2));
}

void StatementPair::check_invariants() const {
    if (label != 0 && label != 1) throw Error("pair: label must be 0 or 1");
    if (label == 1 && perturbation_kind)
        throw Error("pair: positive pair must not carry a perturbation kind");
    if (label == 0 && !perturbation_kind)
        throw Error("pair: negative pair must carry a perturbation kind");
}

AssembleResult assemble_pairs(const std::vector<Statement>& statements, Rng& rng) {
    std::map<std::string, std::vector<const Statement*>> families;
    for (const auto& s : statements)
        if (s.validated) families[s.subgraph_id].push_back(&s);

    AssembleResult result;
    for (const auto& [subgraph_id, members] : families) {
        std::vector<const Statement*> originals, perturbed;
        for (const Statement* s : members)
            (s->perturbed ? perturbed : originals).push_back(s);
        std::sort(originals.begin(), originals.end(),
                  [](const Statement* a, const Statement* b) {
                      return a->original_index < b->original_index;
                  });
        if (originals.size() < 2 || perturbed.empty()) {
            result.skipped_subgraphs.push_back(subgraph_id);
            continue;
        }

        const Statement& pert = *perturbed.front();
        StatementPair positive{originals[0]->dataset_name, std::nullopt, originals[0]->text,
                               originals[1]->text, 1, subgraph_id};
        const Statement& anchor = *originals[rng.next_below(originals.size())];
        StatementPair negative{anchor.dataset_name, pert.kind, anchor.text, pert.text, 0,
                               subgraph_id};
        positive.check_invariants();
        negative.check_invariants();
        result.pairs.push_back(std::move(positive));
        result.pairs.push_back(std::move(negative));
    }
    return result;
}

SplitResult split(const std::vector<StatementPair>& pairs, double validation_fraction,
                  uint64_t seed) {
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw ConfigError("split: validation_fraction must be in (0, 1)");

    std::map<std::string, std::vector<size_t>> strata;
    for (size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        std::string key = std::to_string(p.label) + "\x1f" +
                          (p.perturbation_kind ? to_string(*p.perturbation_kind) : "-") +
                          "\x1f" + p.dataset_name;
        strata[key].push_back(i);
    }

    SplitResult out;
    // Rounding carry flows across strata (processed in sorted key order) so
    // the overall split hits the requested fraction exactly when it can,
    // while each stratum stays within one pair of its own target.
    double carry = 0.0;
    for (auto& [key, members] : strata) {
        if (members.size() < 2) throw Error("split: stratum too small: " + key);
        // Membership keys on pair identity, not file position.
        std::sort(members.begin(), members.end(), [&](size_t a, size_t b) {
            return pairs[a].pair_key() < pairs[b].pair_key();
        });
        Rng stratum_rng(fnv1a64(key, seed ^ 0x5851f42d4c957f2dULL));
        stratum_rng.shuffle(members);
        double exact = validation_fraction * static_cast<double>(members.size()) + carry;
        auto n_val = static_cast<size_t>(std::llround(exact));
        n_val = std::min(std::max<size_t>(n_val, 1), members.size() - 1);
        carry = exact - static_cast<double>(n_val);
        for (size_t i = 0; i < members.size(); ++i)
            (i < n_val ? out.validation : out.test).push_back(pairs[members[i]]);
    }
    return out;
}

// ------------------------------------------------------------------- stats

std::vector<CorpusStatsRow> corpus_stats(const std::vector<Statement>& statements,
                                         const std::vector<SubgraphShape>& shapes) {
    if (statements.empty()) throw Error("corpus_stats: no statements");
    std::map<std::string, const SubgraphShape*> by_id;
    for (const auto& sh : shapes) by_id[sh.subgraph_id] = &sh;

    struct Acc {
        size_t statements = 0;
        double words = 0;
        std::set<std::string> subgraphs;
        double nodes = 0, edges = 0, pnodes = 0, pedges = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> groups;
    for (const auto& s : statements) {
        auto it = by_id.find(s.subgraph_id);
        std::string kind = "-";
        if (s.perturbed && s.kind)
            kind = to_string(*s.kind);
        else if (it != by_id.end() && it->second->kind)
            kind = to_string(*it->second->kind);
        Acc& acc = groups[{s.dataset_name, kind}];
        ++acc.statements;
        acc.words += s.word_count;
        if (it != by_id.end() && acc.subgraphs.insert(s.subgraph_id).second) {
            acc.nodes += static_cast<double>(it->second->original_nodes);
            acc.edges += static_cast<double>(it->second->original_edges);
            acc.pnodes += static_cast<double>(it->second->perturbed_nodes);
            acc.pedges += static_cast<double>(it->second->perturbed_edges);
        }
    }

    std::vector<CorpusStatsRow> rows;
    for (const auto& [key, acc] : groups) {
        CorpusStatsRow row;
        row.dataset = key.first;
        row.kind = key.second;
        row.statement_count = acc.statements;
        row.mean_word_count = acc.words / static_cast<double>(acc.statements);
        if (!acc.subgraphs.empty()) {
            auto n = static_cast<double>(acc.subgraphs.size());
            row.mean_subgraph_nodes = acc.nodes / n;
            row.mean_subgraph_edges = acc.edges / n;
            row.mean_perturbed_nodes = acc.pnodes / n;
            row.mean_perturbed_edges = acc.pedges / n;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string render_corpus_stats(const std::vector<CorpusStatsRow>& rows) {
    std::ostringstream out;
    out << "dataset, perturbation, statements, avg word count, avg nodes, avg edges, "
           "avg perturbed nodes, avg perturbed edges\n";
    for (const auto& r : rows) {
        out << r.dataset << ", " << r.kind << ", " << r.statement_count << ", ";
        out.setf(std::ios::fixed);
        out.precision(2);
        out << r.mean_word_count << ", " << r.mean_subgraph_nodes << ", "
            << r.mean_subgraph_edges << ", " << r.mean_perturbed_nodes << ", "
            << r.mean_perturbed_edges << "\n";
        out.unsetf(std::ios::fixed);
    }
    return out.str();
}

// ------------------------------------------------------------- readability

int syllable_count(const std::string& word) {
    std::string w;
    for (char raw : word) {
        auto c = static_cast<unsigned char>(raw);
        if (std::isalpha(c)) w.push_back(static_cast<char>(std::tolower(c)));
    }
    if (w.empty()) return 1;
    auto vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
    };
    int groups = 0;
    bool in_group = false;
    for (char c : w) {
        if (vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    // Final silent e ("make"), but not in an -le cluster ("table").
    if (groups > 1 && w.back() == 'e' && !w.ends_with("le")) --groups;
    return std::max(groups, 1);
}

ReadabilityScores readability(const std::string& text) {
    int sentences = 0;
    bool in_terminator = false;
    for (char c : text) {
        bool term = c == '.' || c == '!' || c == '?';
        if (term && !in_terminator) ++sentences;
        in_terminator = term;
    }
    if (sentences == 0) sentences = 1;  // whole text treated as one sentence

    std::vector<std::string> tokens = metric_tokens(text);
    if (tokens.empty()) throw Error("readability: text has no words");

    int syllables = 0, complex_words = 0, content_words = 0;
    std::set<std::string> distinct;
    for (const auto& tok : tokens) {
        int s = syllable_count(tok);
        syllables += s;
        if (s >= 3) ++complex_words;
        if (!is_stopword(tok)) ++content_words;
        distinct.insert(tok);
    }

    double words = static_cast<double>(tokens.size());
    double wps = words / sentences;
    double spw = syllables / words;

    ReadabilityScores scores;
    scores.flesch = 206.835 - 1.015 * wps - 84.6 * spw;
    scores.fk_grade = 0.39 * wps + 11.8 * spw - 15.59;
    scores.gunning_fog = 0.4 * (wps + 100.0 * complex_words / words);
    scores.ttr = static_cast<double>(distinct.size()) / words;
    scores.lexical_density = content_words / words;
    return scores;
}

// --------------------------------------------------------------------- io

namespace {

nlohmann::json pair_to_json(const StatementPair& p) {
    nlohmann::json j{{"dataset_name", p.dataset_name},
                     {"statement_1", p.statement_1},
                     {"statement_2", p.statement_2},
                     {"label", p.label},
                     {"subgraph_id", p.subgraph_id}};
    if (p.perturbation_kind) j["perturbation_type"] = to_string(*p.perturbation_kind);
    return j;
}

StatementPair pair_from_json(const nlohmann::json& j, long line_no) {
    StatementPair p;
    try {
        p.dataset_name = j.value("dataset_name", "");
        p.statement_1 = j.at("statement_1").get<std::string>();
        p.statement_2 = j.at("statement_2").get<std::string>();
        if (j.at("label").is_string())
            p.label = std::stoi(j.at("label").get<std::string>());
        else
            p.label = j.at("label").get<int>();
        p.subgraph_id = j.value("subgraph_id", "");
        if (j.contains("perturbation_type") && !j["perturbation_type"].is_null()) {
            std::string kind = j["perturbation_type"].get<std::string>();
            if (!kind.empty()) p.perturbation_kind = perturbation_kind_from_string(kind);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad pair record: ") + e.what(), line_no);
    } catch (const std::invalid_argument&) {
        throw ParseError("bad pair record: non-numeric label", line_no);
    }
    try {
        p.check_invariants();
    } catch (const Error& e) {
        throw ParseError(e.what(), line_no);
    }
    return p;
}

}  // namespace

void write_pairs(const std::vector<StatementPair>& pairs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& p : pairs) {
        p.check_invariants();
        out << pair_to_json(p).dump() << "\n";
    }
}

std::vector<StatementPair> read_pairs(const std::string& path) {
    return read_pairs_mapped(path, {});
}

std::vector<StatementPair> read_pairs_mapped(const std::string& path,
                                             const std::map<std::string, std::string>& mapping) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<StatementPair> pairs;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad pair record: ") + e.what(), line_no);
        }
        if (!mapping.empty()) {
            nlohmann::json renamed = j;
            for (const auto& [external, ours] : mapping) {
                if (j.contains(external)) {
                    renamed[ours] = j[external];
                    if (ours != external) renamed.erase(external);
                }
            }
            j = renamed;
        }
        pairs.push_back(pair_from_json(j, line_no));
    }
    return pairs;
}

void write_statements(const std::vector<Statement>& statements, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& s : statements) out << s.to_json() << "\n";
}

std::vector<Statement> read_statements(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Statement> statements;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        statements.push_back(Statement::from_json(line, line_no));
    }
    return statements;
}

}  // namespace semkg
