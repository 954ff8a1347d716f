#pragma once

#include <string>
#include <vector>

#include "semkg/gateway.hpp"
#include "semkg/kg.hpp"

namespace semkg {

// JSON array of {source_node:{name}, relation:{name}, target_node:{name}}
// records — the record shape the prompt templates are written around.
std::string serialize_prompt_triples(const std::vector<Triple>& triples);
std::vector<Triple> parse_prompt_triples(const std::string& json_array_text);
std::string serialize_prompt_list(const std::vector<std::string>& items);

// Loads prompt assets from a templates directory:
//   <dir>/<dataset_id>/{generation,entity,kg}.txt  and  <dir>/judge.txt
// Assets contain <<placeholder>> slots; rendering is pure text substitution,
// so identical inputs produce byte-identical prompts. Generation and
// extraction prompts carry temperature 1.0, judge prompts 0.0.
class PromptLibrary {
public:
    explicit PromptLibrary(std::string templates_dir);

    std::vector<std::string> registered_datasets() const;
    bool has_dataset(const std::string& dataset_id) const;

    ChatRequest render_generation_prompt(const std::string& dataset_id,
                                         const std::vector<Triple>& triples) const;
    ChatRequest render_entity_prompt(const std::string& dataset_id, const std::string& statement,
                                     const std::vector<std::string>& entity_types) const;
    ChatRequest render_kg_prompt(const std::string& dataset_id, const std::string& statement,
                                 const std::vector<std::string>& entities,
                                 const std::vector<std::string>& relations) const;
    ChatRequest render_judge_prompt(const std::string& statement_1,
                                    const std::string& statement_2) const;

private:
    std::string asset(const std::string& dataset_id, const std::string& which) const;
    std::string templates_dir_;
};

}  // namespace semkg
