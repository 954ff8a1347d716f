#include "semkg/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace semkg {

std::string serialize_prompt_triples(const std::vector<Triple>& triples) {
    std::string out = "[\n";
    for (const auto& t : triples) {
        nlohmann::json rec{{"source_node", {{"name", t.source.name}}},
                           {"relation", {{"name", t.relation}}},
                           {"target_node", {{"name", t.target.name}}}};
        out += "    " + rec.dump() + ",\n";
    }
    out += "]";
    return out;
}

std::vector<Triple> parse_prompt_triples(const std::string& json_array_text) {
    // Tolerate the trailing comma our own serializer emits.
    std::string cleaned = json_array_text;
    size_t close = cleaned.rfind(']');
    if (close != std::string::npos) {
        size_t last = cleaned.find_last_not_of(" \t\r\n", close - 1);
        if (last != std::string::npos && cleaned[last] == ',') cleaned.erase(last, 1);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(cleaned);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("triple list: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("triple list: expected a JSON array");
    std::vector<Triple> triples;
    for (const auto& rec : j) {
        try {
            triples.push_back(
                Triple{{rec.at("source_node").at("name").get<std::string>(),
                        rec.at("source_node").value("type", "")},
                       rec.at("relation").at("name").get<std::string>(),
                       {rec.at("target_node").at("name").get<std::string>(),
                        rec.at("target_node").value("type", "")}});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("triple record: ") + e.what());
        }
    }
    return triples;
}

std::string serialize_prompt_list(const std::vector<std::string>& items) {
    return nlohmann::json(items).dump();
}

namespace {

std::string read_asset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing prompt asset " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string substitute(std::string text, const std::string& placeholder,
                       const std::string& value) {
    std::string slot = "<<" + placeholder + ">>";
    size_t pos = text.find(slot);
    if (pos == std::string::npos)
        throw ConfigError("prompt asset lacks <<" + placeholder + ">> slot");
    while (pos != std::string::npos) {
        text.replace(pos, slot.size(), value);
        pos = text.find(slot, pos + value.size());
    }
    return text;
}

ChatRequest one_user_message(std::string prompt, double temperature) {
    ChatRequest req;
    req.messages.push_back({"user", std::move(prompt)});
    req.temperature = temperature;
    req.validate();
    return req;
}

}  // namespace

PromptLibrary::PromptLibrary(std::string templates_dir)
    : templates_dir_(std::move(templates_dir)) {
    if (!std::filesystem::is_directory(templates_dir_))
        throw ConfigError("templates directory not found: " + templates_dir_);
}

std::vector<std::string> PromptLibrary::registered_datasets() const {
    std::vector<std::string> ids;
    for (const auto& entry : std::filesystem::directory_iterator(templates_dir_)) {
        if (entry.is_directory() &&
            std::filesystem::exists(entry.path() / "generation.txt"))
            ids.push_back(entry.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

bool PromptLibrary::has_dataset(const std::string& dataset_id) const {
    return std::filesystem::exists(std::filesystem::path(templates_dir_) / dataset_id /
                                   "generation.txt");
}

std::string PromptLibrary::asset(const std::string& dataset_id, const std::string& which) const {
    if (!has_dataset(dataset_id)) {
        std::string known;
        for (const auto& id : registered_datasets()) known += (known.empty() ? "" : ", ") + id;
        throw ConfigError("unknown dataset \"" + dataset_id + "\"; registered: " + known);
    }
    return read_asset(templates_dir_ + "/" + dataset_id + "/" + which + ".txt");
}

ChatRequest PromptLibrary::render_generation_prompt(const std::string& dataset_id,
                                                    const std::vector<Triple>& triples) const {
    if (triples.empty()) throw ConfigError("render_generation_prompt: no triples");
    std::string text = substitute(asset(dataset_id, "generation"), "triples",
                                  serialize_prompt_triples(triples));
    return one_user_message(std::move(text), 1.0);
}

ChatRequest PromptLibrary::render_entity_prompt(
    const std::string& dataset_id, const std::string& statement,
    const std::vector<std::string>& entity_types) const {
    if (entity_types.empty()) throw ConfigError("render_entity_prompt: no entity types");
    std::string text = asset(dataset_id, "entity");
    text = substitute(std::move(text), "entity_types", serialize_prompt_list(entity_types));
    text = substitute(std::move(text), "statement", statement);
    return one_user_message(std::move(text), 1.0);
}

ChatRequest PromptLibrary::render_kg_prompt(const std::string& dataset_id,
                                            const std::string& statement,
                                            const std::vector<std::string>& entities,
                                            const std::vector<std::string>& relations) const {
    if (entities.empty()) throw ConfigError("render_kg_prompt: no entities");
    if (relations.empty()) throw ConfigError("render_kg_prompt: no relations");
    std::string text = asset(dataset_id, "kg");
    text = substitute(std::move(text), "relations", serialize_prompt_list(relations));
    text = substitute(std::move(text), "entities", serialize_prompt_list(entities));
    text = substitute(std::move(text), "statement", statement);
    return one_user_message(std::move(text), 1.0);
}

ChatRequest PromptLibrary::render_judge_prompt(const std::string& statement_1,
                                               const std::string& statement_2) const {
    if (statement_1.empty() || statement_2.empty())
        throw ConfigError("render_judge_prompt: statements must be non-empty");
    std::string text = read_asset(templates_dir_ + "/judge.txt");
    text = substitute(std::move(text), "statement_1", statement_1);
    text = substitute(std::move(text), "statement_2", statement_2);
    return one_user_message(std::move(text), 0.0);
}

}  // namespace semkg
