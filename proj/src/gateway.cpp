#include "semkg/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "semkg/metrics.hpp"
#include "semkg/normalize.hpp"
#include "semkg/prompts.hpp"
#include "semkg/rng.hpp"
#include "semkg/text_template.hpp"

namespace semkg {

void ChatRequest::validate() const {
    bool has_user = false;
    for (const auto& m : messages) {
        if (m.role != "system" && m.role != "user" && m.role != "assistant")
            throw ConfigError("chat request: unknown role \"" + m.role + "\"");
        if (m.role == "user") has_user = true;
    }
    if (!has_user) throw ConfigError("chat request: needs at least one user message");
    if (!std::isfinite(temperature) || temperature < 0.0)
        throw ConfigError("chat request: temperature must be finite and >= 0");
}

std::string ChatRequest::canonical() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json j{{"messages", msgs}, {"temperature", temperature}, {"model", model_id}};
    if (max_tokens) j["max_tokens"] = *max_tokens;
    return j.dump();
}

uint64_t ChatRequest::hash() const { return fnv1a64(canonical()); }

std::string chat_with_retry(ChatBackend& backend, const ChatRequest& request,
                            const RetryPolicy& policy) {
    if (policy.max_attempts < 1) throw ConfigError("retry policy: max_attempts must be >= 1");
    std::string last_cause;
    for (int attempt = 0; attempt < policy.max_attempts; ++attempt) {
        try {
            return backend.complete(request);
        } catch (const TransportError& e) {
            last_cause = e.what();
            if (attempt + 1 < policy.max_attempts && policy.sleep)
                std::this_thread::sleep_for(policy.backoff_base * (1LL << attempt));
        }
    }
    throw TransportError("chat failed after " + std::to_string(policy.max_attempts) +
                         " attempts; last: " + last_cause);
}

std::string extract_first_json_object(const std::string& completion) {
    size_t start = completion.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        for (size_t i = start; i < completion.size(); ++i) {
            char c = completion[i];
            if (in_string) {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            if (c == '{') ++depth;
            if (c == '}') {
                --depth;
                if (depth == 0) {
                    std::string body = completion.substr(start, i - start + 1);
                    if (nlohmann::json::accept(body)) return body;
                    break;  // not valid JSON; try the next opening brace
                }
            }
        }
        start = completion.find('{', start + 1);
    }
    throw ParseError("completion contains no JSON object");
}

// -------------------------------------------------------- template backend

namespace {

std::string prompt_text(const ChatRequest& request) {
    std::string text;
    for (const auto& m : request.messages) {
        if (!text.empty()) text += '\n';
        text += m.content;
    }
    return text;
}

std::string after_marker(const std::string& text, const std::string& marker) {
    size_t pos = text.rfind(marker);
    if (pos == std::string::npos)
        throw ParseError("template backend: marker \"" + marker + "\" not found");
    std::string rest = text.substr(pos + marker.size());
    size_t b = rest.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = rest.find_last_not_of(" \t\r\n");
    return rest.substr(b, e - b + 1);
}

// The statement sits on a single line after the marker.
std::string line_after_marker(const std::string& text, const std::string& marker) {
    std::string rest = after_marker(text, marker);
    size_t eol = rest.find('\n');
    if (eol != std::string::npos) rest = rest.substr(0, eol);
    size_t e = rest.find_last_not_of(" \t\r");
    return e == std::string::npos ? "" : rest.substr(0, e + 1);
}

}  // namespace

std::string TemplateChatBackend::complete(const ChatRequest& request) {
    request.validate();
    std::string prompt = prompt_text(request);

    if (prompt.find("'triples'") != std::string::npos) {  // KG extraction
        std::string statement = line_after_marker(prompt, "Statement:");
        auto triples = template_extract(statement);
        nlohmann::json records = nlohmann::json::array();
        for (const auto& t : triples)
            records.push_back({{"source_node", {{"name", t.source.name}}},
                               {"relation", {{"name", t.relation}}},
                               {"target_node", {{"name", t.target.name}}}});
        return nlohmann::json{{"triples", records}}.dump();
    }
    if (prompt.find("'entities'") != std::string::npos) {  // entity extraction
        std::string statement = line_after_marker(prompt, "Statement:");
        auto triples = template_extract(statement);
        std::vector<std::string> entities;
        std::set<std::string> seen;
        for (const auto& t : triples) {
            if (seen.insert(t.source.name).second) entities.push_back(t.source.name);
            if (seen.insert(t.target.name).second) entities.push_back(t.target.name);
        }
        nlohmann::json j{{"entities", entities}};
        return j.dump();
    }
    if (prompt.find("Your answer:") != std::string::npos) {  // judge
        std::string s1 = line_after_marker(prompt, "Statement 1:");
        std::string s2 = line_after_marker(prompt, "Statement 2:");
        try {
            auto t1 = template_extract(s1);
            auto t2 = template_extract(s2);
            std::set<NormalizedTriple> n1, n2;
            for (const auto& t : t1) n1.insert(normalize_triple(t));
            for (const auto& t : t2) n2.insert(normalize_triple(t));
            return n1 == n2 ? "yes" : "no";
        } catch (const ParseError&) {
            return "no";  // statements outside the grammar never match exactly
        }
    }
    if (prompt.find("Triples:") != std::string::npos) {  // generation
        std::string payload = after_marker(prompt, "Triples:");
        return template_generate(parse_prompt_triples(payload), 0);
    }
    throw ParseError("template backend: unrecognized prompt shape");
}

// ----------------------------------------------------------- cache backends

namespace {

std::string cache_path(const std::string& dir, uint64_t key) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(key));
    return dir + "/" + buf + ".txt";
}

std::optional<std::string> read_file_if_exists(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

}  // namespace

ReplayChatBackend::ReplayChatBackend(std::string cache_dir) : cache_dir_(std::move(cache_dir)) {}

std::string ReplayChatBackend::complete(const ChatRequest& request) {
    request.validate();
    auto hit = read_file_if_exists(cache_path(cache_dir_, request.hash()));
    if (!hit) throw TransportError("replay cache miss in " + cache_dir_);
    return *hit;
}

CachingChatBackend::CachingChatBackend(std::shared_ptr<ChatBackend> inner, std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    std::filesystem::create_directories(cache_dir_);
}

std::string CachingChatBackend::complete(const ChatRequest& request) {
    std::string path = cache_path(cache_dir_, request.hash());
    if (auto hit = read_file_if_exists(path)) return *hit;
    std::string completion = inner_->complete(request);
    {
        std::lock_guard<std::mutex> lock(write_mutex_);
        atomic_write(path, completion);
    }
    return completion;
}

// ------------------------------------------------------------- api backend

ApiChatBackend::ApiChatBackend()
    : ApiChatBackend(env_or("SEMKG_API_BASE", ""), env_or("SEMKG_API_KEY", "")) {}

ApiChatBackend::ApiChatBackend(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
    if (base_url_.empty())
        throw ConfigError("api backend: set SEMKG_API_BASE (and SEMKG_API_KEY)");
}

namespace {

nlohmann::json post_json(const std::string& base_url, const std::string& api_key,
                         const std::string& path, const nlohmann::json& body) {
    httplib::Client client(base_url);
    client.set_connection_timeout(15);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw TransportError("POST " + path + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw TransportError("POST " + path + ": HTTP " + std::to_string(res->status) + " " +
                             res->body.substr(0, 200));
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("api response: ") + e.what());
    }
}

}  // namespace

std::string ApiChatBackend::complete(const ChatRequest& request) {
    request.validate();
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : request.messages)
        msgs.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json body{{"model", request.model_id},
                        {"messages", msgs},
                        {"temperature", request.temperature}};
    if (request.max_tokens) body["max_tokens"] = *request.max_tokens;

    nlohmann::json res = post_json(base_url_, api_key_, "/chat/completions", body);
    try {
        return res.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("api response shape: ") + e.what());
    }
}

// -------------------------------------------------------------- embeddings

HashEmbeddingBackend::HashEmbeddingBackend(size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw ConfigError("hash embedding: dimension must be positive");
}

std::vector<double> HashEmbeddingBackend::embed(const std::string& text) {
    std::vector<double> vec(dimension_, 0.0);
    for (const auto& token : metric_tokens(text)) {
        uint64_t h = fnv1a64(token);
        size_t bucket = h % dimension_;
        double sign = (h >> 63) ? -1.0 : 1.0;
        vec[bucket] += sign;
    }
    double norm = 0.0;
    for (double v : vec) norm += v * v;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : vec) v /= norm;
    } else {
        vec[0] = 1.0;  // empty text still embeds to a valid unit vector
    }
    return vec;
}

ApiEmbeddingBackend::ApiEmbeddingBackend(std::string model_id)
    : ApiEmbeddingBackend(env_or("SEMKG_API_BASE", ""), env_or("SEMKG_API_KEY", ""),
                          std::move(model_id)) {}

ApiEmbeddingBackend::ApiEmbeddingBackend(std::string base_url, std::string api_key,
                                         std::string model_id)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
      model_id_(std::move(model_id)) {
    if (base_url_.empty())
        throw ConfigError("api embedding backend: set SEMKG_API_BASE (and SEMKG_API_KEY)");
}

std::vector<double> ApiEmbeddingBackend::embed(const std::string& text) {
    nlohmann::json body{{"model", model_id_}, {"input", text}};
    nlohmann::json res = post_json(base_url_, api_key_, "/embeddings", body);
    try {
        auto vec = res.at("data").at(0).at("embedding").get<std::vector<double>>();
        if (dimension_ == 0) dimension_ = vec.size();
        if (vec.size() != dimension_)
            throw ParseError("embedding dimension changed mid-session");
        return vec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("embedding response shape: ") + e.what());
    }
}

CachedEmbeddingBackend::CachedEmbeddingBackend(std::shared_ptr<EmbeddingBackend> inner,
                                               std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    std::filesystem::create_directories(cache_dir_);
}

std::vector<double> CachedEmbeddingBackend::embed(const std::string& text) {
    uint64_t key = fnv1a64(inner_->model_id() + "\n" + text);
    std::string path = cache_path(cache_dir_, key);
    if (auto hit = read_file_if_exists(path)) {
        try {
            return nlohmann::json::parse(*hit).get<std::vector<double>>();
        } catch (const nlohmann::json::exception&) {
            // fall through and refresh a corrupt entry
        }
    }
    std::vector<double> vec = inner_->embed(text);
    {
        std::lock_guard<std::mutex> lock(write_mutex_);
        atomic_write(path, nlohmann::json(vec).dump());
    }
    return vec;
}

}  // namespace semkg
