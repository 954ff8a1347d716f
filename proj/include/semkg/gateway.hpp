#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "semkg/errors.hpp"

namespace semkg {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::string model_id;
    std::optional<int> max_tokens;

    void validate() const;        // at least one user message, finite temperature
    std::string canonical() const;  // stable serialization, used for cache keys
    uint64_t hash() const;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Returns the completion text, or throws TransportError (retryable) /
    // ParseError (malformed response).
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string name() const = 0;
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual size_t dimension() const = 0;
    virtual std::string model_id() const = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{200};
    bool sleep = true;  // tests disable the actual waiting
};

// Retries transport errors with exponential backoff; anything else
// propagates immediately. On exhaustion throws TransportError carrying the
// attempt count and last cause.
std::string chat_with_retry(ChatBackend& backend, const ChatRequest& request,
                            const RetryPolicy& policy);

// Models wrap structured output in prose; this pulls out the first balanced
// top-level JSON object. Throws ParseError when there is none.
std::string extract_first_json_object(const std::string& completion);

// Offline deterministic backend. Recognizes the four rendered prompt shapes
// and answers them from the template grammar: generation prompts get a
// verbalization, extraction prompts get re-parsed structured output, judge
// prompts get yes/no by normalized-triple equality of the two statements.
class TemplateChatBackend : public ChatBackend {
public:
    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return "template"; }
};

// Read-only cache lookups; a miss is a transport error.
class ReplayChatBackend : public ChatBackend {
public:
    explicit ReplayChatBackend(std::string cache_dir);
    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return "replay"; }

private:
    std::string cache_dir_;
};

// Read-through cache around another backend. Reads are lock-free; writes are
// serialized and atomic (write-temp-then-rename).
class CachingChatBackend : public ChatBackend {
public:
    CachingChatBackend(std::shared_ptr<ChatBackend> inner, std::string cache_dir);
    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return inner_->name() + "+cache"; }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::string cache_dir_;
    std::mutex write_mutex_;
};

// Chat-completions wire API. Base URL and key come from SEMKG_API_BASE and
// SEMKG_API_KEY unless given explicitly.
class ApiChatBackend : public ChatBackend {
public:
    ApiChatBackend();  // from environment
    ApiChatBackend(std::string base_url, std::string api_key);
    std::string complete(const ChatRequest& request) override;
    std::string name() const override { return "api"; }

private:
    std::string base_url_;
    std::string api_key_;
};

// Deterministic offline embeddings: token counts feature-hashed into a fixed
// number of signed buckets. Not a semantic model; exists so the cosine
// scorer path is exercisable without network access.
class HashEmbeddingBackend : public EmbeddingBackend {
public:
    explicit HashEmbeddingBackend(size_t dimension = 256);
    std::vector<double> embed(const std::string& text) override;
    size_t dimension() const override { return dimension_; }
    std::string model_id() const override { return "hash-" + std::to_string(dimension_); }

private:
    size_t dimension_;
};

class ApiEmbeddingBackend : public EmbeddingBackend {
public:
    explicit ApiEmbeddingBackend(std::string model_id);
    ApiEmbeddingBackend(std::string base_url, std::string api_key, std::string model_id);
    std::vector<double> embed(const std::string& text) override;
    size_t dimension() const override { return dimension_; }
    std::string model_id() const override { return model_id_; }

private:
    std::string base_url_;
    std::string api_key_;
    std::string model_id_;
    size_t dimension_ = 0;  // learned from the first response
};

// Persistent vector cache keyed by text hash; reruns are free and offline.
class CachedEmbeddingBackend : public EmbeddingBackend {
public:
    CachedEmbeddingBackend(std::shared_ptr<EmbeddingBackend> inner, std::string cache_dir);
    std::vector<double> embed(const std::string& text) override;
    size_t dimension() const override { return inner_->dimension(); }
    std::string model_id() const override { return inner_->model_id(); }

private:
    std::shared_ptr<EmbeddingBackend> inner_;
    std::string cache_dir_;
    std::mutex write_mutex_;
};

}  // namespace semkg
