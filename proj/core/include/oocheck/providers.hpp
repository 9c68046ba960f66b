#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oocheck/cache.hpp"
#include "oocheck/prompt.hpp"
#include "oocheck/similarity.hpp"
#include "oocheck/types.hpp"

namespace oocheck {

// Count of outbound HTTP requests issued by any REST adapter since process
// start. Offline runs assert this stays flat.
std::uint64_t network_ops();
void bump_network_ops();

// Raw-response search adapter. fetch() returns the provider body for the
// documented contract: {"records": [{url, title?, snippet?, image_url?,
// published_at?, language?}]}.
class SearchClient {
public:
  virtual ~SearchClient() = default;
  virtual const std::string& id() const = 0;
  virtual std::string fetch(const RetrievalRequest& request) = 0;
};

// Raw-response embedding adapter: {"vector": [...], "dim": n}. For
// EmbedText the payload is normalized text; for EmbedImage it is the raw
// image bytes.
class EmbeddingClient {
public:
  virtual ~EmbeddingClient() = default;
  virtual const std::string& id() const = 0;
  virtual std::string fetch(RequestKind kind, const std::string& payload) = 0;
};

// Multimodal chat adapter; returns the raw completion text.
class ChatClient {
public:
  virtual ~ChatClient() = default;
  virtual const std::string& id() const = 0;
  virtual std::string complete(const PromptDocument& document) = 0;
};

// --- fixture adapters -------------------------------------------------

// Reads canned responses from a directory laid out exactly like a cache
// store; the file for a request lives at the request's cache-key path.
class FixtureSearchClient : public SearchClient {
public:
  FixtureSearchClient(std::string id, std::filesystem::path dir);
  const std::string& id() const override { return id_; }
  std::string fetch(const RetrievalRequest& request) override;

private:
  std::string id_;
  FileCache store_;
};

// Embeddings from a JSON map: {"dim": n, "text": {"<payload>": [...]},
// "image": {"<sha256 of bytes>": [...]}}.
class FixtureEmbeddingClient : public EmbeddingClient {
public:
  FixtureEmbeddingClient(std::string id, const std::filesystem::path& file);
  const std::string& id() const override { return id_; }
  std::string fetch(RequestKind kind, const std::string& payload) override;

private:
  std::string id_;
  std::map<std::string, EmbeddingVector> text_;
  std::map<std::string, EmbeddingVector> image_;
};

// --- scripted chat ----------------------------------------------------

// Deterministic stand-in for a hosted model, driven by a JSON script.
// Stage-one requests are answered by scanning the prompt's candidate
// blocks and applying stance rules; stage-two requests are answered by
// the first matching rule. See the fixtures documentation for the schema.
class ScriptedChatClient : public ChatClient {
public:
  ScriptedChatClient(std::string id, const std::filesystem::path& script_file);
  const std::string& id() const override { return id_; }
  std::string complete(const PromptDocument& document) override;

private:
  struct StanceRule {
    std::string contains;
    Stance stance = Stance::Irrelevant;
  };
  struct Stage2Rule {
    std::string contains;
    std::optional<std::string> respond_raw;  // verbatim response body
    Label label = Label::NOOC;
    int confidence = 5;
    std::string explanation;
  };

  std::string stage1_response(const std::string& prompt_text) const;
  std::string stage2_response(const std::string& prompt_text) const;

  std::string id_;
  std::vector<StanceRule> stance_rules_;
  Stance default_stance_ = Stance::Irrelevant;
  std::vector<Stage2Rule> stage2_rules_;
  Stage2Rule stage2_default_;
};

// --- generic REST adapters ---------------------------------------------

struct RestEndpoint {
  std::string base_url;   // e.g. http://127.0.0.1:8080
  std::string path;       // e.g. /search
  std::string api_key;    // sent as a bearer token when non-empty
  int timeout_seconds = 30;
  int max_concurrency = 8;
};

class RestSearchClient : public SearchClient {
public:
  RestSearchClient(std::string id, RestEndpoint endpoint);
  const std::string& id() const override { return id_; }
  std::string fetch(const RetrievalRequest& request) override;

private:
  std::string id_;
  RestEndpoint endpoint_;
};

class RestEmbeddingClient : public EmbeddingClient {
public:
  RestEmbeddingClient(std::string id, RestEndpoint endpoint);
  const std::string& id() const override { return id_; }
  std::string fetch(RequestKind kind, const std::string& payload) override;

private:
  std::string id_;
  RestEndpoint endpoint_;
};

class RestChatClient : public ChatClient {
public:
  RestChatClient(std::string id, RestEndpoint endpoint);
  const std::string& id() const override { return id_; }
  std::string complete(const PromptDocument& document) override;

private:
  std::string id_;
  RestEndpoint endpoint_;
};

// --- cached decorators --------------------------------------------------

// Read-through cache. In offline mode only cache hits are served; misses
// raise EProviderUnavailable naming the missing cache key.
class CachedSearchClient : public SearchClient {
public:
  CachedSearchClient(std::shared_ptr<SearchClient> inner, FileCache& cache, bool offline);
  const std::string& id() const override { return inner_->id(); }
  std::string fetch(const RetrievalRequest& request) override;

private:
  std::shared_ptr<SearchClient> inner_;
  FileCache& cache_;
  bool offline_;
};

class CachedEmbeddingClient : public EmbeddingClient {
public:
  CachedEmbeddingClient(std::shared_ptr<EmbeddingClient> inner, FileCache& cache, bool offline);
  const std::string& id() const override { return inner_->id(); }
  std::string fetch(RequestKind kind, const std::string& payload) override;

private:
  std::shared_ptr<EmbeddingClient> inner_;
  FileCache& cache_;
  bool offline_;
};

class CachedChatClient : public ChatClient {
public:
  CachedChatClient(std::shared_ptr<ChatClient> inner, FileCache& cache, bool offline);
  const std::string& id() const override { return inner_->id(); }
  std::string complete(const PromptDocument& document) override;

private:
  std::shared_ptr<ChatClient> inner_;
  FileCache& cache_;
  bool offline_;
};

// Resolves an image reference to bytes. Local paths read directly;
// http(s) thumbnails fetch through the cache (cache-only when offline).
class ImageResolver {
public:
  ImageResolver(FileCache& cache, bool offline, int timeout_seconds = 30);
  std::string resolve(const std::string& ref) const;

private:
  FileCache& cache_;
  bool offline_;
  int timeout_seconds_;
};

}  // namespace oocheck
