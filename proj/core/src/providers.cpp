#include "oocheck/providers.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"
#include "oocheck/reasoning.hpp"
#include "oocheck/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace oocheck {

namespace {

std::atomic<std::uint64_t> g_network_ops{0};

const char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  while (i + 2 < bytes.size()) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                 static_cast<unsigned char>(bytes[i + 2]);
    out.push_back(kBase64Chars[(v >> 18) & 63]);
    out.push_back(kBase64Chars[(v >> 12) & 63]);
    out.push_back(kBase64Chars[(v >> 6) & 63]);
    out.push_back(kBase64Chars[v & 63]);
    i += 3;
  }
  size_t rest = bytes.size() - i;
  if (rest == 1) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out.push_back(kBase64Chars[(v >> 18) & 63]);
    out.push_back(kBase64Chars[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out.push_back(kBase64Chars[(v >> 18) & 63]);
    out.push_back(kBase64Chars[(v >> 12) & 63]);
    out.push_back(kBase64Chars[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string http_post_json(const RestEndpoint& endpoint, const std::string& body) {
  bump_network_ops();
  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(endpoint.timeout_seconds, 0);
  client.set_read_timeout(endpoint.timeout_seconds, 0);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  }
  auto res = client.Post(endpoint.path, headers, body, "application/json");
  if (!res) {
    throw Error(Errc::ProviderUnavailable,
                endpoint.base_url + endpoint.path + ": " + to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(Errc::ProviderUnavailable,
                endpoint.base_url + endpoint.path + " returned HTTP " +
                    std::to_string(res->status));
  }
  return res->body;
}

json parse_script_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(Errc::ConfigInvalid, "cannot open script file " + file.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigInvalid,
                "script file " + file.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace

std::uint64_t network_ops() { return g_network_ops.load(); }
void bump_network_ops() { g_network_ops.fetch_add(1); }

// --- fixture search -----------------------------------------------------

FixtureSearchClient::FixtureSearchClient(std::string id, fs::path dir)
    : id_(std::move(id)), store_(std::move(dir)) {}

std::string FixtureSearchClient::fetch(const RetrievalRequest& request) {
  CacheKey key = make_cache_key(request, id_);
  auto body = store_.get(key);
  if (!body) {
    throw Error(Errc::ProviderUnavailable,
                "no fixture response for key " + key.to_string() + " under " +
                    store_.root().string());
  }
  return *body;
}

// --- fixture embeddings --------------------------------------------------

FixtureEmbeddingClient::FixtureEmbeddingClient(std::string id, const fs::path& file)
    : id_(std::move(id)) {
  json doc = parse_script_file(file);
  auto load_map = [&](const char* section, std::map<std::string, EmbeddingVector>& out) {
    if (!doc.contains(section)) return;
    for (const auto& [key, value] : doc[section].items()) {
      EmbeddingVector vec;
      for (const auto& item : value) vec.values.push_back(item.get<double>());
      out.emplace(key, std::move(vec));
    }
  };
  load_map("text", text_);
  load_map("image", image_);
}

std::string FixtureEmbeddingClient::fetch(RequestKind kind, const std::string& payload) {
  if (kind == RequestKind::EmbedText) {
    auto it = text_.find(normalize_whitespace(payload));
    if (it == text_.end()) {
      throw Error(Errc::ProviderUnavailable,
                  "fixture embedder " + id_ + " has no entry for text payload");
    }
    return serialize_embedding_response(it->second);
  }
  auto it = image_.find(sha256_hex(payload));
  if (it == image_.end()) {
    throw Error(Errc::ProviderUnavailable,
                "fixture embedder " + id_ + " has no entry for image digest " +
                    sha256_hex(payload));
  }
  return serialize_embedding_response(it->second);
}

// --- scripted chat -------------------------------------------------------

ScriptedChatClient::ScriptedChatClient(std::string id, const fs::path& script_file)
    : id_(std::move(id)) {
  json doc = parse_script_file(script_file);

  if (doc.contains("stage1")) {
    const auto& s1 = doc["stage1"];
    for (const auto& rule : s1.value("stance_rules", json::array())) {
      auto stance = stance_from_name(rule.value("stance", ""));
      if (!stance) {
        throw Error(Errc::ConfigInvalid, "scripted stage1 rule has invalid stance");
      }
      stance_rules_.push_back({rule.value("contains", ""), *stance});
    }
    if (s1.contains("default_stance")) {
      auto stance = stance_from_name(s1["default_stance"].get<std::string>());
      if (!stance) {
        throw Error(Errc::ConfigInvalid, "scripted stage1 default_stance invalid");
      }
      default_stance_ = *stance;
    }
  }

  stage2_default_.label = Label::NOOC;
  stage2_default_.confidence = 5;
  stage2_default_.explanation = "No decisive evidence; defaulting to consistent.";
  if (doc.contains("stage2")) {
    const auto& s2 = doc["stage2"];
    auto parse_rule = [](const json& rule) {
      Stage2Rule out;
      out.contains = rule.value("contains", "");
      if (rule.contains("respond_raw")) {
        out.respond_raw = rule["respond_raw"].get<std::string>();
        return out;
      }
      auto label = label_from_name(rule.value("label", ""));
      if (!label) {
        throw Error(Errc::ConfigInvalid, "scripted stage2 rule has invalid label");
      }
      out.label = *label;
      out.confidence = rule.value("confidence", 5);
      out.explanation = rule.value("explanation", "scripted verdict");
      return out;
    };
    for (const auto& rule : s2.value("rules", json::array())) {
      stage2_rules_.push_back(parse_rule(rule));
    }
    if (s2.contains("default")) {
      stage2_default_ = parse_rule(s2["default"]);
    }
  }
}

std::string ScriptedChatClient::stage1_response(const std::string& prompt_text) const {
  Stage1Assessment assessment;
  std::vector<std::string> seen_markers;

  size_t pos = 0;
  while ((pos = prompt_text.find(kCandidateHeaderPrefix, pos)) != std::string::npos) {
    size_t id_start = pos + kCandidateHeaderPrefix.size();
    size_t id_end = prompt_text.find('\n', id_start);
    if (id_end == std::string::npos) break;
    std::string candidate_id =
        normalize_whitespace(prompt_text.substr(id_start, id_end - id_start));
    size_t block_end = prompt_text.find("\n\n", id_end);
    if (block_end == std::string::npos) block_end = prompt_text.size();
    std::string block = prompt_text.substr(pos, block_end - pos);

    Stage1Assessment::PerCandidate pc;
    pc.candidate_id = candidate_id;
    pc.stance = default_stance_;
    pc.rationale = "no scripted rule matched";
    for (const auto& rule : stance_rules_) {
      if (!rule.contains.empty() && block.find(rule.contains) != std::string::npos) {
        pc.stance = rule.stance;
        // Quote the snippet line so downstream reasoning sees the evidence text.
        size_t snippet_pos = block.find("snippet: ");
        std::string quoted = snippet_pos != std::string::npos
                                 ? block.substr(snippet_pos + 9,
                                                block.find('\n', snippet_pos) - snippet_pos - 9)
                                 : rule.contains;
        pc.rationale = "evidence says: " + quoted;
        seen_markers.push_back(candidate_id + "=" + std::string(stance_name(pc.stance)) +
                               " (" + quoted + ")");
        break;
      }
    }
    assessment.per_candidate.push_back(std::move(pc));
    pos = block_end;
  }

  if (seen_markers.empty()) {
    assessment.summary = "No candidate matched a scripted rule.";
  } else {
    std::string summary = "Scripted assessment: ";
    for (size_t i = 0; i < seen_markers.size(); ++i) {
      if (i > 0) summary += "; ";
      summary += seen_markers[i];
    }
    assessment.summary = summary;
  }
  return serialize_stage1_response(assessment);
}

std::string ScriptedChatClient::stage2_response(const std::string& prompt_text) const {
  const Stage2Rule* chosen = &stage2_default_;
  for (const auto& rule : stage2_rules_) {
    if (!rule.contains.empty() && prompt_text.find(rule.contains) != std::string::npos) {
      chosen = &rule;
      break;
    }
  }
  if (chosen->respond_raw) {
    return *chosen->respond_raw;
  }
  FinalVerdict verdict;
  verdict.label = chosen->label;
  verdict.confidence = chosen->confidence;
  verdict.explanation = chosen->explanation;
  return serialize_stage2_response(verdict);
}

std::string ScriptedChatClient::complete(const PromptDocument& document) {
  std::string text = document.joined_text();
  if (document.template_id == "stage1") {
    return stage1_response(text);
  }
  return stage2_response(text);
}

// --- REST adapters --------------------------------------------------------

RestSearchClient::RestSearchClient(std::string id, RestEndpoint endpoint)
    : id_(std::move(id)), endpoint_(std::move(endpoint)) {}

std::string RestSearchClient::fetch(const RetrievalRequest& request) {
  json body;
  body["kind"] = request.kind == RequestKind::TextQuery ? "text" : "image";
  body["payload"] = request.kind == RequestKind::TextQuery
                        ? normalize_whitespace(request.payload)
                        : request.payload;
  body["limit"] = request.limit;
  return http_post_json(endpoint_, body.dump());
}

RestEmbeddingClient::RestEmbeddingClient(std::string id, RestEndpoint endpoint)
    : id_(std::move(id)), endpoint_(std::move(endpoint)) {}

std::string RestEmbeddingClient::fetch(RequestKind kind, const std::string& payload) {
  json body;
  if (kind == RequestKind::EmbedText) {
    body["modality"] = "text";
    body["payload"] = normalize_whitespace(payload);
  } else {
    body["modality"] = "image";
    body["payload"] = base64_encode(payload);
  }
  return http_post_json(endpoint_, body.dump());
}

RestChatClient::RestChatClient(std::string id, RestEndpoint endpoint)
    : id_(std::move(id)), endpoint_(std::move(endpoint)) {}

std::string RestChatClient::complete(const PromptDocument& document) {
  json body;
  body["system"] = document.system_text;
  body["stage_id"] = document.template_id;
  auto parts = json::array();
  for (const auto& part : document.parts) {
    json p;
    if (part.type == PromptDocument::Part::Type::Text) {
      p["type"] = "text";
      p["content"] = part.content;
    } else {
      p["type"] = "image";
      std::ifstream in(part.content, std::ios::binary);
      if (!in) {
        throw Error(Errc::ImageUnreadable, "cannot open image " + part.content);
      }
      std::string bytes((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
      p["content"] = base64_encode(bytes);
    }
    parts.push_back(std::move(p));
  }
  body["parts"] = std::move(parts);

  std::string response = http_post_json(endpoint_, body.dump());
  try {
    json doc = json::parse(response);
    if (!doc.contains("text") || !doc["text"].is_string()) {
      throw Error(Errc::MalformedResponse, "chat response missing text field");
    }
    return doc["text"].get<std::string>();
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedResponse,
                std::string("chat response is not JSON: ") + e.what());
  }
}

// --- cached decorators -----------------------------------------------------

namespace {

std::string cached_fetch(FileCache& cache, const CacheKey& key, bool offline,
                         const std::function<std::string()>& fetch) {
  if (auto hit = cache.get(key)) {
    return *hit;
  }
  if (offline) {
    throw Error(Errc::ProviderUnavailable,
                "offline mode and no cache entry for key " + key.to_string());
  }
  std::string body = fetch();
  cache.put(key, body);
  return body;
}

}  // namespace

CachedSearchClient::CachedSearchClient(std::shared_ptr<SearchClient> inner,
                                       FileCache& cache, bool offline)
    : inner_(std::move(inner)), cache_(cache), offline_(offline) {}

std::string CachedSearchClient::fetch(const RetrievalRequest& request) {
  CacheKey key = make_cache_key(request, inner_->id());
  return cached_fetch(cache_, key, offline_, [&] { return inner_->fetch(request); });
}

CachedEmbeddingClient::CachedEmbeddingClient(std::shared_ptr<EmbeddingClient> inner,
                                             FileCache& cache, bool offline)
    : inner_(std::move(inner)), cache_(cache), offline_(offline) {}

std::string CachedEmbeddingClient::fetch(RequestKind kind, const std::string& payload) {
  CacheKey key = make_cache_key(RetrievalRequest{kind, payload, 1}, inner_->id());
  return cached_fetch(cache_, key, offline_,
                      [&] { return inner_->fetch(kind, payload); });
}

CachedChatClient::CachedChatClient(std::shared_ptr<ChatClient> inner, FileCache& cache,
                                   bool offline)
    : inner_(std::move(inner)), cache_(cache), offline_(offline) {}

std::string CachedChatClient::complete(const PromptDocument& document) {
  CacheKey key = make_cache_key(
      RetrievalRequest{RequestKind::Chat, document.serialize(), 1}, inner_->id());
  return cached_fetch(cache_, key, offline_, [&] { return inner_->complete(document); });
}

// --- image resolution --------------------------------------------------------

ImageResolver::ImageResolver(FileCache& cache, bool offline, int timeout_seconds)
    : cache_(cache), offline_(offline), timeout_seconds_(timeout_seconds) {}

std::string ImageResolver::resolve(const std::string& ref) const {
  bool is_http = ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0;
  if (!is_http) {
    std::string path = ref;
    if (path.rfind("file://", 0) == 0) path = path.substr(7);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(Errc::ImageUnreadable, "cannot open image " + path);
    }
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (in.bad()) {
      throw Error(Errc::ImageUnreadable, "read failed for image " + path);
    }
    return bytes;
  }

  CacheKey key =
      make_cache_key(RetrievalRequest{RequestKind::FetchImage, ref, 1}, "thumbnail");
  return cached_fetch(cache_, key, offline_, [&]() -> std::string {
    bump_network_ops();
    size_t scheme_end = ref.find("://") + 3;
    size_t path_start = ref.find('/', scheme_end);
    std::string origin = path_start == std::string::npos ? ref : ref.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : ref.substr(path_start);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    auto res = client.Get(path);
    if (!res || res->status < 200 || res->status >= 300) {
      throw Error(Errc::ImageUnreadable, "cannot fetch thumbnail " + ref);
    }
    return res->body;
  });
}

}  // namespace oocheck
