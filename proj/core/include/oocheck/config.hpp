#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "oocheck/filtering.hpp"

namespace oocheck {

struct ProviderSpec {
  std::string kind;  // "fixture" | "rest" | "scripted"
  std::string id;
  std::string endpoint;         // rest base URL (possibly from endpoint_env)
  std::string route;            // rest request path
  std::string path;             // fixture dir / embeddings file / script (resolved)
  std::string path_as_written;  // as it appeared in the file; used for the fingerprint
  std::string api_key_env;      // env var NAME; the value never enters the config
  std::string endpoint_env;
  int timeout_seconds = 30;
};

// Provider roles understood by the pipeline factory.
inline constexpr const char* kRoleTextSearch = "text_search";
inline constexpr const char* kRoleImageSearch = "image_search";
inline constexpr const char* kRoleTextEmbedding = "text_embedding";
inline constexpr const char* kRoleImageEmbedding = "image_embedding";
inline constexpr const char* kRoleStage1Chat = "stage1_chat";
inline constexpr const char* kRoleStage2Chat = "stage2_chat";

struct Config {
  FilterConfig filter;  // allowlist resolved into filter.domain_allowlist
  int top_k = 3;
  double borderline_band = 0.01;
  int retrieval_limit = 10;
  std::string cache_dir = ".oocheck-cache";
  std::string trace_dir = "oocheck-traces";
  std::string templates_dir = "templates";
  bool offline = false;
  int jobs = 4;
  std::map<std::string, ProviderSpec> providers;  // keyed by role

  std::string allowlist_path_as_written;  // empty when the built-in default applies
};

struct LoadedConfig {
  Config config;
  std::string fingerprint;  // digest of the semantic configuration
};

// Shipped default allowlist: the four outlets the benchmark corpus draws
// from. Extend via filter.allowlist or filter.allowlist_path.
const std::vector<std::string>& default_domain_allowlist();

using GetEnvFn = std::function<const char*(const char*)>;

// Loads a JSON config file and resolves it against the defaults. An empty
// path (or empty file) yields the defaults. Relative paths resolve against
// the config file's directory. Explicitly referenced paths must exist;
// violations raise EConfigInvalid naming the offending key. Secrets are
// looked up from the environment by name only.
LoadedConfig load_config(const std::string& path, const GetEnvFn& getenv_fn = nullptr);

// Recomputes the fingerprint for an (possibly mutated) effective config.
// Execution knobs — cache_dir, trace_dir, offline, jobs — never
// participate; template and allowlist content do.
std::string config_fingerprint(const Config& config);

}  // namespace oocheck
