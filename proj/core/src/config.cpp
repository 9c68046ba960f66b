#include "oocheck/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"
#include "oocheck/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace oocheck {

namespace {

const char* default_getenv(const char* name) { return std::getenv(name); }

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw Error(Errc::ConfigInvalid, key + ": " + why);
}

std::string resolve_path(const fs::path& base, const std::string& raw) {
  fs::path p(raw);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (base / p).lexically_normal().string();
}

double get_number(const json& obj, const char* key, const std::string& locus, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) invalid(locus, "must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const char* key, const std::string& locus, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) invalid(locus, "must be an integer");
  return obj[key].get<int>();
}

bool get_bool(const json& obj, const char* key, const std::string& locus, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) invalid(locus, "must be a boolean");
  return obj[key].get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& locus,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) invalid(locus, "must be a string");
  return obj[key].get<std::string>();
}

bool valid_provider_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

ProviderSpec parse_provider(const json& obj, const std::string& role, const fs::path& base,
                            const GetEnvFn& getenv_fn) {
  std::string locus = "providers." + role;
  if (!obj.is_object()) invalid(locus, "must be an object");
  ProviderSpec spec;
  spec.kind = get_string(obj, "kind", locus + ".kind", "");
  if (spec.kind != "fixture" && spec.kind != "rest" && spec.kind != "scripted") {
    invalid(locus + ".kind", "must be fixture, rest or scripted");
  }
  spec.id = get_string(obj, "id", locus + ".id", role);
  if (!valid_provider_id(spec.id)) {
    invalid(locus + ".id", "must match [a-z0-9_-]+");
  }
  spec.endpoint = get_string(obj, "endpoint", locus + ".endpoint", "");
  spec.route = get_string(obj, "route", locus + ".route", "/");
  spec.path_as_written = get_string(obj, "path", locus + ".path", "");
  spec.api_key_env = get_string(obj, "api_key_env", locus + ".api_key_env", "");
  spec.endpoint_env = get_string(obj, "endpoint_env", locus + ".endpoint_env", "");
  spec.timeout_seconds = get_int(obj, "timeout_seconds", locus + ".timeout_seconds", 30);

  if (!spec.endpoint_env.empty()) {
    const char* value = getenv_fn(spec.endpoint_env.c_str());
    if (value && *value) spec.endpoint = value;
  }
  if (!spec.path_as_written.empty()) {
    spec.path = resolve_path(base, spec.path_as_written);
    if (!fs::exists(spec.path)) {
      invalid(locus + ".path", "referenced path does not exist: " + spec.path);
    }
  }
  if (spec.kind == "rest" && spec.endpoint.empty()) {
    invalid(locus + ".endpoint", "rest provider needs an endpoint (or endpoint_env)");
  }
  if ((spec.kind == "fixture" || spec.kind == "scripted") && spec.path.empty()) {
    invalid(locus + ".path", spec.kind + " provider needs a path");
  }
  return spec;
}

json fingerprint_document(const Config& config) {
  json doc;
  json filter;
  filter["theta"] = config.filter.theta;
  filter["strategy"] = std::string(filter_strategy_name(config.filter.strategy));
  filter["language"] = config.filter.language;
  filter["dedup"] = config.filter.dedup_enabled;
  filter["drop_text_evidence"] = config.filter.drop_text_evidence;
  filter["drop_image_evidence"] = config.filter.drop_image_evidence;
  filter["disable_domain_filter"] = config.filter.disable_domain_filter;
  auto allowlist = config.filter.domain_allowlist;
  std::sort(allowlist.begin(), allowlist.end());
  filter["allowlist"] = allowlist;
  doc["filter"] = std::move(filter);

  doc["ranking"] = {{"top_k", config.top_k}, {"borderline_band", config.borderline_band}};
  doc["retrieval"] = {{"limit", config.retrieval_limit}};

  json providers = json::object();
  for (const auto& [role, spec] : config.providers) {
    providers[role] = {{"kind", spec.kind},
                       {"id", spec.id},
                       {"endpoint", spec.endpoint},
                       {"route", spec.route},
                       {"path", spec.path_as_written},
                       {"api_key_env", spec.api_key_env}};
  }
  doc["providers"] = std::move(providers);

  json templates = json::object();
  for (const char* stage : {"stage1", "stage2"}) {
    std::error_code ec;
    json entry;
    bool found = false;
    for (const auto& item : fs::directory_iterator(config.templates_dir, ec)) {
      const std::string name = item.path().filename().string();
      if (name.rfind(std::string(stage) + ".", 0) == 0 &&
          name.size() > std::strlen(stage) + 5 &&
          name.substr(name.size() - 4) == ".txt") {
        std::ifstream in(item.path(), std::ios::binary);
        std::string body((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        entry["file"] = name;
        entry["sha256"] = sha256_hex(body);
        found = true;
        break;
      }
    }
    templates[stage] = found ? entry : json(nullptr);
  }
  doc["templates"] = std::move(templates);
  return doc;
}

}  // namespace

const std::vector<std::string>& default_domain_allowlist() {
  static const std::vector<std::string> kDefault = {
      "theguardian.com", "bbc.co.uk", "usatoday.com", "washingtonpost.com"};
  return kDefault;
}

std::string config_fingerprint(const Config& config) {
  return sha256_hex(fingerprint_document(config).dump());
}

LoadedConfig load_config(const std::string& path, const GetEnvFn& getenv_fn_in) {
  GetEnvFn getenv_fn = getenv_fn_in ? getenv_fn_in : GetEnvFn(default_getenv);

  json doc = json::object();
  fs::path base = fs::current_path();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) {
      throw Error(Errc::ConfigInvalid, "cannot open config file " + path);
    }
    std::string body((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    base = fs::absolute(fs::path(path)).parent_path();
    if (!normalize_whitespace(body).empty()) {
      try {
        doc = json::parse(body);
      } catch (const json::parse_error& e) {
        throw Error(Errc::ConfigInvalid,
                    "config file is not valid JSON: " + std::string(e.what()));
      }
      if (!doc.is_object()) {
        throw Error(Errc::ConfigInvalid, "config root must be a JSON object");
      }
    }
  }

  Config config;
  config.filter.domain_allowlist = default_domain_allowlist();

  if (doc.contains("filter")) {
    const auto& f = doc["filter"];
    if (!f.is_object()) invalid("filter", "must be an object");
    config.filter.theta = get_number(f, "theta", "filter.theta", config.filter.theta);
    if (config.filter.theta < 0.0 || config.filter.theta > 1.0) {
      invalid("filter.theta", "must lie in [0, 1]");
    }
    std::string strategy =
        get_string(f, "strategy", "filter.strategy",
                   std::string(filter_strategy_name(config.filter.strategy)));
    auto parsed = filter_strategy_from_name(strategy);
    if (!parsed) invalid("filter.strategy", "must be similarity, domain or both");
    config.filter.strategy = *parsed;
    config.filter.language = get_string(f, "language", "filter.language", "en");
    config.filter.dedup_enabled = get_bool(f, "dedup", "filter.dedup", true);
    config.filter.drop_text_evidence =
        get_bool(f, "drop_text_evidence", "filter.drop_text_evidence", false);
    config.filter.drop_image_evidence =
        get_bool(f, "drop_image_evidence", "filter.drop_image_evidence", false);
    config.filter.disable_domain_filter =
        get_bool(f, "disable_domain_filter", "filter.disable_domain_filter", false);

    if (f.contains("allowlist") && f.contains("allowlist_path")) {
      invalid("filter.allowlist", "give either allowlist or allowlist_path, not both");
    }
    if (f.contains("allowlist")) {
      if (!f["allowlist"].is_array()) invalid("filter.allowlist", "must be an array");
      config.filter.domain_allowlist.clear();
      for (const auto& item : f["allowlist"]) {
        if (!item.is_string()) invalid("filter.allowlist", "entries must be strings");
        config.filter.domain_allowlist.push_back(to_lower(item.get<std::string>()));
      }
    } else if (f.contains("allowlist_path")) {
      std::string raw = get_string(f, "allowlist_path", "filter.allowlist_path", "");
      config.allowlist_path_as_written = raw;
      std::string resolved = resolve_path(base, raw);
      if (!fs::exists(resolved)) {
        invalid("filter.allowlist_path", "referenced path does not exist: " + resolved);
      }
      config.filter.domain_allowlist = load_allowlist(resolved);
    }
  }

  if (doc.contains("ranking")) {
    const auto& r = doc["ranking"];
    if (!r.is_object()) invalid("ranking", "must be an object");
    config.top_k = get_int(r, "top_k", "ranking.top_k", config.top_k);
    if (config.top_k < 1) invalid("ranking.top_k", "must be >= 1");
    config.borderline_band =
        get_number(r, "borderline_band", "ranking.borderline_band", config.borderline_band);
    if (config.borderline_band < 0.0) invalid("ranking.borderline_band", "must be >= 0");
  }

  if (doc.contains("retrieval")) {
    const auto& r = doc["retrieval"];
    if (!r.is_object()) invalid("retrieval", "must be an object");
    config.retrieval_limit = get_int(r, "limit", "retrieval.limit", config.retrieval_limit);
    if (config.retrieval_limit < 1) invalid("retrieval.limit", "must be >= 1");
  }

  config.cache_dir = get_string(doc, "cache_dir", "cache_dir", config.cache_dir);
  config.trace_dir = get_string(doc, "trace_dir", "trace_dir", config.trace_dir);
  config.offline = get_bool(doc, "offline", "offline", false);
  config.jobs = get_int(doc, "jobs", "jobs", config.jobs);
  if (config.jobs < 1) invalid("jobs", "must be >= 1");

  std::string templates_raw =
      get_string(doc, "templates_dir", "templates_dir", config.templates_dir);
  config.templates_dir = resolve_path(base, templates_raw);
  if (doc.contains("templates_dir") && !fs::is_directory(config.templates_dir)) {
    invalid("templates_dir", "referenced path is not a directory: " + config.templates_dir);
  }
  // Explicitly configured stores resolve against the config file; the
  // defaults stay relative to the working directory.
  if (doc.contains("cache_dir")) config.cache_dir = resolve_path(base, config.cache_dir);
  if (doc.contains("trace_dir")) config.trace_dir = resolve_path(base, config.trace_dir);

  if (doc.contains("providers")) {
    if (!doc["providers"].is_object()) invalid("providers", "must be an object");
    for (const auto& [role, value] : doc["providers"].items()) {
      bool known = role == kRoleTextSearch || role == kRoleImageSearch ||
                   role == kRoleTextEmbedding || role == kRoleImageEmbedding ||
                   role == kRoleStage1Chat || role == kRoleStage2Chat;
      if (!known) invalid("providers." + role, "unknown provider role");
      config.providers[role] = parse_provider(value, role, base, getenv_fn);
    }
  }
  // Stage two defaults to the stage-one endpoint.
  if (config.providers.count(kRoleStage1Chat) && !config.providers.count(kRoleStage2Chat)) {
    config.providers[kRoleStage2Chat] = config.providers[kRoleStage1Chat];
  }

  LoadedConfig loaded;
  loaded.config = std::move(config);
  loaded.fingerprint = config_fingerprint(loaded.config);
  return loaded;
}

}  // namespace oocheck
