#include "oocheck/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"
#include "oocheck/ranking.hpp"
#include "oocheck/retrieval.hpp"
#include "oocheck/similarity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace oocheck {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Per-sample wall-time accounting for provider calls.
class TimedSearchClient : public SearchClient {
public:
  TimedSearchClient(SearchClient& inner, double& acc) : inner_(inner), acc_(acc) {}
  const std::string& id() const override { return inner_.id(); }
  std::string fetch(const RetrievalRequest& request) override {
    auto start = Clock::now();
    auto result = inner_.fetch(request);
    acc_ += seconds_since(start);
    return result;
  }

private:
  SearchClient& inner_;
  double& acc_;
};

class TimedEmbeddingClient : public EmbeddingClient {
public:
  TimedEmbeddingClient(EmbeddingClient& inner, double& acc) : inner_(inner), acc_(acc) {}
  const std::string& id() const override { return inner_.id(); }
  std::string fetch(RequestKind kind, const std::string& payload) override {
    auto start = Clock::now();
    auto result = inner_.fetch(kind, payload);
    acc_ += seconds_since(start);
    return result;
  }

private:
  EmbeddingClient& inner_;
  double& acc_;
};

class TimedChatClient : public ChatClient {
public:
  TimedChatClient(ChatClient& inner, double& acc) : inner_(inner), acc_(acc) {}
  const std::string& id() const override { return inner_.id(); }
  std::string complete(const PromptDocument& document) override {
    auto start = Clock::now();
    auto result = inner_.complete(document);
    acc_ += seconds_since(start);
    return result;
  }

private:
  ChatClient& inner_;
  double& acc_;
};

std::shared_ptr<SearchClient> make_search_client(const ProviderSpec& spec,
                                                 FileCache& cache, bool offline) {
  std::shared_ptr<SearchClient> inner;
  if (spec.kind == "fixture") {
    inner = std::make_shared<FixtureSearchClient>(spec.id, spec.path);
  } else if (spec.kind == "rest") {
    RestEndpoint endpoint{spec.endpoint, spec.route,
                          spec.api_key_env.empty()
                              ? std::string()
                              : std::string(std::getenv(spec.api_key_env.c_str())
                                                ? std::getenv(spec.api_key_env.c_str())
                                                : ""),
                          spec.timeout_seconds};
    inner = std::make_shared<RestSearchClient>(spec.id, std::move(endpoint));
  } else {
    throw Error(Errc::ConfigInvalid, "search provider kind " + spec.kind + " unsupported");
  }
  return std::make_shared<CachedSearchClient>(std::move(inner), cache, offline);
}

std::shared_ptr<EmbeddingClient> make_embedding_client(const ProviderSpec& spec,
                                                       FileCache& cache, bool offline) {
  std::shared_ptr<EmbeddingClient> inner;
  if (spec.kind == "fixture") {
    inner = std::make_shared<FixtureEmbeddingClient>(spec.id, spec.path);
  } else if (spec.kind == "rest") {
    RestEndpoint endpoint{spec.endpoint, spec.route,
                          spec.api_key_env.empty()
                              ? std::string()
                              : std::string(std::getenv(spec.api_key_env.c_str())
                                                ? std::getenv(spec.api_key_env.c_str())
                                                : ""),
                          spec.timeout_seconds};
    inner = std::make_shared<RestEmbeddingClient>(spec.id, std::move(endpoint));
  } else {
    throw Error(Errc::ConfigInvalid,
                "embedding provider kind " + spec.kind + " unsupported");
  }
  return std::make_shared<CachedEmbeddingClient>(std::move(inner), cache, offline);
}

std::shared_ptr<ChatClient> make_chat_client(const ProviderSpec& spec, FileCache& cache,
                                             bool offline) {
  if (spec.kind == "scripted") {
    return std::make_shared<ScriptedChatClient>(spec.id, spec.path);
  }
  if (spec.kind == "rest") {
    RestEndpoint endpoint{spec.endpoint, spec.route,
                          spec.api_key_env.empty()
                              ? std::string()
                              : std::string(std::getenv(spec.api_key_env.c_str())
                                                ? std::getenv(spec.api_key_env.c_str())
                                                : ""),
                          spec.timeout_seconds};
    auto inner = std::make_shared<RestChatClient>(spec.id, std::move(endpoint));
    return std::make_shared<CachedChatClient>(std::move(inner), cache, offline);
  }
  throw Error(Errc::ConfigInvalid, "chat provider kind " + spec.kind + " unsupported");
}

const ProviderSpec& require_provider(const Config& config, const char* role) {
  auto it = config.providers.find(role);
  if (it == config.providers.end()) {
    throw Error(Errc::ConfigInvalid, std::string("providers.") + role + ": not configured");
  }
  return it->second;
}

double round6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return std::atof(buf);
}

json scores_to_json(const std::optional<SimilarityScores>& scores) {
  if (!scores) return nullptr;
  json out;
  out["text_sim"] = scores->text_sim ? json(round6(*scores->text_sim)) : json(nullptr);
  out["visual_sim"] = scores->visual_sim ? json(round6(*scores->visual_sim)) : json(nullptr);
  out["final"] = round6(scores->final);
  return out;
}

json candidate_to_json(const ScoredCandidate& sc) {
  const auto& c = sc.candidate;
  json out;
  out["id"] = c.id;
  out["origin"] = std::string(origin_name(c.origin));
  out["url"] = c.source_url;
  out["domain"] = c.domain;
  out["title"] = c.title ? json(*c.title) : json(nullptr);
  out["snippet"] = c.snippet ? json(*c.snippet) : json(nullptr);
  out["image_ref"] = c.image_ref ? json(*c.image_ref) : json(nullptr);
  out["published_at"] = c.published_at ? json(*c.published_at) : json(nullptr);
  out["language"] = c.language ? json(*c.language) : json(nullptr);
  out["scores"] = scores_to_json(sc.scores);
  return out;
}

json prompt_to_json(const PromptDocument& doc) {
  json parts = json::array();
  for (const auto& part : doc.parts) {
    json p;
    p["type"] = part.type == PromptDocument::Part::Type::Text ? "text" : "image";
    p["content"] = part.content;
    if (!part.content_sha256.empty()) p["sha256"] = part.content_sha256;
    parts.push_back(std::move(p));
  }
  json out;
  out["system"] = doc.system_text;
  out["template"] = doc.template_id + "." + doc.template_version;
  out["parts"] = std::move(parts);
  return out;
}

json stage_trace_to_json(const StageTrace& trace) {
  json out;
  out["prompt"] = trace.prompt ? prompt_to_json(*trace.prompt) : json(nullptr);
  out["raw_responses"] = trace.raw_responses;
  out["retries"] = trace.retries;
  return out;
}

json assessment_to_json(const Stage1Assessment& assessment) {
  json entries = json::array();
  for (const auto& pc : assessment.per_candidate) {
    json e;
    e["id"] = pc.candidate_id;
    e["stance"] = std::string(stance_name(pc.stance));
    e["rationale"] = pc.rationale;
    e["entities"] = pc.entities;
    e["time"] = pc.time;
    e["place"] = pc.place;
    entries.push_back(std::move(e));
  }
  json out;
  out["candidates"] = std::move(entries);
  out["summary"] = assessment.summary;
  return out;
}

json verdict_to_json(const FinalVerdict& verdict) {
  json out;
  out["label"] = std::string(label_name(verdict.label));
  out["confidence"] = verdict.confidence;
  out["explanation"] = verdict.explanation;
  out["evidence"] = verdict.evidence_ids;
  return out;
}

}  // namespace

Pipeline::Pipeline(Config config, std::string fingerprint)
    : config_(std::move(config)), fingerprint_(std::move(fingerprint)) {
  cache_ = std::make_unique<FileCache>(config_.cache_dir);
  templates_ = PromptTemplates::load(config_.templates_dir);

  text_search_ = make_search_client(require_provider(config_, kRoleTextSearch), *cache_,
                                    config_.offline);
  image_search_ = make_search_client(require_provider(config_, kRoleImageSearch), *cache_,
                                     config_.offline);
  text_embedding_ = make_embedding_client(require_provider(config_, kRoleTextEmbedding),
                                          *cache_, config_.offline);
  image_embedding_ = make_embedding_client(require_provider(config_, kRoleImageEmbedding),
                                           *cache_, config_.offline);
  stage1_chat_ =
      make_chat_client(require_provider(config_, kRoleStage1Chat), *cache_, config_.offline);
  stage2_chat_ =
      make_chat_client(require_provider(config_, kRoleStage2Chat), *cache_, config_.offline);
}

VerificationOutcome Pipeline::verify(const ClaimPair& claim) const {
  ImageResolver resolver(*cache_, config_.offline);
  return verify(claim, resolver.resolve(claim.image_ref));
}

VerificationOutcome Pipeline::verify(const ClaimPair& claim,
                                     const std::string& image_bytes) const {
  auto total_start = Clock::now();
  VerificationOutcome outcome;
  outcome.claim = claim;

  if (claim.caption.empty()) {
    throw Error(Errc::EmptyText, "claim " + claim.id + " has an empty caption");
  }
  if (image_bytes.empty()) {
    throw Error(Errc::ImageUnreadable, "claim " + claim.id + " has empty image bytes");
  }

  double retrieval_provider_s = 0.0;
  double text_fetch_s = 0.0, visual_fetch_s = 0.0, embed_s = 0.0;
  double reasoning_provider_s = 0.0;

  // Text and visual retrieval run concurrently.
  auto text_future = std::async(std::launch::async, [&] {
    TimedSearchClient timed(*text_search_, text_fetch_s);
    return retrieve_text_evidence(claim, config_.retrieval_limit, timed);
  });
  auto visual_future = std::async(std::launch::async, [&] {
    TimedSearchClient timed(*image_search_, visual_fetch_s);
    return retrieve_visual_evidence(claim, image_bytes, config_.retrieval_limit, timed);
  });
  RetrievalResult text_result = text_future.get();
  RetrievalResult visual_result = visual_future.get();

  for (const auto& w : text_result.warnings) outcome.warnings.push_back("text: " + w);
  for (const auto& w : visual_result.warnings) outcome.warnings.push_back("image: " + w);

  std::vector<EvidenceCandidate> candidates = std::move(text_result.candidates);
  candidates.insert(candidates.end(),
                    std::make_move_iterator(visual_result.candidates.begin()),
                    std::make_move_iterator(visual_result.candidates.end()));

  // Claim-side embeddings are computed once and reused for every candidate.
  TimedEmbeddingClient timed_text_embed(*text_embedding_, embed_s);
  TimedEmbeddingClient timed_image_embed(*image_embedding_, embed_s);
  ImageResolver resolver(*cache_, config_.offline);

  std::optional<EmbeddingVector> claim_text_emb;
  std::optional<EmbeddingVector> claim_image_emb;
  try {
    claim_text_emb = embed_text(timed_text_embed, claim.caption);
  } catch (const Error& e) {
    outcome.warnings.push_back(std::string("claim text embedding failed: ") + e.what());
  }
  try {
    claim_image_emb = embed_image(timed_image_embed, image_bytes);
  } catch (const Error& e) {
    outcome.warnings.push_back(std::string("claim image embedding failed: ") + e.what());
  }

  std::vector<ScoredCandidate> scorable;
  for (const auto& candidate : candidates) {
    ScoredCandidate sc = score_candidate(claim_text_emb, claim_image_emb, candidate,
                                         &timed_text_embed, &timed_image_embed, resolver);
    for (const auto& w : sc.warnings) outcome.warnings.push_back(w);
    outcome.scored.push_back(sc);
    if (sc.scores) {
      scorable.push_back(std::move(sc));
    } else {
      outcome.filter_trace.entries.push_back(
          {candidate.id, "scoring", false, "no modality could be scored"});
    }
  }

  FilterOutcome filtered = run_filter_module(scorable, config_.filter, detector_);
  outcome.filter_trace.append(filtered.trace);

  std::vector<ScoredCandidate> ranked =
      rank_candidates(filtered.kept, config_.borderline_band);
  for (const auto& sc : ranked) outcome.ranked_ids.push_back(sc.candidate.id);
  outcome.top = select_top_k(ranked, config_.top_k);

  retrieval_provider_s = text_fetch_s + visual_fetch_s + embed_s;

  TimedChatClient timed_stage1(*stage1_chat_, reasoning_provider_s);
  TimedChatClient timed_stage2(*stage2_chat_, reasoning_provider_s);
  outcome.reasoning = run_two_stage(claim, image_bytes, outcome.top, timed_stage1,
                                    timed_stage2, templates_);

  outcome.timings.total_s = seconds_since(total_start);
  outcome.timings.retrieval_s = retrieval_provider_s;
  outcome.timings.reasoning_s = reasoning_provider_s;
  outcome.timings.overhead_s = std::max(
      0.0, outcome.timings.total_s - retrieval_provider_s - reasoning_provider_s);
  return outcome;
}

std::string Pipeline::serialize_trace(const VerificationOutcome& outcome) const {
  json doc;
  doc["schema"] = "oocheck-trace-v1";
  doc["config_fingerprint"] = fingerprint_;
  json claim;
  claim["id"] = outcome.claim.id;
  claim["caption"] = outcome.claim.caption;
  claim["image_ref"] = outcome.claim.image_ref;
  doc["claim"] = std::move(claim);
  doc["warnings"] = outcome.warnings;

  auto candidates = json::array();
  for (const auto& sc : outcome.scored) candidates.push_back(candidate_to_json(sc));
  doc["candidates"] = std::move(candidates);

  auto trace_entries = json::array();
  for (const auto& entry : outcome.filter_trace.entries) {
    json e;
    e["id"] = entry.candidate_id;
    e["stage"] = entry.stage;
    e["kept"] = entry.kept;
    e["detail"] = entry.detail;
    trace_entries.push_back(std::move(e));
  }
  doc["filter_trace"] = std::move(trace_entries);
  doc["ranked"] = outcome.ranked_ids;

  auto top_ids = json::array();
  for (const auto& sc : outcome.top) top_ids.push_back(sc.candidate.id);
  doc["top_k"] = std::move(top_ids);

  json reasoning;
  reasoning["stage1_skipped"] = outcome.reasoning.trace.stage1_skipped;
  reasoning["stage1"] = stage_trace_to_json(outcome.reasoning.trace.stage1);
  reasoning["stage2"] = stage_trace_to_json(outcome.reasoning.trace.stage2);
  reasoning["assessment"] = outcome.reasoning.trace.assessment
                                ? assessment_to_json(*outcome.reasoning.trace.assessment)
                                : json(nullptr);
  reasoning["error"] =
      outcome.reasoning.trace.error ? json(*outcome.reasoning.trace.error) : json(nullptr);
  doc["reasoning"] = std::move(reasoning);
  doc["verdict"] =
      outcome.verdict() ? verdict_to_json(*outcome.verdict()) : json(nullptr);
  return doc.dump(2) + "\n";
}

EvalReport run_benchmark(const std::vector<DatasetRecord>& dataset,
                         const Pipeline& pipeline, const BenchmarkOptions& options) {
  fs::path report_dir(options.report_dir);
  fs::path trace_dir = report_dir / "traces";
  std::error_code ec;
  fs::create_directories(trace_dir, ec);
  if (ec) {
    throw Error(Errc::ReportIO, "cannot create " + trace_dir.string());
  }

  std::vector<PredictionRow> rows(dataset.size());
  std::atomic<size_t> next{0};
  int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(dataset.size())));

  auto worker = [&] {
    while (true) {
      size_t index = next.fetch_add(1);
      if (index >= dataset.size()) break;
      const DatasetRecord& record = dataset[index];
      PredictionRow row;
      row.id = record.id;
      row.gold_ooc = record.ooc;
      row.trace_path = "traces/" + record.id + ".json";

      ClaimPair claim{record.id, record.image_path, record.caption, record.ooc};
      std::string trace_body;
      try {
        VerificationOutcome outcome = pipeline.verify(claim);
        row.timings = outcome.timings;
        trace_body = pipeline.serialize_trace(outcome);
        if (outcome.verdict()) {
          row.predicted = outcome.verdict()->label;
          row.confidence = outcome.verdict()->confidence;
        } else {
          row.error = outcome.reasoning.trace.error
                          ? *outcome.reasoning.trace.error
                          : std::string("reasoning produced no verdict");
        }
      } catch (const Error& e) {
        row.error = e.what();
        json err_trace;
        err_trace["schema"] = "oocheck-trace-v1";
        err_trace["claim"] = {{"id", claim.id}, {"caption", claim.caption}};
        err_trace["error"] = *row.error;
        trace_body = err_trace.dump(2) + "\n";
      }

      std::ofstream trace_out(report_dir / row.trace_path, std::ios::binary | std::ios::trunc);
      trace_out.write(trace_body.data(), static_cast<std::streamsize>(trace_body.size()));
      rows[index] = std::move(row);
    }
  };

  std::vector<std::thread> pool;
  for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::sort(rows.begin(), rows.end(),
            [](const PredictionRow& a, const PredictionRow& b) { return a.id < b.id; });

  EvalReport report;
  report.metrics = evaluate(rows, dataset);
  report.config_fingerprint = pipeline.fingerprint();
  for (const auto& row : rows) {
    report.mean_latency_retrieval_s += row.timings.retrieval_s;
    report.mean_latency_reasoning_s += row.timings.reasoning_s;
    report.mean_latency_overhead_s += row.timings.overhead_s;
  }
  if (!rows.empty()) {
    report.mean_latency_retrieval_s /= static_cast<double>(rows.size());
    report.mean_latency_reasoning_s /= static_cast<double>(rows.size());
    report.mean_latency_overhead_s /= static_cast<double>(rows.size());
  }
  report.per_sample = std::move(rows);
  write_report(report, options.report_dir);
  return report;
}

}  // namespace oocheck
