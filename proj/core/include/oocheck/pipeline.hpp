#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oocheck/cache.hpp"
#include "oocheck/config.hpp"
#include "oocheck/evaluation.hpp"
#include "oocheck/filtering.hpp"
#include "oocheck/prompt.hpp"
#include "oocheck/providers.hpp"
#include "oocheck/reasoning.hpp"

namespace oocheck {

struct VerificationOutcome {
  ClaimPair claim;
  std::vector<std::string> warnings;       // retrieval + scoring warnings
  std::vector<ScoredCandidate> scored;     // every normalized candidate
  FilterTrace filter_trace;
  std::vector<std::string> ranked_ids;
  std::vector<ScoredCandidate> top;        // candidates given to the reasoner
  TwoStageOutcome reasoning;
  SampleTimings timings;

  const std::optional<FinalVerdict>& verdict() const { return reasoning.verdict; }
};

// End-to-end verifier for one claim: retrieval, scoring, the filter
// module, ranking, top-k truncation and two-stage reasoning. Thread-safe;
// one instance serves concurrent samples.
class Pipeline {
public:
  Pipeline(Config config, std::string fingerprint);

  // Loads the image from claim.image_ref (EImageUnreadable on failure).
  VerificationOutcome verify(const ClaimPair& claim) const;
  VerificationOutcome verify(const ClaimPair& claim, const std::string& image_bytes) const;

  // Deterministic trace document (no wall-clock content).
  std::string serialize_trace(const VerificationOutcome& outcome) const;

  const Config& config() const { return config_; }
  const std::string& fingerprint() const { return fingerprint_; }
  FileCache& cache() const { return *cache_; }

private:
  Config config_;
  std::string fingerprint_;
  std::unique_ptr<FileCache> cache_;
  PromptTemplates templates_;
  HeuristicLanguageDetector detector_;

  std::shared_ptr<SearchClient> text_search_;
  std::shared_ptr<SearchClient> image_search_;
  std::shared_ptr<EmbeddingClient> text_embedding_;
  std::shared_ptr<EmbeddingClient> image_embedding_;
  std::shared_ptr<ChatClient> stage1_chat_;
  std::shared_ptr<ChatClient> stage2_chat_;
};

struct BenchmarkOptions {
  std::string report_dir;
  int jobs = 4;
};

// Runs every dataset record through the pipeline with a bounded worker
// pool. Per-sample failures become error rows; they never abort the run.
// Writes report.json, timings.json and per-sample traces under
// report_dir, and returns the assembled report.
EvalReport run_benchmark(const std::vector<DatasetRecord>& dataset,
                         const Pipeline& pipeline, const BenchmarkOptions& options);

}  // namespace oocheck
