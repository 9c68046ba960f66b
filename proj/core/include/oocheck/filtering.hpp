#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oocheck/langdetect.hpp"
#include "oocheck/types.hpp"

namespace oocheck {

enum class FilterStrategy { SimilarityOnly, DomainOnly, Both };

std::string_view filter_strategy_name(FilterStrategy strategy);
std::optional<FilterStrategy> filter_strategy_from_name(std::string_view name);

struct FilterConfig {
  double theta = 0.7;  // similarity threshold; keep when any modality score >= theta
  FilterStrategy strategy = FilterStrategy::Both;
  std::vector<std::string> domain_allowlist;  // lowercased registrable domains
  std::string language = "en";
  bool dedup_enabled = true;
  // Ablation switches.
  bool drop_text_evidence = false;
  bool drop_image_evidence = false;
  bool disable_domain_filter = false;
};

// Per-candidate record of what each stage decided; every input candidate
// appears exactly once per stage it reached.
struct FilterTrace {
  struct Entry {
    std::string candidate_id;
    std::string stage;
    bool kept = false;
    std::string detail;
  };
  std::vector<Entry> entries;

  size_t removed_count() const;
  void append(const FilterTrace& other);
};

struct FilterOutcome {
  std::vector<ScoredCandidate> kept;
  FilterTrace trace;
};

// Stage one: keep candidates whose best present modality score meets the
// threshold. Order-preserving. Throws EUnscoredCandidate on unscored input.
FilterOutcome filter_by_similarity(const std::vector<ScoredCandidate>& candidates,
                                   double theta);

// Keep candidates whose domain is allowlisted. Throws EEmptyAllowlist when
// called with an empty list.
FilterOutcome filter_by_domain(const std::vector<ScoredCandidate>& candidates,
                               const std::vector<std::string>& allowlist);

// Keep candidates whose declared or detected language matches `language`.
// Image-only candidates and undetectable text are kept (fail-open).
FilterOutcome filter_by_language(const std::vector<ScoredCandidate>& candidates,
                                 const std::string& language,
                                 const LanguageDetector& detector);

// Keep the first candidate per (domain, normalized title) group. Untitled
// candidates are never treated as duplicates of each other.
FilterOutcome deduplicate(const std::vector<ScoredCandidate>& candidates);

// Full composition: ablation drops, then similarity (skipped under
// DomainOnly), then domain (skipped under SimilarityOnly or the ablation
// flag), then language, then dedup. The trace covers every removal.
FilterOutcome run_filter_module(const std::vector<ScoredCandidate>& candidates,
                                const FilterConfig& config,
                                const LanguageDetector& detector);

// Loads an allowlist file: one registrable domain per line, '#' comments.
std::vector<std::string> load_allowlist(const std::string& path);

}  // namespace oocheck
