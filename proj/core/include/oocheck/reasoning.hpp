#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oocheck/error.hpp"
#include "oocheck/prompt.hpp"
#include "oocheck/types.hpp"

namespace oocheck {

class ChatClient;

// Parses a stage-one completion. The response must contain exactly one
// fenced JSON block (or be a bare JSON object) with one entry per
// submitted candidate id. Throws EParseFailure with the offending span or
// ESchemaViolation on unknown/duplicate/missing ids and invalid stances.
Stage1Assessment parse_stage1_response(const std::string& text,
                                       const std::vector<std::string>& submitted_ids);

// Parses a stage-two completion into a FinalVerdict. Throws EParseFailure,
// EUnknownLabel, EConfidenceOutOfRange, or ESchemaViolation when a cited
// evidence id was never submitted.
FinalVerdict parse_stage2_response(const std::string& text,
                                   const std::vector<std::string>& submitted_ids);

// Canonical response rendering; parse(serialize(x)) == x.
std::string serialize_stage1_response(const Stage1Assessment& assessment);
std::string serialize_stage2_response(const FinalVerdict& verdict);

struct StageTrace {
  std::optional<PromptDocument> prompt;
  std::vector<std::string> raw_responses;  // one entry per attempt
  int retries = 0;
};

struct ReasoningTrace {
  StageTrace stage1;
  StageTrace stage2;
  std::optional<Stage1Assessment> assessment;
  std::optional<FinalVerdict> verdict;
  bool stage1_skipped = false;
  std::optional<std::string> error;
};

struct TwoStageOutcome {
  std::optional<FinalVerdict> verdict;  // absent on failure; never fabricated
  std::optional<Errc> error_code;
  ReasoningTrace trace;
};

// Runs stage one (evidence-guided verification) then stage two (final
// decision over the claim image). With zero candidates stage one is
// skipped and stage two receives an explicit no-evidence assessment. Each
// stage retries once after a parse-class failure, re-asking with a format
// reminder appended; at most four provider calls happen in total. The
// trace is always populated, including on failure.
TwoStageOutcome run_two_stage(const ClaimPair& claim,
                              std::optional<std::string_view> image_bytes,
                              const std::vector<ScoredCandidate>& top_candidates,
                              ChatClient& stage1_client,
                              ChatClient& stage2_client,
                              const PromptTemplates& templates);

}  // namespace oocheck
