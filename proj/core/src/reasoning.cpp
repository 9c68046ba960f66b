#include "oocheck/reasoning.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "oocheck/error.hpp"
#include "oocheck/providers.hpp"

using nlohmann::json;

namespace oocheck {

namespace {

constexpr std::string_view kFenceOpen = "```json";
constexpr std::string_view kFenceClose = "```";

// Extracts the JSON payload: the first fenced ```json block, or the whole
// trimmed text when it is itself a JSON object.
std::string extract_json_payload(const std::string& text) {
  size_t open = text.find(kFenceOpen);
  if (open != std::string::npos) {
    size_t body_start = open + kFenceOpen.size();
    size_t close = text.find(kFenceClose, body_start);
    if (close == std::string::npos) {
      throw Error(Errc::ParseFailure,
                  "unterminated ```json fence starting at byte " + std::to_string(open));
    }
    return text.substr(body_start, close - body_start);
  }
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    throw Error(Errc::ParseFailure, "no ```json block and no JSON object in response");
  }
  return text.substr(first);
}

json parse_json_payload(const std::string& text) {
  std::string payload = extract_json_payload(text);
  try {
    return json::parse(payload);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseFailure,
                "invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

std::vector<std::string> parse_string_list(const json& value, const char* field) {
  if (!value.is_array()) {
    throw Error(Errc::ParseFailure, std::string(field) + " is not an array");
  }
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw Error(Errc::ParseFailure, std::string(field) + " has a non-string entry");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string require_string(const json& obj, const char* field) {
  if (!obj.contains(field) || !obj[field].is_string()) {
    throw Error(Errc::ParseFailure, std::string("missing or non-string field ") + field);
  }
  return obj[field].get<std::string>();
}

}  // namespace

Stage1Assessment parse_stage1_response(const std::string& text,
                                       const std::vector<std::string>& submitted_ids) {
  json doc = parse_json_payload(text);
  if (!doc.is_object() || !doc.contains("candidates") || !doc["candidates"].is_array()) {
    throw Error(Errc::ParseFailure, "response lacks a candidates array");
  }

  std::set<std::string> submitted(submitted_ids.begin(), submitted_ids.end());
  std::set<std::string> seen;
  Stage1Assessment assessment;
  for (const auto& entry : doc["candidates"]) {
    if (!entry.is_object()) {
      throw Error(Errc::ParseFailure, "candidates array has a non-object entry");
    }
    Stage1Assessment::PerCandidate pc;
    pc.candidate_id = require_string(entry, "id");
    if (!submitted.count(pc.candidate_id)) {
      throw Error(Errc::SchemaViolation, "unknown candidate id " + pc.candidate_id);
    }
    if (!seen.insert(pc.candidate_id).second) {
      throw Error(Errc::SchemaViolation, "duplicate candidate id " + pc.candidate_id);
    }
    std::string stance = require_string(entry, "stance");
    auto parsed = stance_from_name(stance);
    if (!parsed) {
      throw Error(Errc::SchemaViolation, "invalid stance '" + stance + "'");
    }
    pc.stance = *parsed;
    pc.rationale = require_string(entry, "rationale");
    if (entry.contains("entities")) pc.entities = parse_string_list(entry["entities"], "entities");
    if (entry.contains("time")) pc.time = parse_string_list(entry["time"], "time");
    if (entry.contains("place")) pc.place = parse_string_list(entry["place"], "place");
    assessment.per_candidate.push_back(std::move(pc));
  }

  for (const auto& id : submitted_ids) {
    if (!seen.count(id)) {
      throw Error(Errc::SchemaViolation, "missing entry for candidate id " + id);
    }
  }
  assessment.summary = require_string(doc, "summary");
  return assessment;
}

FinalVerdict parse_stage2_response(const std::string& text,
                                   const std::vector<std::string>& submitted_ids) {
  json doc = parse_json_payload(text);
  if (!doc.is_object()) {
    throw Error(Errc::ParseFailure, "response is not a JSON object");
  }

  FinalVerdict verdict;
  std::string label = require_string(doc, "label");
  auto parsed_label = label_from_name(label);
  if (!parsed_label) {
    throw Error(Errc::UnknownLabel, "label '" + label + "' is not OOC or NOOC");
  }
  verdict.label = *parsed_label;

  if (!doc.contains("confidence") || !doc["confidence"].is_number_integer()) {
    throw Error(Errc::ConfidenceOutOfRange,
                "confidence must be an integer between 0 and 10");
  }
  long long confidence = doc["confidence"].get<long long>();
  if (confidence < 0 || confidence > 10) {
    throw Error(Errc::ConfidenceOutOfRange,
                "confidence " + std::to_string(confidence) + " outside 0..10");
  }
  verdict.confidence = static_cast<int>(confidence);
  verdict.explanation = require_string(doc, "explanation");

  if (doc.contains("evidence")) {
    verdict.evidence_ids = parse_string_list(doc["evidence"], "evidence");
    std::set<std::string> submitted(submitted_ids.begin(), submitted_ids.end());
    for (const auto& id : verdict.evidence_ids) {
      if (!submitted.count(id)) {
        throw Error(Errc::SchemaViolation, "cited evidence id " + id + " was not submitted");
      }
    }
  }
  return verdict;
}

std::string serialize_stage1_response(const Stage1Assessment& assessment) {
  json doc;
  auto candidates = json::array();
  for (const auto& pc : assessment.per_candidate) {
    json entry;
    entry["id"] = pc.candidate_id;
    entry["stance"] = std::string(stance_name(pc.stance));
    entry["rationale"] = pc.rationale;
    entry["entities"] = pc.entities;
    entry["time"] = pc.time;
    entry["place"] = pc.place;
    candidates.push_back(std::move(entry));
  }
  doc["candidates"] = std::move(candidates);
  doc["summary"] = assessment.summary;
  return std::string(kFenceOpen) + "\n" + doc.dump(2) + "\n" + std::string(kFenceClose);
}

std::string serialize_stage2_response(const FinalVerdict& verdict) {
  json doc;
  doc["label"] = std::string(label_name(verdict.label));
  doc["confidence"] = verdict.confidence;
  doc["explanation"] = verdict.explanation;
  doc["evidence"] = verdict.evidence_ids;
  return std::string(kFenceOpen) + "\n" + doc.dump(2) + "\n" + std::string(kFenceClose);
}

namespace {

bool is_parse_class_error(Errc code) {
  return code == Errc::ParseFailure || code == Errc::SchemaViolation ||
         code == Errc::ConfidenceOutOfRange || code == Errc::UnknownLabel;
}

PromptDocument with_format_reminder(const PromptDocument& doc) {
  PromptDocument out = doc;
  out.parts.push_back(
      {PromptDocument::Part::Type::Text,
       "Reminder: your previous reply could not be parsed. Answer again with "
       "exactly one fenced ```json block matching the requested schema and no "
       "other text.",
       ""});
  return out;
}

// Asks once, re-asks once on a parse-class failure, then gives up.
template <typename ParseFn>
auto ask_with_retry(ChatClient& client, const PromptDocument& prompt, StageTrace& trace,
                    ParseFn parse) {
  trace.prompt = prompt;
  std::string raw = client.complete(prompt);
  trace.raw_responses.push_back(raw);
  try {
    return parse(raw);
  } catch (const Error& first_error) {
    if (!is_parse_class_error(first_error.code())) throw;
    trace.retries = 1;
    std::string again = client.complete(with_format_reminder(prompt));
    trace.raw_responses.push_back(again);
    return parse(again);
  }
}

}  // namespace

TwoStageOutcome run_two_stage(const ClaimPair& claim,
                              std::optional<std::string_view> image_bytes,
                              const std::vector<ScoredCandidate>& top_candidates,
                              ChatClient& stage1_client,
                              ChatClient& stage2_client,
                              const PromptTemplates& templates) {
  TwoStageOutcome outcome;
  std::vector<std::string> submitted_ids;
  for (const auto& sc : top_candidates) {
    submitted_ids.push_back(sc.candidate.id);
  }

  try {
    Stage1Assessment assessment;
    if (top_candidates.empty()) {
      outcome.trace.stage1_skipped = true;
      assessment.summary = std::string(kNoEvidenceClause);
    } else {
      PromptDocument prompt = build_stage1_prompt(claim, top_candidates, templates);
      assessment = ask_with_retry(
          stage1_client, prompt, outcome.trace.stage1,
          [&](const std::string& raw) { return parse_stage1_response(raw, submitted_ids); });
    }
    outcome.trace.assessment = assessment;

    PromptDocument stage2_prompt =
        build_stage2_prompt(claim, assessment, templates, image_bytes);
    FinalVerdict verdict = ask_with_retry(
        stage2_client, stage2_prompt, outcome.trace.stage2,
        [&](const std::string& raw) { return parse_stage2_response(raw, submitted_ids); });
    outcome.trace.verdict = verdict;
    outcome.verdict = verdict;
  } catch (const Error& e) {
    outcome.error_code = e.code();
    outcome.trace.error = e.what();
  }
  return outcome;
}

}  // namespace oocheck
