#include "oocheck/retrieval.hpp"

#include <json.hpp>

#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"
#include "oocheck/text.hpp"
#include "oocheck/url.hpp"

using nlohmann::json;

namespace oocheck {

namespace {

std::optional<std::string> optional_field(const json& record, const char* field) {
  if (!record.contains(field)) return std::nullopt;
  const auto& value = record[field];
  if (value.is_null()) return std::nullopt;
  if (!value.is_string()) {
    throw Error(Errc::MalformedResponse,
                std::string("field ") + field + " is not a string");
  }
  std::string text = value.get<std::string>();
  if (text.empty()) return std::nullopt;  // absent, never empty-string
  return text;
}

EvidenceCandidate normalize_parsed(const json& record, Origin origin,
                                   const std::string& candidate_id) {
  if (!record.is_object()) {
    throw Error(Errc::MalformedResponse, "record is not an object");
  }
  auto url = optional_field(record, "url");
  if (!url) {
    throw Error(Errc::MalformedResponse, "record has no url");
  }
  auto domain = registrable_domain_of_url(*url);
  if (!domain) {
    throw Error(Errc::MalformedResponse, "record url has no parseable host: " + *url);
  }

  EvidenceCandidate candidate;
  candidate.id = candidate_id;
  candidate.origin = origin;
  candidate.source_url = *url;
  candidate.domain = *domain;
  candidate.title = optional_field(record, "title");
  candidate.snippet = optional_field(record, "snippet");
  candidate.image_ref = optional_field(record, "image_url");
  candidate.published_at = optional_field(record, "published_at");
  candidate.language = optional_field(record, "language");
  if (record.contains("meta") && record["meta"].is_object()) {
    for (const auto& [key, value] : record["meta"].items()) {
      candidate.raw_meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  if (!candidate.snippet && !candidate.image_ref) {
    throw Error(Errc::MalformedResponse,
                "record carries neither snippet nor image_url: " + *url);
  }
  return candidate;
}

}  // namespace

EvidenceCandidate normalize_record(const std::string& raw_record_json, Origin origin,
                                   const std::string& candidate_id) {
  json record;
  try {
    record = json::parse(raw_record_json);
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedResponse, std::string("record is not JSON: ") + e.what());
  }
  return normalize_parsed(record, origin, candidate_id);
}

RetrievalResult parse_search_response(const std::string& body, Origin origin,
                                      int limit, const std::string& id_prefix) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedResponse,
                std::string("search response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array()) {
    throw Error(Errc::MalformedResponse, "search response lacks a records array");
  }

  RetrievalResult result;
  size_t index = 0;
  for (const auto& record : doc["records"]) {
    if (static_cast<int>(result.candidates.size()) >= limit) break;
    ++index;
    std::string candidate_id = id_prefix + std::to_string(result.candidates.size() + 1);
    try {
      result.candidates.push_back(normalize_parsed(record, origin, candidate_id));
    } catch (const Error& e) {
      result.warnings.push_back("skipped record " + std::to_string(index) + ": " + e.what());
    }
  }
  return result;
}

RetrievalResult retrieve_text_evidence(const ClaimPair& claim, int limit,
                                       SearchClient& provider) {
  if (limit < 1) {
    throw Error(Errc::ConfigInvalid, "retrieval limit must be >= 1");
  }
  RetrievalRequest request{RequestKind::TextQuery, normalize_whitespace(claim.caption),
                           limit};
  if (request.payload.empty()) {
    throw Error(Errc::EmptyText, "claim caption is empty");
  }
  std::string body = provider.fetch(request);
  return parse_search_response(body, Origin::TextSearch, limit, "t");
}

RetrievalResult retrieve_visual_evidence(const ClaimPair& claim,
                                         const std::string& image_bytes, int limit,
                                         SearchClient& provider) {
  if (limit < 1) {
    throw Error(Errc::ConfigInvalid, "retrieval limit must be >= 1");
  }
  if (image_bytes.empty()) {
    throw Error(Errc::ImageUnreadable, "claim image " + claim.image_ref + " is empty");
  }
  RetrievalRequest request{RequestKind::ReverseImage, sha256_hex(image_bytes), limit};
  std::string body = provider.fetch(request);
  return parse_search_response(body, Origin::ImageSearch, limit, "v");
}

}  // namespace oocheck
