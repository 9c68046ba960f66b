#pragma once

#include <string>
#include <vector>

#include "oocheck/providers.hpp"
#include "oocheck/types.hpp"

namespace oocheck {

// Normalizes one raw provider record (JSON object with url, title?,
// snippet?, image_url?, published_at?, language?) into a candidate.
// Throws EMalformedResponse when the record has no URL or carries neither
// snippet nor image. Empty optional strings are treated as absent.
EvidenceCandidate normalize_record(const std::string& raw_record_json, Origin origin,
                                   const std::string& candidate_id);

struct RetrievalResult {
  std::vector<EvidenceCandidate> candidates;
  std::vector<std::string> warnings;  // skipped records, etc.
};

// Claim-conditioned text retrieval: the outgoing query is the caption
// after whitespace normalization. Returns at most `limit` candidates in
// provider order, ids "t1", "t2", ...
RetrievalResult retrieve_text_evidence(const ClaimPair& claim, int limit,
                                       SearchClient& provider);

// Reverse-image retrieval keyed by the content hash of the claim image
// bytes. Ids "v1", "v2", ...
RetrievalResult retrieve_visual_evidence(const ClaimPair& claim,
                                         const std::string& image_bytes, int limit,
                                         SearchClient& provider);

// Parses a provider response body ({"records": [...]}) into candidates.
// Records that fail normalization are skipped with a warning.
RetrievalResult parse_search_response(const std::string& body, Origin origin,
                                      int limit, const std::string& id_prefix);

}  // namespace oocheck
