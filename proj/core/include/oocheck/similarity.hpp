#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oocheck/types.hpp"

namespace oocheck {

struct EmbeddingVector {
  std::vector<double> values;

  size_t dim() const { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

// Cosine similarity in [-1, 1]. Throws EDimensionMismatch on unequal
// dimensions and EZeroVector when either vector is all-zero.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// Parses and validates a provider embedding response
// ({"vector": [...], "dim": n}). Rejects empty, non-finite and all-zero
// vectors as EMalformedResponse.
EmbeddingVector parse_embedding_response(const std::string& body);

std::string serialize_embedding_response(const EmbeddingVector& vec);

class EmbeddingClient;
class ImageResolver;

// Embeds whitespace-normalized text; throws EEmptyText on empty input.
// Deterministic per (provider, text).
EmbeddingVector embed_text(EmbeddingClient& provider, const std::string& text);

// Embeds raw image bytes; throws EImageUnreadable on empty input.
EmbeddingVector embed_image(EmbeddingClient& provider, const std::string& image_bytes);

// Scores one candidate against the claim embeddings. The text score uses
// the snippet (falling back to the title); the visual score uses the
// candidate image when resolvable. A failed optional modality records a
// warning instead of aborting; when no modality can be scored the result
// has no scores at all.
ScoredCandidate score_candidate(const std::optional<EmbeddingVector>& claim_text,
                                const std::optional<EmbeddingVector>& claim_image,
                                const EvidenceCandidate& candidate,
                                EmbeddingClient* text_provider,
                                EmbeddingClient* image_provider,
                                const ImageResolver& resolver);

}  // namespace oocheck
