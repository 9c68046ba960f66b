#include <cmath>

#include <json.hpp>

#include "oocheck/error.hpp"
#include "oocheck/providers.hpp"
#include "oocheck/similarity.hpp"
#include "oocheck/text.hpp"

namespace oocheck {

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw Error(Errc::DimensionMismatch,
                "dims " + std::to_string(u.dim()) + " vs " + std::to_string(v.dim()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) {
    throw Error(Errc::ZeroVector, "cosine similarity of all-zero vector");
  }
  double result = dot / (std::sqrt(nu) * std::sqrt(nv));
  if (result > 1.0) result = 1.0;
  if (result < -1.0) result = -1.0;
  return result;
}

EmbeddingVector parse_embedding_response(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::MalformedResponse,
                std::string("embedding response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vector") || !doc["vector"].is_array()) {
    throw Error(Errc::MalformedResponse, "embedding response missing vector array");
  }
  EmbeddingVector vec;
  for (const auto& item : doc["vector"]) {
    if (!item.is_number()) {
      throw Error(Errc::MalformedResponse, "embedding vector has non-numeric entry");
    }
    vec.values.push_back(item.get<double>());
  }
  if (vec.values.empty()) {
    throw Error(Errc::MalformedResponse, "embedding vector is empty");
  }
  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_integer() ||
        doc["dim"].get<long long>() != static_cast<long long>(vec.values.size())) {
      throw Error(Errc::MalformedResponse, "embedding dim does not match vector length");
    }
  }
  bool all_zero = true;
  for (double x : vec.values) {
    if (!std::isfinite(x)) {
      throw Error(Errc::MalformedResponse, "embedding vector has non-finite entry");
    }
    if (x != 0.0) all_zero = false;
  }
  if (all_zero) {
    throw Error(Errc::MalformedResponse, "embedding vector is all-zero");
  }
  return vec;
}

std::string serialize_embedding_response(const EmbeddingVector& vec) {
  nlohmann::json doc;
  doc["vector"] = vec.values;
  doc["dim"] = vec.values.size();
  return doc.dump();
}

EmbeddingVector embed_text(EmbeddingClient& provider, const std::string& text) {
  std::string normalized = normalize_whitespace(text);
  if (normalized.empty()) {
    throw Error(Errc::EmptyText, "cannot embed empty text");
  }
  return parse_embedding_response(provider.fetch(RequestKind::EmbedText, normalized));
}

EmbeddingVector embed_image(EmbeddingClient& provider, const std::string& image_bytes) {
  if (image_bytes.empty()) {
    throw Error(Errc::ImageUnreadable, "cannot embed empty image bytes");
  }
  return parse_embedding_response(provider.fetch(RequestKind::EmbedImage, image_bytes));
}

ScoredCandidate score_candidate(const std::optional<EmbeddingVector>& claim_text,
                                const std::optional<EmbeddingVector>& claim_image,
                                const EvidenceCandidate& candidate,
                                EmbeddingClient* text_provider,
                                EmbeddingClient* image_provider,
                                const ImageResolver& resolver) {
  ScoredCandidate out;
  out.candidate = candidate;

  std::optional<double> text_sim;
  std::optional<double> visual_sim;

  const std::optional<std::string>& candidate_text =
      candidate.snippet ? candidate.snippet : candidate.title;
  if (candidate_text && claim_text && text_provider) {
    try {
      EmbeddingVector vec = embed_text(*text_provider, *candidate_text);
      text_sim = cosine_similarity(*claim_text, vec);
    } catch (const Error& e) {
      out.warnings.push_back("text scoring failed for " + candidate.id + ": " + e.what());
    }
  }

  if (candidate.image_ref && claim_image && image_provider) {
    try {
      std::string bytes = resolver.resolve(*candidate.image_ref);
      EmbeddingVector vec = embed_image(*image_provider, bytes);
      visual_sim = cosine_similarity(*claim_image, vec);
    } catch (const Error& e) {
      out.warnings.push_back("visual scoring failed for " + candidate.id + ": " + e.what());
    }
  }

  if (text_sim || visual_sim) {
    SimilarityScores scores;
    scores.text_sim = text_sim;
    scores.visual_sim = visual_sim;
    scores.final = visual_sim ? *visual_sim : *text_sim;
    out.scores = scores;
  }
  return out;
}

}  // namespace oocheck
