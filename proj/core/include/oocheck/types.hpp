#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oocheck {

// One image-caption pair under verification.
struct ClaimPair {
  std::string id;
  std::string image_ref;  // local path or URI to the image bytes
  std::string caption;
  std::optional<bool> gold_ooc;  // true = out-of-context pair
};

enum class Origin { TextSearch, ImageSearch };

inline std::string_view origin_name(Origin origin) {
  return origin == Origin::TextSearch ? "text" : "image";
}

// One retrieved external item after normalization.
struct EvidenceCandidate {
  std::string id;
  Origin origin = Origin::TextSearch;
  std::string source_url;
  std::string domain;  // lowercased registrable domain of source_url
  std::optional<std::string> title;
  std::optional<std::string> snippet;
  std::optional<std::string> image_ref;
  std::optional<std::string> published_at;
  std::optional<std::string> language;
  std::map<std::string, std::string> raw_meta;

  bool has_text() const { return snippet.has_value() || title.has_value(); }
};

enum class RequestKind { TextQuery, ReverseImage, EmbedText, EmbedImage, Chat, FetchImage };

inline std::string_view request_kind_name(RequestKind kind) {
  switch (kind) {
    case RequestKind::TextQuery: return "text_query";
    case RequestKind::ReverseImage: return "reverse_image";
    case RequestKind::EmbedText: return "embed_text";
    case RequestKind::EmbedImage: return "embed_image";
    case RequestKind::Chat: return "chat";
    case RequestKind::FetchImage: return "fetch_image";
  }
  return "unknown";
}

struct RetrievalRequest {
  RequestKind kind = RequestKind::TextQuery;
  std::string payload;  // caption text or image content hash
  int limit = 1;
};

// Cosine scores for one candidate against the claim. The final ranking
// score is the visual score when present, else the text score.
struct SimilarityScores {
  std::optional<double> text_sim;
  std::optional<double> visual_sim;
  double final = 0.0;
};

struct ScoredCandidate {
  EvidenceCandidate candidate;
  std::optional<SimilarityScores> scores;
  std::vector<std::string> warnings;
};

enum class Stance { Supports, Refutes, Irrelevant };

inline std::string_view stance_name(Stance stance) {
  switch (stance) {
    case Stance::Supports: return "supports";
    case Stance::Refutes: return "refutes";
    case Stance::Irrelevant: return "irrelevant";
  }
  return "irrelevant";
}

inline std::optional<Stance> stance_from_name(std::string_view name) {
  if (name == "supports") return Stance::Supports;
  if (name == "refutes") return Stance::Refutes;
  if (name == "irrelevant") return Stance::Irrelevant;
  return std::nullopt;
}

struct Stage1Assessment {
  struct PerCandidate {
    std::string candidate_id;
    Stance stance = Stance::Irrelevant;
    std::string rationale;
    std::vector<std::string> entities;
    std::vector<std::string> time;
    std::vector<std::string> place;

    bool operator==(const PerCandidate&) const = default;
  };
  std::vector<PerCandidate> per_candidate;
  std::string summary;

  bool operator==(const Stage1Assessment&) const = default;
};

enum class Label { OOC, NOOC };

inline std::string_view label_name(Label label) {
  return label == Label::OOC ? "OOC" : "NOOC";
}

inline std::optional<Label> label_from_name(std::string_view name) {
  if (name == "OOC") return Label::OOC;
  if (name == "NOOC") return Label::NOOC;
  return std::nullopt;
}

struct FinalVerdict {
  Label label = Label::NOOC;
  int confidence = 0;  // integer 0..10
  std::string explanation;
  std::vector<std::string> evidence_ids;

  bool operator==(const FinalVerdict&) const = default;
};

struct DatasetRecord {
  std::string id;
  std::string image_path;
  std::string caption;
  bool ooc = false;
};

}  // namespace oocheck
