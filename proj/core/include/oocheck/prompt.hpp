#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oocheck/types.hpp"

namespace oocheck {

// A fully expanded provider request: system text plus an ordered list of
// text and image parts. Serialization is canonical, so identical inputs
// always produce byte-identical documents.
struct PromptDocument {
  struct Part {
    enum class Type { Text, Image };
    Type type = Type::Text;
    std::string content;        // text, or the image reference
    std::string content_sha256; // set for image parts
    bool operator==(const Part&) const = default;
  };

  std::string system_text;
  std::vector<Part> parts;
  std::string template_id;
  std::string template_version;

  std::string serialize() const;
  std::string joined_text() const;  // all text parts concatenated
  bool operator==(const PromptDocument&) const = default;
};

// Stage templates are text files named <id>.<version>.txt with a system
// section, a "---" separator line, and a user section containing named
// placeholders ({{caption}}, {{candidates}}, {{claim_image}}, ...).
struct PromptTemplates {
  struct Entry {
    std::string id;
    std::string version;
    std::string system_text;
    std::string user_text;
  };
  Entry stage1;
  Entry stage2;

  static PromptTemplates load(const std::filesystem::path& dir);
};

// Serializes the claim caption plus each candidate block (id, domain,
// title, snippet, published_at, text_sim, visual_sim) in ranked order and
// the structured-output instructions. With zero candidates the document
// carries an explicit no-evidence clause.
PromptDocument build_stage1_prompt(const ClaimPair& claim,
                                   const std::vector<ScoredCandidate>& ranked,
                                   const PromptTemplates& templates);

// Embeds the claim image as the single image part together with the
// caption and the stage-one outcome. When image_bytes is not supplied the
// image is read from claim.image_ref (throws EImageUnreadable).
PromptDocument build_stage2_prompt(const ClaimPair& claim,
                                   const Stage1Assessment& assessment,
                                   const PromptTemplates& templates,
                                   std::optional<std::string_view> image_bytes = std::nullopt);

// Candidate block rendering shared by the stage-one builder; exposed for
// tooling that needs to locate blocks inside a prompt.
std::string render_candidate_block(const ScoredCandidate& sc);

inline constexpr std::string_view kCandidateHeaderPrefix = "### candidate ";
inline constexpr std::string_view kNoEvidenceClause =
    "No external evidence was retrieved for this claim.";

}  // namespace oocheck
