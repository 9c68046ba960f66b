#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace oocheck {

// Pluggable language detection. Returns a BCP-47-ish tag, or nullopt when
// the detector cannot tell (callers treat that as fail-open).
class LanguageDetector {
public:
  virtual ~LanguageDetector() = default;
  virtual std::optional<std::string> detect(std::string_view text) const = 0;
};

// Heuristic detector: dominant non-Latin scripts map to script tags
// ("und-Cyrl", "und-Hani", ...); Latin text with English function words
// maps to "en"; anything else is undetectable.
class HeuristicLanguageDetector : public LanguageDetector {
public:
  std::optional<std::string> detect(std::string_view text) const override;
};

// True when two tags share a primary subtag ("en" matches "en-GB").
bool language_matches(std::string_view tag, std::string_view wanted);

}  // namespace oocheck
