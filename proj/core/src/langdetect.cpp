#include "oocheck/langdetect.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>

#include "oocheck/text.hpp"

namespace oocheck {

namespace {

// Enough of UTF-8 to classify scripts; invalid sequences decode as U+FFFD.
uint32_t decode_utf8(std::string_view text, size_t& i) {
  unsigned char c = text[i];
  if (c < 0x80) {
    ++i;
    return c;
  }
  int extra = 0;
  uint32_t cp = 0;
  if ((c & 0xE0) == 0xC0) {
    cp = c & 0x1F;
    extra = 1;
  } else if ((c & 0xF0) == 0xE0) {
    cp = c & 0x0F;
    extra = 2;
  } else if ((c & 0xF8) == 0xF0) {
    cp = c & 0x07;
    extra = 3;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + extra >= text.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k <= extra; ++k) {
    unsigned char cc = text[i + k];
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += extra + 1;
  return cp;
}

struct ScriptRange {
  uint32_t lo, hi;
  const char* tag;
};

constexpr std::array<ScriptRange, 10> kScripts = {{
    {0x0400, 0x04FF, "und-Cyrl"},
    {0x0370, 0x03FF, "und-Grek"},
    {0x0590, 0x05FF, "und-Hebr"},
    {0x0600, 0x06FF, "und-Arab"},
    {0x0900, 0x097F, "und-Deva"},
    {0x0E00, 0x0E7F, "und-Thai"},
    {0x3040, 0x30FF, "und-Jpan"},
    {0x4E00, 0x9FFF, "und-Hani"},
    {0xAC00, 0xD7AF, "und-Hang"},
    {0x0100, 0x024F, "latin-ext"},
}};

const char* script_of(uint32_t cp) {
  for (const auto& range : kScripts) {
    if (cp >= range.lo && cp <= range.hi) return range.tag;
  }
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
      (cp >= 0x00C0 && cp <= 0x00FF)) {
    return "latin";
  }
  return nullptr;
}

bool is_english_function_word(const std::string& word) {
  static const std::array<const char*, 48> kWords = {
      "the", "of",   "and",  "to",   "in",   "is",   "was",  "for",
      "on",  "with", "as",   "at",   "by",   "from", "that", "this",
      "it",  "are",  "be",   "has",  "have", "had",  "he",   "she",
      "they", "his", "her",  "its",  "a",    "an",   "not",  "but",
      "or",  "were", "been", "their", "who",  "which", "after", "over",
      "into", "than", "when", "will", "would", "about", "during", "near"};
  for (const char* w : kWords) {
    if (word == w) return true;
  }
  return false;
}

}  // namespace

std::optional<std::string> HeuristicLanguageDetector::detect(
    std::string_view text) const {
  size_t i = 0;
  size_t latin = 0;
  size_t total_letters = 0;
  std::map<std::string, size_t> script_counts;
  while (i < text.size()) {
    uint32_t cp = decode_utf8(text, i);
    const char* tag = script_of(cp);
    if (!tag) continue;
    ++total_letters;
    if (std::string_view(tag) == "latin" || std::string_view(tag) == "latin-ext") {
      ++latin;
    } else {
      ++script_counts[tag];
    }
  }
  if (total_letters == 0) return std::nullopt;

  for (const auto& [tag, count] : script_counts) {
    if (count * 10 >= total_letters * 3) {  // >= 30% of letters
      return tag;
    }
  }
  if (latin * 10 < total_letters * 7) return std::nullopt;

  // Latin-dominant: look for English function words.
  std::istringstream words{to_lower(std::string(text))};
  std::string word;
  size_t tokens = 0, hits = 0;
  while (words >> word) {
    std::string cleaned;
    for (unsigned char c : word) {
      if (std::isalpha(c)) cleaned.push_back(static_cast<char>(c));
    }
    if (cleaned.empty()) continue;
    ++tokens;
    if (is_english_function_word(cleaned)) ++hits;
  }
  if (tokens == 0) return std::nullopt;
  if (hits > 0) return "en";
  return std::nullopt;
}

bool language_matches(std::string_view tag, std::string_view wanted) {
  auto primary = [](std::string_view t) {
    size_t dash = t.find('-');
    return to_lower(dash == std::string_view::npos ? t : t.substr(0, dash));
  };
  return primary(tag) == primary(wanted);
}

}  // namespace oocheck
