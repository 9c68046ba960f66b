#pragma once

#include <string>
#include <string_view>

namespace oocheck {

// Collapses runs of whitespace to single spaces and trims the ends.
// This is the canonical form used for outgoing queries and cache payloads.
std::string normalize_whitespace(std::string_view text);

// Lowercase + whitespace collapse + ASCII punctuation strip.
// Used as the title key for domain-title deduplication.
std::string normalize_title(std::string_view title);

std::string to_lower(std::string_view text);

// Renders text on a single line for prompt blocks and log output.
std::string single_line(std::string_view text);

}  // namespace oocheck
