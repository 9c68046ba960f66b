#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace oocheck {

// Extracts the lowercased host from a URL. Returns nullopt when the input
// has no parseable host.
std::optional<std::string> url_host(std::string_view url);

// Lowercased registrable domain for a host: the public suffix plus one
// label. Uses a built-in multi-label suffix table covering the common
// country-code second-level suffixes; unknown TLDs fall back to the
// single-label rule. IP literals and bare suffixes are returned unchanged.
std::string registrable_domain(std::string_view host);

// Convenience: host extraction + registrable_domain in one step.
std::optional<std::string> registrable_domain_of_url(std::string_view url);

}  // namespace oocheck
