#include "oocheck/url.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

#include "oocheck/text.hpp"

namespace oocheck {

namespace {

// Multi-label public suffixes. Single-label TLDs are handled by the
// fallback rule, so only second-level (and deeper) suffixes are listed.
constexpr std::array<std::string_view, 64> kMultiLabelSuffixes = {
    "co.uk",  "org.uk", "ac.uk",  "gov.uk", "me.uk",  "net.uk", "sch.uk",
    "com.au", "net.au", "org.au", "edu.au", "gov.au",
    "co.jp",  "or.jp",  "ne.jp",  "ac.jp",  "go.jp",
    "co.nz",  "org.nz", "net.nz", "govt.nz",
    "co.za",  "org.za", "web.za",
    "com.br", "org.br", "gov.br", "net.br",
    "com.cn", "org.cn", "net.cn", "gov.cn",
    "com.mx", "org.mx",
    "com.ar", "com.tr", "com.sg", "com.hk", "com.tw", "com.my",
    "co.in",  "org.in", "net.in", "gov.in",
    "co.kr",  "or.kr",
    "co.il",  "org.il",
    "com.ua", "co.th",  "com.ph", "com.vn", "com.eg", "com.sa",
    "co.id",  "com.pk", "com.ng", "co.ke",
    "com.co", "com.pe", "com.ve", "com.uy", "com.do", "com.gt",
};

bool is_ip_literal(std::string_view host) {
  if (!host.empty() && host.front() == '[') return true;  // IPv6
  return !host.empty() &&
         std::all_of(host.begin(), host.end(), [](unsigned char c) {
           return std::isdigit(c) || c == '.';
         });
}

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  size_t start = 0;
  while (start <= host.size()) {
    size_t dot = host.find('.', start);
    if (dot == std::string_view::npos) {
      labels.push_back(host.substr(start));
      break;
    }
    labels.push_back(host.substr(start, dot - start));
    start = dot + 1;
  }
  return labels;
}

}  // namespace

std::optional<std::string> url_host(std::string_view url) {
  std::string_view rest = url;
  size_t scheme_end = rest.find("://");
  if (scheme_end != std::string_view::npos) {
    rest = rest.substr(scheme_end + 3);
  } else if (rest.substr(0, 2) == "//") {
    rest = rest.substr(2);
  }
  size_t authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  size_t at = authority.rfind('@');
  if (at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  if (!authority.empty() && authority.front() == '[') {
    size_t close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    return to_lower(authority.substr(0, close + 1));
  }
  size_t colon = authority.find(':');
  if (colon != std::string_view::npos) {
    authority = authority.substr(0, colon);
  }
  while (!authority.empty() && authority.back() == '.') {
    authority.remove_suffix(1);
  }
  if (authority.empty() || authority.find('.') == std::string_view::npos) {
    // Reject single-label hosts; evidence URLs always carry a full domain.
    return std::nullopt;
  }
  return to_lower(authority);
}

std::string registrable_domain(std::string_view host) {
  std::string lowered = to_lower(host);
  if (is_ip_literal(lowered)) return lowered;

  auto labels = split_labels(lowered);
  if (labels.size() <= 1) return lowered;

  // Longest multi-label suffix match wins; otherwise the last label is the
  // suffix.
  size_t suffix_labels = 1;
  for (size_t take = std::min<size_t>(3, labels.size() - 1); take >= 2; --take) {
    std::string candidate;
    for (size_t i = labels.size() - take; i < labels.size(); ++i) {
      if (!candidate.empty()) candidate.push_back('.');
      candidate += labels[i];
    }
    if (std::find(kMultiLabelSuffixes.begin(), kMultiLabelSuffixes.end(),
                  candidate) != kMultiLabelSuffixes.end()) {
      suffix_labels = take;
      break;
    }
  }
  size_t keep = std::min(labels.size(), suffix_labels + 1);
  std::string out;
  for (size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels[i];
  }
  return out;
}

std::optional<std::string> registrable_domain_of_url(std::string_view url) {
  auto host = url_host(url);
  if (!host) return std::nullopt;
  return registrable_domain(*host);
}

}  // namespace oocheck
