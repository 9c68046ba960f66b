#include "oocheck/filtering.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>

#include "oocheck/error.hpp"
#include "oocheck/text.hpp"

namespace oocheck {

namespace {

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

const SimilarityScores& require_scores(const ScoredCandidate& sc) {
  if (!sc.scores) {
    throw Error(Errc::UnscoredCandidate, "candidate " + sc.candidate.id + " has no scores");
  }
  return *sc.scores;
}

}  // namespace

std::string_view filter_strategy_name(FilterStrategy strategy) {
  switch (strategy) {
    case FilterStrategy::SimilarityOnly: return "similarity";
    case FilterStrategy::DomainOnly: return "domain";
    case FilterStrategy::Both: return "both";
  }
  return "both";
}

std::optional<FilterStrategy> filter_strategy_from_name(std::string_view name) {
  if (name == "similarity") return FilterStrategy::SimilarityOnly;
  if (name == "domain") return FilterStrategy::DomainOnly;
  if (name == "both") return FilterStrategy::Both;
  return std::nullopt;
}

size_t FilterTrace::removed_count() const {
  return static_cast<size_t>(
      std::count_if(entries.begin(), entries.end(),
                    [](const Entry& e) { return !e.kept; }));
}

void FilterTrace::append(const FilterTrace& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

FilterOutcome filter_by_similarity(const std::vector<ScoredCandidate>& candidates,
                                   double theta) {
  FilterOutcome out;
  for (const auto& sc : candidates) {
    const auto& scores = require_scores(sc);
    double best = -2.0;
    if (scores.text_sim) best = std::max(best, *scores.text_sim);
    if (scores.visual_sim) best = std::max(best, *scores.visual_sim);
    bool keep = best >= theta;
    out.trace.entries.push_back(
        {sc.candidate.id, "similarity", keep,
         "best=" + format_score(best) + " theta=" + format_score(theta)});
    if (keep) out.kept.push_back(sc);
  }
  return out;
}

FilterOutcome filter_by_domain(const std::vector<ScoredCandidate>& candidates,
                               const std::vector<std::string>& allowlist) {
  if (allowlist.empty()) {
    throw Error(Errc::EmptyAllowlist, "domain filter enabled with empty allowlist");
  }
  std::unordered_set<std::string> allowed(allowlist.begin(), allowlist.end());
  FilterOutcome out;
  for (const auto& sc : candidates) {
    bool keep = allowed.count(sc.candidate.domain) > 0;
    out.trace.entries.push_back(
        {sc.candidate.id, "domain", keep, "domain=" + sc.candidate.domain});
    if (keep) out.kept.push_back(sc);
  }
  return out;
}

FilterOutcome filter_by_language(const std::vector<ScoredCandidate>& candidates,
                                 const std::string& language,
                                 const LanguageDetector& detector) {
  FilterOutcome out;
  for (const auto& sc : candidates) {
    const auto& c = sc.candidate;
    bool keep = true;
    std::string detail;
    if (!c.has_text()) {
      detail = "image-only";
    } else if (c.language) {
      keep = language_matches(*c.language, language);
      detail = "declared=" + *c.language;
    } else {
      const std::string& text = c.snippet ? *c.snippet : *c.title;
      auto detected = detector.detect(text);
      if (!detected) {
        detail = "undetectable";
      } else {
        keep = language_matches(*detected, language);
        detail = "detected=" + *detected;
      }
    }
    out.trace.entries.push_back({c.id, "language", keep, detail});
    if (keep) out.kept.push_back(sc);
  }
  return out;
}

FilterOutcome deduplicate(const std::vector<ScoredCandidate>& candidates) {
  FilterOutcome out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& sc : candidates) {
    const auto& c = sc.candidate;
    bool keep = true;
    std::string detail;
    if (c.title) {
      auto key = std::make_pair(c.domain, normalize_title(*c.title));
      keep = seen.insert(key).second;
      detail = "key=" + key.first + "|" + key.second;
    } else {
      detail = "untitled";
    }
    out.trace.entries.push_back({c.id, "dedup", keep, detail});
    if (keep) out.kept.push_back(sc);
  }
  return out;
}

FilterOutcome run_filter_module(const std::vector<ScoredCandidate>& candidates,
                                const FilterConfig& config,
                                const LanguageDetector& detector) {
  FilterOutcome result;
  std::vector<ScoredCandidate> current;

  for (const auto& sc : candidates) {
    bool drop = (config.drop_text_evidence && sc.candidate.origin == Origin::TextSearch) ||
                (config.drop_image_evidence && sc.candidate.origin == Origin::ImageSearch);
    if (drop) {
      result.trace.entries.push_back(
          {sc.candidate.id, "ablation", false,
           std::string("dropped origin=") + std::string(origin_name(sc.candidate.origin))});
    } else {
      current.push_back(sc);
    }
  }

  if (config.strategy != FilterStrategy::DomainOnly) {
    auto stage = filter_by_similarity(current, config.theta);
    for (const auto& e : stage.trace.entries) {
      if (!e.kept) result.trace.entries.push_back(e);
    }
    current = std::move(stage.kept);
  }

  bool domain_enabled = config.strategy != FilterStrategy::SimilarityOnly &&
                        !config.disable_domain_filter;
  if (domain_enabled) {
    auto stage = filter_by_domain(current, config.domain_allowlist);
    for (const auto& e : stage.trace.entries) {
      if (!e.kept) result.trace.entries.push_back(e);
    }
    current = std::move(stage.kept);
  }

  {
    auto stage = filter_by_language(current, config.language, detector);
    for (const auto& e : stage.trace.entries) {
      if (!e.kept) result.trace.entries.push_back(e);
    }
    current = std::move(stage.kept);
  }

  if (config.dedup_enabled) {
    auto stage = deduplicate(current);
    for (const auto& e : stage.trace.entries) {
      if (!e.kept) result.trace.entries.push_back(e);
    }
    current = std::move(stage.kept);
  }

  for (const auto& sc : current) {
    result.trace.entries.push_back({sc.candidate.id, "kept", true, ""});
  }
  result.kept = std::move(current);
  return result;
}

std::vector<std::string> load_allowlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::ConfigInvalid, "cannot open allowlist file " + path);
  }
  std::vector<std::string> domains;
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string domain = normalize_whitespace(line);
    if (domain.empty()) continue;
    domains.push_back(to_lower(domain));
  }
  return domains;
}

}  // namespace oocheck
