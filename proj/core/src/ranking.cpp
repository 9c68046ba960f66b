#include "oocheck/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "oocheck/error.hpp"

namespace oocheck {

namespace {

constexpr double kAbsentScore = -2.0;  // below any cosine value

double visual_or_absent(const ScoredCandidate& sc) {
  return sc.scores->visual_sim ? *sc.scores->visual_sim : kAbsentScore;
}

double text_or_absent(const ScoredCandidate& sc) {
  return sc.scores->text_sim ? *sc.scores->text_sim : kAbsentScore;
}

}  // namespace

std::vector<ScoredCandidate> rank_candidates(const std::vector<ScoredCandidate>& candidates,
                                             double borderline_band) {
  for (const auto& sc : candidates) {
    if (!sc.scores) {
      throw Error(Errc::UnscoredCandidate,
                  "candidate " + sc.candidate.id + " has no scores");
    }
  }

  // Stable sort keeps input order across exact ties.
  std::vector<ScoredCandidate> out = candidates;
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredCandidate& a, const ScoredCandidate& b) {
                     double va = visual_or_absent(a), vb = visual_or_absent(b);
                     if (va != vb) return va > vb;
                     return text_or_absent(a) > text_or_absent(b);
                   });

  // Reorder each borderline group of visually scored candidates by text
  // score; groups are maximal runs with consecutive gaps below the band.
  size_t i = 0;
  while (i < out.size() && out[i].scores->visual_sim) {
    size_t j = i + 1;
    while (j < out.size() && out[j].scores->visual_sim &&
           *out[j - 1].scores->visual_sim - *out[j].scores->visual_sim <
               borderline_band) {
      ++j;
    }
    if (j - i > 1) {
      std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(i),
                       out.begin() + static_cast<std::ptrdiff_t>(j),
                       [](const ScoredCandidate& a, const ScoredCandidate& b) {
                         double ta = text_or_absent(a), tb = text_or_absent(b);
                         if (ta != tb) return ta > tb;
                         return visual_or_absent(a) > visual_or_absent(b);
                       });
    }
    i = j;
  }
  return out;
}

std::vector<ScoredCandidate> select_top_k(const std::vector<ScoredCandidate>& ranked,
                                          int k) {
  if (k < 1) {
    throw Error(Errc::ConfigInvalid, "top-k must be >= 1, got " + std::to_string(k));
  }
  size_t take = std::min(ranked.size(), static_cast<size_t>(k));
  return std::vector<ScoredCandidate>(ranked.begin(),
                                      ranked.begin() + static_cast<std::ptrdiff_t>(take));
}

}  // namespace oocheck
