#pragma once

#include <vector>

#include "oocheck/types.hpp"

namespace oocheck {

// Visual-centric ordering:
//   1. Candidates with a visual score sort before those without, by visual
//      score descending.
//   2. After that sort, consecutive candidates whose visual scores differ
//      by less than `borderline_band` merge into one borderline group;
//      each group is reordered by text score descending (candidates
//      without a text score go last within their group).
//   3. Candidates without a visual score are ordered by text score
//      descending after all visually scored ones.
//   4. Exact ties keep input order.
// Throws EUnscoredCandidate on unscored input.
std::vector<ScoredCandidate> rank_candidates(const std::vector<ScoredCandidate>& candidates,
                                             double borderline_band = 0.01);

// First min(k, n) elements. k must be >= 1.
std::vector<ScoredCandidate> select_top_k(const std::vector<ScoredCandidate>& ranked,
                                          int k);

}  // namespace oocheck
