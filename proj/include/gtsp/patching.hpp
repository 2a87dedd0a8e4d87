#pragma once

#include <optional>
#include <vector>

#include "gtsp/cost_matrix.hpp"
#include "gtsp/permutation.hpp"

namespace gtsp {

class Matching;

struct PatchStep {
  int a = 0;
  int b = 0;
  bool reversed = false;  // b's cycle was traversed backwards before the merge
  Cost delta = 0;
};

struct PatchPlan {
  std::vector<PatchStep> steps;
  Cost total_delta = 0;
};

struct PatchResult {
  Permutation perm;
  Cost delta = 0;
};

// D·(a b): arcs (a,D(a)), (b,D(b)) become (a,D(b)), (b,D(a)).
PatchResult patch_pair(const CostMatrix& M, const Permutation& D, int a, int b);

struct PatchedTour {
  Tour tour;
  Cost value = 0;
  PatchPlan plan;
};

// Merge all cycles of D into one n-cycle. beam <= 0 means width n.
PatchedTour patch_to_cycle(const CostMatrix& M, const Permutation& D, int beam = 0);

// Single alternating cycle through both edge sets, or nothing.
std::optional<Tour> weave_matchings(const Matching& PM1, const Matching& PM2);

}  // namespace gtsp
