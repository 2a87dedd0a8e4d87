#pragma once

#include <optional>
#include <vector>

#include "gtsp/cost_matrix.hpp"
#include "gtsp/permutation.hpp"

namespace gtsp {

struct DescentConfig {
  bool forbid_symmetric_arcs = false;
  bool forbid_two_cycles = false;
  int seed_count = 1;
  int trial_blocks = 1;
  int max_iterations = 100000;
  int workers = 1;

  // seed_count = ceil(sqrt n), trial_blocks = ceil(log2 n) + 1; both flags follow `symmetric`.
  static DescentConfig defaults(int n, bool symmetric);
  void validate() const;
};

struct DescentStep {
  WeightedCycle cycle;
  Cost value_after = 0;
};

struct DescentTrace {
  Permutation start;
  Cost start_value = 0;
  std::vector<DescentStep> steps;
  Permutation final_perm;
  Cost final_value = 0;
};

// Grow a negative cycle in build_transform(M, D) from `start`, first arc toward the
// rank-th nearest neighbor of start. Returns the most negative closure seen.
std::optional<WeightedCycle> greedy_trial(const CostMatrix& M, const SortedNeighbors& MIN, const Permutation& D,
                                          int start, int rank, const DescentConfig& cfg);

// Most negative simple cycle found; never misses when a negative cycle exists over admissible arcs.
std::optional<WeightedCycle> find_negative_cycle(const TransformMatrix& TM, const DescentConfig& cfg);

DescentTrace descend(const CostMatrix& M, const Permutation& D0, const DescentConfig& cfg);
inline DescentTrace descend(const CostMatrix& M, const DescentConfig& cfg) {
  return descend(M, Permutation::shift(M.size()), cfg);
}

// Arc (a,b) of the transform, i.e. new derangement arc (a, D(b)), under the cfg rules.
bool arc_admissible(const TransformMatrix& TM, int a, int b, const DescentConfig& cfg);
// Would applying s to D create a 2-cycle?
bool creates_two_cycle(const Permutation& D, const std::vector<int>& nodes);

}  // namespace gtsp
