#pragma once

// Exact reference solvers. Only used to check the heuristic pipeline.

#include <optional>
#include <string>
#include <vector>

#include "gtsp/cost_matrix.hpp"
#include "gtsp/permutation.hpp"

namespace gtsp::oracle {

struct OracleResult {
  Cost value = 0;
  // brute/dp: tour order. hungarian/derangements: images of the optimal derangement.
  std::vector<int> witness;
  std::string method;
  double elapsed_seconds = 0.0;
};

inline constexpr int kBruteForceMax = 11;
inline constexpr int kHeldKarpMax = 20;

OracleResult brute_force_tour(const CostMatrix& M);
OracleResult held_karp(const CostMatrix& M);
// Minimum-value derangement (diagonal excluded), Hungarian method.
OracleResult assignment_optimal(const CostMatrix& M);
// Same by enumeration, n <= 9.
OracleResult derangement_brute(const CostMatrix& M);

// All perfect matchings (even n) or almost perfect matchings (odd n) as partner vectors.
std::vector<std::vector<int>> enumerate_matchings(int n);
// Smallest sum of cost(a, partner(a)) over moved points.
Cost min_matching_value(const CostMatrix& M);

// A cycle of the matching transform, as the brute-force enumerator sees it.
struct AdmissibleCycle {
  std::vector<int> nodes;  // smallest vertex first
  Cost value = 0;
  int full_pairs = 0;  // 0 acceptable, 1 unlinked 2-circuit, 2 linked 2-circuit
};

// Every cycle of the partner transform with value < ceiling, length <= max_len,
// at most two full pairs (interlaced if two), no [a, fixed, partner(a)] pattern. n <= 8.
std::vector<AdmissibleCycle> enumerate_admissible_cycles(const CostMatrix& M, const std::vector<int>& partner,
                                                         Cost ceiling, int max_len);

// Best tour T' over all tours whose s = partner∘T' decomposes into admissible cycles
// (each below ceiling, length <= max_len) satisfying the point-count formula, and with
// value < upper. n <= 10.
std::optional<std::vector<int>> best_matching_neighbor(const CostMatrix& M, const std::vector<int>& partner,
                                                       Cost upper, Cost ceiling, int max_len);

}  // namespace gtsp::oracle
