#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gtsp/cost_matrix.hpp"
#include "gtsp/permutation.hpp"

namespace gtsp {

// Involution with no fixed point (even n) or exactly one (odd n).
class Matching {
 public:
  Matching(const CostMatrix& M, std::vector<int> partner);

  int size() const noexcept { return static_cast<int>(partner_.size()); }
  int partner(int a) const noexcept { return partner_[a]; }
  const std::vector<int>& partners() const noexcept { return partner_; }
  std::optional<int> fixed_point() const noexcept { return fixed_; }
  // Sum of cost(a, partner(a)) over moved points: each edge twice.
  Cost derangement_value() const noexcept { return dv_; }
  // Each edge once, read as cost(min, max).
  Cost edge_sum() const noexcept { return es_; }
  int pair_id(int a) const noexcept { return std::min(a, partner_[a]); }
  std::vector<std::pair<int, int>> pairs() const;  // (min, max), sorted
  Permutation as_permutation() const { return Permutation(partner_); }
  std::string to_string() const;

  bool operator==(const Matching& o) const { return partner_ == o.partner_; }

 private:
  std::vector<int> partner_;
  std::optional<int> fixed_;
  Cost dv_ = 0;
  Cost es_ = 0;
};

// Even n: the two alternating edge sets, cheaper first. Odd n: the cheapest APM over
// all fixed points, then its complement in T.
std::pair<Matching, Matching> alternating_matchings(const CostMatrix& M, const Tour& T);
// Odd n: the APM of T that leaves `fixed` alone.
Matching apm_for_fixed_point(const CostMatrix& M, const Tour& T, int fixed);

TransformMatrix matching_transform(const CostMatrix& M, const Matching& sigma);

// nullopt when the cycle holds three or more full pairs, two nested pairs, or the
// [a, fixed, partner(a)] pattern.
std::optional<CycleKind> classify_cycle(const Matching& sigma, const std::vector<int>& nodes);

WeightedCycle companion_cycle(const CostMatrix& M, const Matching& sigma, const WeightedCycle& C);
Matching apply_to_matching(const CostMatrix& M, const Matching& sigma, const WeightedCycle& C);
// Even n, C acceptable with one point from every pair.
Tour half_cycle_tour(const Matching& sigma, const WeightedCycle& C);

struct CatalogEntry {
  WeightedCycle cycle;  // representative: lexicographically smallest member
  std::vector<int> touched_pairs;
  std::vector<int> nonlinking_pairs;
  std::vector<int> linking_points;
  std::vector<WeightedCycle> members;
};

struct CycleCatalog {
  std::vector<CatalogEntry> entries;
  Cost ceiling = 0;
  int max_len = 0;
  std::size_t member_count() const;
};

struct EnumerateOptions {
  int max_len = 0;  // 0: n/2 + 2
  bool acceptable = true;
  bool unlinked2 = true;
  bool linked2 = true;
  int workers = 1;
};

// All cycles of the sigma transform with value < ceiling within the options.
CycleCatalog enumerate_cycles(const CostMatrix& M, const Matching& sigma, Cost ceiling, const EnumerateOptions& opt = {});

struct LinkResult {
  Tour tour;
  Cost value = 0;
  std::vector<WeightedCycle> cycles;
  int acceptable = 0;   // a
  int two_circuit = 0;  // t
  int points = 0;       // p
};

// Best tour sigma∘s with s a disjoint union of catalog cycles, total cycle value < bound,
// satisfying the point-count formula.
std::optional<LinkResult> link_search(const CycleCatalog& catalog, const Matching& sigma, Cost bound,
                                      const CostMatrix& M);

// p = ceil(n/2) + 3t + a - 1
inline int point_formula(int n, int t, int a) { return (n + 1) / 2 + 3 * t + a - 1; }

struct RefineConfig {
  bool exhaustive = false;  // max_len n and a relaxed per-cycle ceiling
  int max_len = 0;
  bool try_complement = true;
  int max_iterations = 1000;
  int workers = 1;
};

struct RefineResult {
  Tour tour;
  Cost value = 0;
  std::vector<Cost> history;  // tour value after each accepted step, starting with the input
  int acceptable = 0;
  int two_circuit = 0;
  int points = 0;
};

RefineResult refine(const CostMatrix& M, const Tour& T, const RefineConfig& cfg = {});

}  // namespace gtsp
