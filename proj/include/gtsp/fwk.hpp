#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gtsp/cost_matrix.hpp"
#include "gtsp/permutation.hpp"

namespace gtsp {

struct PathRecord {
  std::vector<int> nodes;
  Cost value = 0;

  int arcs() const noexcept { return static_cast<int>(nodes.size()) - 1; }
  int start() const { return nodes.front(); }
  int end() const { return nodes.back(); }
  Aav aav() const { return {value, arcs()}; }
  bool operator==(const PathRecord&) const = default;
};

PathRecord make_path(const CostMatrix& M, std::vector<int> nodes);

// Lower aav wins; equal aav: more arcs; then the lexicographically smaller node list.
bool can_replace(const PathRecord& existing, const PathRecord& candidate);

// p + (end -> next) if next is new and the aav stays strictly below bound.
std::optional<PathRecord> extend(const PathRecord& p, int next, const CostMatrix& M, const Aav& bound);

class PathStore {
 public:
  explicit PathStore(Aav bound) : bound_(bound) {}

  const Aav& bound() const noexcept { return bound_; }
  // Records at or above the new bound are dropped everywhere.
  void tighten(Aav bound);
  // True if the candidate became active for its endpoints.
  bool offer(PathRecord rec);

  const std::map<std::pair<int, int>, PathRecord>& active() const noexcept { return active_; }
  const std::vector<PathRecord>& archived() const noexcept { return archived_; }
  const PathRecord* find(int s, int e) const;

 private:
  Aav bound_;
  std::map<std::pair<int, int>, PathRecord> active_;
  std::vector<PathRecord> archived_;
};

struct TourCandidate {
  Tour tour;
  Cost value = 0;
};

// Seed single arcs under the bound, then relax column by column until nothing changes.
std::optional<TourCandidate> fwk_pass(const CostMatrix& M, PathStore& store, int max_rounds = 0);

struct FwkStats {
  std::vector<Cost> bound_history;         // incumbent tour values, first = T0
  std::vector<std::size_t> level_records;  // live records per arc count
  std::size_t archive_size = 0;            // records generated in total
};

struct FwkResult {
  Tour tour;
  Cost value = 0;
  FwkStats stats;
};

struct FwkOptions {
  bool reduce_rows = true;  // search on M' (same optimum)
  int workers = 1;
};

// Exact: returns an optimal tour.
FwkResult fwk_exact(const CostMatrix& M, const Tour& T0, const FwkOptions& opt = {});

// BEST table with k entries per arc-count column.
FwkResult fwk_heuristic1(const CostMatrix& M, const Tour& T0, int k);

// ceil(log2 n) + 1
int heuristic2_width(int n);
// Pivot arc count from T0 written at its aav determining node; n if no arc qualifies.
int heuristic2_pivot(const CostMatrix& M, const Tour& T0);
FwkResult fwk_heuristic2(const CostMatrix& M, const Tour& T0, int width = 0);

// Rotation of the tour starting at vertex 0, for tie-breaks between equal-value tours.
bool tour_less(const Tour& a, const Tour& b);

}  // namespace gtsp
