#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "gtsp/cost_matrix.hpp"

namespace gtsp {

class Permutation {
 public:
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int n);
  // The n-cycle (1 2 ... n).
  static Permutation shift(int n);
  static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles);
  static Permutation from_tour(const Tour& t);

  int size() const noexcept { return static_cast<int>(img_.size()); }
  int operator()(int a) const noexcept { return img_[a]; }
  const std::vector<int>& images() const noexcept { return img_; }
  // Moved points only, each cycle starting at its smallest vertex, sorted by that vertex.
  const std::vector<std::vector<int>>& cycles() const noexcept { return cycles_; }

  Permutation inverse() const;
  bool is_derangement() const;
  bool is_involution() const;
  bool is_single_cycle() const { return cycles_.size() == 1 && static_cast<int>(cycles_[0].size()) == size(); }
  std::string to_string() const;  // cycle notation, 1-based

  bool operator==(const Permutation& o) const { return img_ == o.img_; }
  auto operator<=>(const Permutation& o) const { return img_ <=> o.img_; }

 private:
  std::vector<int> img_;
  std::vector<std::vector<int>> cycles_;
};

// a -> D(s(a))
Permutation compose(const Permutation& D, const Permutation& s);

// Permutation moving nodes[i] -> nodes[i+1] cyclically.
Permutation cycle_permutation(int n, const std::vector<int>& nodes);

// Sum of cost(a, p(a)) over moved points.
Cost perm_value(const CostMatrix& M, const Permutation& p);

// entry(a,b) = cost(a, D(b)) - cost(a, D(a)), read off M and D on demand.
// Holds a reference to M; M must outlive the view.
class TransformMatrix {
 public:
  TransformMatrix(const CostMatrix& M, Permutation D, std::optional<int> apm_fixed = std::nullopt);

  int size() const noexcept { return D_.size(); }
  const CostMatrix& base() const noexcept { return *M_; }
  const Permutation& perm() const noexcept { return D_; }
  std::optional<int> fixed_point() const noexcept { return fixed_; }

  bool available(int a, int b) const noexcept { return a == b || D_(b) != a; }
  Cost entry(int a, int b) const noexcept {
    if (a == b) return 0;
    const int col = D_(b);
    if (col == a) return kUnavailable;
    return (*M_)(a, col) - shift_[a];
  }

 private:
  const CostMatrix* M_;
  Permutation D_;
  std::optional<int> fixed_;
  std::vector<Cost> shift_;
};

enum class CycleKind { unclassified, acceptable, unlinked2, linked2 };

struct WeightedCycle {
  std::vector<int> nodes;
  Cost value = 0;
  CycleKind kind = CycleKind::unclassified;

  std::string to_string() const;  // "(1 2 3)", 1-based
  bool operator==(const WeightedCycle&) const = default;
};

Cost cycle_value(const TransformMatrix& TM, const std::vector<int>& nodes);
WeightedCycle make_cycle(const TransformMatrix& TM, std::vector<int> nodes);
// Rotate so the smallest vertex leads.
std::vector<int> canonical_rotation(const std::vector<int>& nodes);

// Smallest 0-based index i such that every cyclic prefix sum from i is <= bound.
// Throws InvariantError when none exists.
std::size_t determining_vertex(const std::vector<Cost>& weights, Cost bound);
// Smallest index d such that every prefix aav from d is <= total/r.
std::size_t aav_determining_node(const std::vector<Cost>& weights);

// Exact average arc value value/arcs.
struct Aav {
  Cost value = 0;
  Cost arcs = 1;

  friend std::strong_ordering operator<=>(const Aav& x, const Aav& y) {
    const __int128 l = static_cast<__int128>(x.value) * y.arcs;
    const __int128 r = static_cast<__int128>(y.value) * x.arcs;
    return l <=> r;
  }
  friend bool operator==(const Aav& x, const Aav& y) { return (x <=> y) == 0; }
  // Rounded half away from zero to 6 decimals.
  std::string str(int decimals = 6) const;
};

}  // namespace gtsp
