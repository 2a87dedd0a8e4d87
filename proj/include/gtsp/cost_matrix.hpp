#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gtsp {

using Cost = std::int64_t;

// Diagonal marker. Never a legal cost; summing it is a bug.
inline constexpr Cost kUnavailable = std::numeric_limits<Cost>::min();

enum class ParseErrorKind { bad_dimension, non_square, negative_entry, too_small, bad_token, asymmetric_data };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

// Broken internal contract (exit status 3 in the CLI).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CostMatrix {
 public:
  // rows[i][i] is ignored. symmetric: nullopt = detect from data.
  static CostMatrix from_rows(const std::vector<std::vector<Cost>>& rows, std::optional<bool> symmetric = std::nullopt);

  int size() const noexcept { return n_; }
  bool symmetric() const noexcept { return symmetric_; }

  // Raw access, returns kUnavailable on the diagonal.
  Cost operator()(int i, int j) const noexcept { return c_[static_cast<std::size_t>(i) * n_ + j]; }
  // Throws on the diagonal.
  Cost at(int i, int j) const;

  bool operator==(const CostMatrix&) const = default;

 private:
  CostMatrix(int n, std::vector<Cost> c, bool sym) : n_(n), c_(std::move(c)), symmetric_(sym) {}
  int n_ = 0;
  std::vector<Cost> c_;
  bool symmetric_ = false;
};

CostMatrix load_matrix(std::string_view text);
CostMatrix load_matrix_file(const std::string& path);
// Canonical text form; load_matrix(to_text(M)) == M.
std::string to_text(const CostMatrix& M);

// MIN(M): other vertices by nondecreasing cost, ties by id.
class SortedNeighbors {
 public:
  explicit SortedNeighbors(const CostMatrix& M);
  const std::vector<int>& row(int i) const { return rows_.at(i); }
  // rank is 1-based like the printed tables.
  int at(int i, int rank) const { return rows_.at(i).at(rank - 1); }

 private:
  std::vector<std::vector<int>> rows_;
};

inline SortedNeighbors sorted_neighbors(const CostMatrix& M) { return SortedNeighbors(M); }

struct ReducedMatrix {
  CostMatrix base;
  Cost reduction_total = 0;
};

ReducedMatrix row_reduce(const CostMatrix& M);

// A Hamiltonian cycle given as visiting order.
class Tour {
 public:
  explicit Tour(std::vector<int> order);
  static Tour from_successors(const std::vector<int>& succ);

  int size() const noexcept { return static_cast<int>(order_.size()); }
  const std::vector<int>& order() const noexcept { return order_; }
  std::vector<int> successors() const;
  // Rotation starting at vertex 0.
  Tour canonical() const;
  std::string to_string() const;  // 1-based, space separated

  bool operator==(const Tour& o) const { return canonical().order_ == o.canonical().order_; }

 private:
  std::vector<int> order_;
};

Cost tour_value(const CostMatrix& M, const Tour& t);

}  // namespace gtsp
