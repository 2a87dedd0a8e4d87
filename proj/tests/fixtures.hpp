#pragma once

#include <random>
#include <string>
#include <vector>

#include "gtsp/cost_matrix.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(GTSP_DATA_DIR) + "/" + name; }

inline gtsp::CostMatrix load(const std::string& name) { return gtsp::load_matrix_file(data_path(name)); }

inline gtsp::CostMatrix random_matrix(std::mt19937_64& rng, int n, bool symmetric, int lo = 1, int hi = 40) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<std::vector<gtsp::Cost>> rows(n, std::vector<gtsp::Cost>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (symmetric && j < i)
        rows[i][j] = rows[j][i];
      else
        rows[i][j] = d(rng);
    }
  return gtsp::CostMatrix::from_rows(rows, symmetric);
}

inline std::vector<int> random_order(std::mt19937_64& rng, int n) {
  std::vector<int> o(n);
  for (int i = 0; i < n; ++i) o[i] = i;
  std::shuffle(o.begin(), o.end(), rng);
  return o;
}

// 1-based list -> 0-based
inline std::vector<int> zb(std::initializer_list<int> v) {
  std::vector<int> out;
  for (int x : v) out.push_back(x - 1);
  return out;
}

}  // namespace fixtures
