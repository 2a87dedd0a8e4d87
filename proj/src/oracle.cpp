#include "gtsp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gtsp::oracle {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr Cost kHuge = std::numeric_limits<Cost>::max() / 4;

// -1 when excluded, else number of full pairs (0..2).
int full_pair_class(const std::vector<int>& nodes, const std::vector<int>& partner) {
  const int L = static_cast<int>(nodes.size());
  std::vector<int> pos(partner.size(), -1);
  for (int i = 0; i < L; ++i) pos[nodes[i]] = i;
  std::vector<std::pair<int, int>> full;
  for (int v : nodes)
    if (partner[v] != v && v < partner[v] && pos[partner[v]] >= 0) full.emplace_back(v, partner[v]);
  if (full.size() > 2) return -1;
  if (full.size() == 2) {
    auto between = [&](int a, int b, int z) {
      const int dz = (pos[z] - pos[a] + L) % L;
      const int db = (pos[b] - pos[a] + L) % L;
      return dz > 0 && dz < db;
    };
    const auto [x, sx] = full[0];
    const auto [y, sy] = full[1];
    if (between(x, sx, y) == between(x, sx, sy)) return -1;  // nested
  }
  // [a, fixed, partner(a)] would close a 2-cycle in the tour
  for (int i = 0; i < L; ++i) {
    const int mid = nodes[(i + 1) % L];
    if (L >= 3 && partner[mid] == mid && partner[nodes[i]] == nodes[(i + 2) % L]) return -1;
  }
  return static_cast<int>(full.size());
}

Cost transform_entry(const CostMatrix& M, const std::vector<int>& partner, int a, int b) {
  if (a == b) return 0;
  if (partner[b] == a) return kUnavailable;
  return M(a, partner[b]) - (partner[a] == a ? 0 : M(a, partner[a]));
}

}  // namespace

OracleResult brute_force_tour(const CostMatrix& M) {
  const int n = M.size();
  if (n > kBruteForceMax) throw std::invalid_argument("brute force limited to n <= 11");
  const auto t0 = Clock::now();
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  Cost best = kHuge;
  std::vector<int> witness;
  do {
    if (M.symmetric() && rest.front() > rest.back()) continue;
    Cost v = M(0, rest.front()) + M(rest.back(), 0);
    for (int i = 0; i + 1 < n - 1 && v < best; ++i) v += M(rest[i], rest[i + 1]);
    if (v < best) {
      best = v;
      witness.assign(1, 0);
      witness.insert(witness.end(), rest.begin(), rest.end());
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return {best, witness, "brute", since(t0)};
}

OracleResult held_karp(const CostMatrix& M) {
  const int n = M.size();
  if (n > kHeldKarpMax) throw std::invalid_argument("held-karp limited to n <= 20");
  const auto t0 = Clock::now();
  const int m = n - 1;  // vertices 1..n-1 as bits 0..m-1
  const std::size_t full = (std::size_t{1} << m) - 1;
  std::vector<Cost> dp((full + 1) * m, kHuge);
  for (int j = 0; j < m; ++j) dp[(std::size_t{1} << j) * m + j] = M(0, j + 1);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      const Cost here = dp[mask * m + j];
      if (here >= kHuge) continue;
      for (int k = 0; k < m; ++k) {
        if (mask >> k & 1) continue;
        const std::size_t nm = mask | (std::size_t{1} << k);
        Cost& slot = dp[nm * m + k];
        slot = std::min(slot, here + M(j + 1, k + 1));
      }
    }
  }
  Cost best = kHuge;
  int last = -1;
  for (int j = 0; j < m; ++j) {
    const Cost v = dp[full * m + j] + M(j + 1, 0);
    if (v < best) best = v, last = j;
  }
  // walk back
  std::vector<int> rev;
  std::size_t mask = full;
  int j = last;
  while (j >= 0) {
    rev.push_back(j + 1);
    const std::size_t pm = mask & ~(std::size_t{1} << j);
    int prev = -1;
    if (pm) {
      for (int k = 0; k < m; ++k)
        if ((pm >> k & 1) && dp[pm * m + k] + M(k + 1, j + 1) == dp[mask * m + j]) {
          prev = k;
          break;
        }
      if (prev < 0) throw InvariantError("held-karp reconstruction failed");
    }
    mask = pm;
    j = prev;
  }
  std::vector<int> order{0};
  order.insert(order.end(), rev.rbegin(), rev.rend());
  return {best, order, "dp", since(t0)};
}

OracleResult assignment_optimal(const CostMatrix& M) {
  const int n = M.size();
  const auto t0 = Clock::now();
  Cost maxc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) maxc = std::max(maxc, M(i, j));
  const Cost forbid = (maxc + 1) * (n + 1);
  auto c = [&](int i, int j) { return i == j ? forbid : M(i, j); };
  // potentials method, 1-based rows/cols
  std::vector<Cost> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<Cost> minv(n + 1, kHuge);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      Cost delta = kHuge;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Cost cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j])
          u[p[j]] += delta, v[j] -= delta;
        else
          minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> img(n);
  for (int j = 1; j <= n; ++j) img[p[j] - 1] = j - 1;
  Cost val = 0;
  for (int i = 0; i < n; ++i) {
    if (img[i] == i) throw InvariantError("hungarian picked a diagonal entry");
    val += M(i, img[i]);
  }
  return {val, img, "hungarian", since(t0)};
}

OracleResult derangement_brute(const CostMatrix& M) {
  const int n = M.size();
  if (n > 9) throw std::invalid_argument("derangement enumeration limited to n <= 9");
  const auto t0 = Clock::now();
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  Cost best = kHuge;
  std::vector<int> w;
  do {
    Cost v = 0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      ok = p[i] != i;
      if (ok) v += M(i, p[i]);
    }
    if (ok && v < best) best = v, w = p;
  } while (std::next_permutation(p.begin(), p.end()));
  return {best, w, "derangements", since(t0)};
}

std::vector<std::vector<int>> enumerate_matchings(int n) {
  if (n < 2 || n > 12) throw std::invalid_argument("matching enumeration limited to 2 <= n <= 12");
  std::vector<std::vector<int>> out;
  std::vector<int> partner(n, -1);
  std::function<void(bool)> rec = [&](bool fixed_left) {
    int a = 0;
    while (a < n && partner[a] >= 0) ++a;
    if (a == n) {
      if (!fixed_left) out.push_back(partner);
      return;
    }
    if (fixed_left) {
      partner[a] = a;
      rec(false);
      partner[a] = -1;
    }
    for (int b = a + 1; b < n; ++b) {
      if (partner[b] >= 0) continue;
      partner[a] = b, partner[b] = a;
      rec(fixed_left);
      partner[a] = partner[b] = -1;
    }
  };
  rec(n % 2 == 1);
  return out;
}

Cost min_matching_value(const CostMatrix& M) {
  Cost best = kHuge;
  for (const auto& p : enumerate_matchings(M.size())) {
    Cost v = 0;
    for (int a = 0; a < M.size(); ++a)
      if (p[a] != a) v += M(a, p[a]);
    best = std::min(best, v);
  }
  return best;
}

std::vector<AdmissibleCycle> enumerate_admissible_cycles(const CostMatrix& M, const std::vector<int>& partner,
                                                         Cost ceiling, int max_len) {
  const int n = M.size();
  if (n > 8) throw std::invalid_argument("cycle enumeration oracle limited to n <= 8");
  std::vector<AdmissibleCycle> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    if (k < 2 || k > max_len) continue;
    std::vector<int> vs;
    for (int v = 0; v < n; ++v)
      if (mask >> v & 1) vs.push_back(v);
    // vs[0] is the smallest; permute the rest
    std::vector<int> rest(vs.begin() + 1, vs.end());
    do {
      std::vector<int> nodes{vs[0]};
      nodes.insert(nodes.end(), rest.begin(), rest.end());
      Cost val = 0;
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        const Cost e = transform_entry(M, partner, nodes[i], nodes[(i + 1) % k]);
        ok = e != kUnavailable;
        val += ok ? e : 0;
      }
      if (!ok || val >= ceiling) continue;
      const int cls = full_pair_class(nodes, partner);
      if (cls < 0) continue;
      out.push_back({nodes, val, cls});
    } while (std::next_permutation(rest.begin(), rest.end()));
  }
  return out;
}

std::optional<std::vector<int>> best_matching_neighbor(const CostMatrix& M, const std::vector<int>& partner,
                                                       Cost upper, Cost ceiling, int max_len) {
  const int n = M.size();
  if (n > 10) throw std::invalid_argument("neighbor oracle limited to n <= 10");
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  std::optional<std::vector<int>> best;
  Cost best_val = upper;
  std::vector<int> succ(n), s(n);
  std::vector<char> seen(n);
  do {
    Cost v = M(0, rest.front()) + M(rest.back(), 0);
    for (int i = 0; i + 1 < n - 1; ++i) v += M(rest[i], rest[i + 1]);
    if (v > best_val) continue;
    succ[0] = rest.front();
    for (int i = 0; i + 1 < n - 1; ++i) succ[rest[i]] = rest[i + 1];
    succ[rest.back()] = 0;
    for (int a = 0; a < n; ++a) s[a] = partner[succ[a]];
    std::fill(seen.begin(), seen.end(), 0);
    int a_cnt = 0, t_cnt = 0, points = 0;
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      if (seen[a] || s[a] == a) continue;
      std::vector<int> c;
      for (int x = a; !seen[x]; x = s[x]) seen[x] = 1, c.push_back(x);
      if (static_cast<int>(c.size()) > max_len) {
        ok = false;
        break;
      }
      Cost cv = 0;
      for (std::size_t i = 0; i < c.size(); ++i) cv += transform_entry(M, partner, c[i], c[(i + 1) % c.size()]);
      const int cls = full_pair_class(c, partner);
      if (cls < 0 || cv >= ceiling) {
        ok = false;
        break;
      }
      (cls == 0 ? a_cnt : t_cnt) += 1;
      points += static_cast<int>(c.size());
    }
    if (!ok || points != (n + 1) / 2 + 3 * t_cnt + a_cnt - 1) continue;
    std::vector<int> order{0};
    order.insert(order.end(), rest.begin(), rest.end());
    if (v < best_val || (best && v == best_val && order < *best)) {
      best_val = v;
      best = order;
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

}  // namespace gtsp::oracle
