#include "gtsp/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gtsp/parallel.hpp"

namespace gtsp {

namespace {

constexpr Cost kInf = std::numeric_limits<Cost>::max() / 4;

int ceil_log2(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  return k;
}

// (value, canonical node order): smaller is better.
bool better(const WeightedCycle& x, const WeightedCycle& y) {
  if (x.value != y.value) return x.value < y.value;
  return canonical_rotation(x.nodes) < canonical_rotation(y.nodes);
}

void keep_best(std::optional<WeightedCycle>& best, WeightedCycle c) {
  c.nodes = canonical_rotation(c.nodes);
  if (!best || better(c, *best)) best = std::move(c);
}

// Greedy growth from an already chosen first arc (start -> first).
std::optional<WeightedCycle> grow(const TransformMatrix& TM, int start, int first, const DescentConfig& cfg) {
  const int n = TM.size();
  if (first == start || !arc_admissible(TM, start, first, cfg)) return std::nullopt;
  Cost prefix = TM.entry(start, first);
  if (prefix >= 0) return std::nullopt;
  std::vector<char> on_path(n, 0);
  std::vector<int> path{start, first};
  on_path[start] = on_path[first] = 1;
  std::optional<WeightedCycle> best;
  int detours = 0;
  int cur = first;
  for (;;) {
    if (arc_admissible(TM, cur, start, cfg)) {
      const Cost closed = prefix + TM.entry(cur, start);
      if (closed < 0 && (!best || closed < best->value)) {
        WeightedCycle c{path, closed, CycleKind::unclassified};
        if (!cfg.forbid_two_cycles || !creates_two_cycle(TM.perm(), c.nodes)) best = std::move(c);
      }
    }
    int pick = -1, overall = -1;
    Cost pick_v = 0, overall_v = 0;
    for (int c = 0; c < n; ++c) {
      if (c == cur || !arc_admissible(TM, cur, c, cfg)) continue;
      const Cost e = TM.entry(cur, c);
      if (e < overall_v) overall_v = e, overall = c;
      if (!on_path[c] && e < pick_v) pick_v = e, pick = c;
    }
    if (pick < 0) break;
    if (overall != pick && overall != start && ++detours > cfg.trial_blocks) break;
    path.push_back(pick);
    on_path[pick] = 1;
    prefix += pick_v;
    cur = pick;
  }
  return best;
}

// Simple cycles of a closed walk (last vertex == first omitted).
std::vector<std::vector<int>> split_walk(const std::vector<int>& walk, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> stack;
  std::vector<int> pos(n, -1);
  for (int v : walk) {
    if (pos[v] >= 0) {
      std::vector<int> c(stack.begin() + pos[v], stack.end());
      for (int x : c) pos[x] = -1;
      stack.resize(stack.size() - c.size());
      if (c.size() >= 2) out.push_back(std::move(c));
    }
    pos[v] = static_cast<int>(stack.size());
    stack.push_back(v);
  }
  if (stack.size() >= 2) out.push_back(stack);
  return out;
}

}  // namespace

DescentConfig DescentConfig::defaults(int n, bool symmetric) {
  DescentConfig c;
  c.seed_count = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
  c.trial_blocks = ceil_log2(n) + 1;
  c.forbid_symmetric_arcs = symmetric;
  c.forbid_two_cycles = symmetric;
  return c;
}

void DescentConfig::validate() const {
  if (seed_count < 1) throw std::invalid_argument("seed_count must be >= 1");
  if (trial_blocks < 1) throw std::invalid_argument("trial_blocks must be >= 1");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

bool arc_admissible(const TransformMatrix& TM, int a, int b, const DescentConfig& cfg) {
  if (a == b || !TM.available(a, b)) return false;
  const auto& D = TM.perm();
  if (cfg.forbid_symmetric_arcs && D(D(b)) == a) return false;
  return true;
}

bool creates_two_cycle(const Permutation& D, const std::vector<int>& nodes) {
  const int n = D.size();
  std::vector<int> next(n, -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) next[nodes[i]] = nodes[(i + 1) % nodes.size()];
  auto R = [&](int x) { return D(next[x] >= 0 ? next[x] : x); };
  for (int x : nodes) {
    const int y = R(x);
    if (y != x && R(y) == x) return true;
  }
  return false;
}

std::optional<WeightedCycle> greedy_trial(const CostMatrix& M, const SortedNeighbors& MIN, const Permutation& D,
                                          int start, int rank, const DescentConfig& cfg) {
  const int n = M.size();
  if (rank < 1 || rank > n - 1) throw std::invalid_argument("greedy_trial: rank out of range");
  const TransformMatrix TM(M, D);
  const int target = MIN.at(start, rank);
  const int first = D.inverse()(target);
  return grow(TM, start, first, cfg);
}

std::optional<WeightedCycle> find_negative_cycle(const TransformMatrix& TM, const DescentConfig& cfg) {
  const int n = TM.size();
  std::optional<WeightedCycle> best;
  auto offer = [&](std::vector<int> nodes) {
    if (nodes.size() < 2) return;
    const Cost v = cycle_value(TM, nodes);
    if (v >= 0) return;
    if (cfg.forbid_two_cycles && creates_two_cycle(TM.perm(), nodes)) return;
    keep_best(best, WeightedCycle{std::move(nodes), v, CycleKind::unclassified});
  };

  // seeded greedy walks, one slot per row
  std::vector<std::optional<WeightedCycle>> per_row(n);
  parallel_for(cfg.workers, n, [&](int i) {
    std::vector<std::pair<Cost, int>> neg;
    for (int j = 0; j < n; ++j)
      if (arc_admissible(TM, i, j, cfg) && TM.entry(i, j) < 0) neg.emplace_back(TM.entry(i, j), j);
    std::sort(neg.begin(), neg.end());
    if (static_cast<int>(neg.size()) > cfg.seed_count) neg.resize(cfg.seed_count);
    for (const auto& [e, j] : neg)
      if (auto c = grow(TM, i, j, cfg)) keep_best(per_row[i], std::move(*c));
  });
  for (auto& c : per_row)
    if (c) offer(c->nodes);

  // Floyd-Warshall with a negative-cycle check before each pivot
  std::vector<Cost> d(static_cast<std::size_t>(n) * n, kInf);
  std::vector<int> nxt(static_cast<std::size_t>(n) * n, -1);
  for (int i = 0; i < n; ++i) {
    d[i * n + i] = 0;
    nxt[i * n + i] = i;
    for (int j = 0; j < n; ++j)
      if (arc_admissible(TM, i, j, cfg)) d[i * n + j] = TM.entry(i, j), nxt[i * n + j] = j;
  }
  auto path = [&](int from, int to, std::vector<int>& out) {
    int v = from;
    for (int steps = 0; v != to; ++steps) {
      if (steps > 2 * n || nxt[v * n + to] < 0) return false;
      out.push_back(v);
      v = nxt[v * n + to];
    }
    return true;
  };
  bool found_any = false;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (i == k || d[i * n + k] >= kInf || d[k * n + i] >= kInf) continue;
      if (d[i * n + k] + d[k * n + i] >= 0) continue;
      std::vector<int> walk;
      if (!path(i, k, walk) || !path(k, i, walk)) continue;
      found_any = true;
      for (auto& c : split_walk(walk, n)) offer(std::move(c));
    }
    if (found_any && best) break;
    for (int i = 0; i < n; ++i) {
      const Cost dik = d[i * n + k];
      if (dik >= kInf) continue;
      for (int j = 0; j < n; ++j) {
        const Cost dkj = d[k * n + j];
        if (dkj >= kInf) continue;
        if (dik + dkj < d[i * n + j]) {
          d[i * n + j] = dik + dkj;
          nxt[i * n + j] = nxt[i * n + k];
        }
      }
    }
  }
  return best;
}

DescentTrace descend(const CostMatrix& M, const Permutation& D0, const DescentConfig& cfg) {
  cfg.validate();
  const int n = M.size();
  if (D0.size() != n || !D0.is_derangement()) throw std::invalid_argument("descend: D0 must be a derangement on n points");
  DescentTrace tr{D0, perm_value(M, D0), {}, D0, 0};
  const SortedNeighbors MIN(M);
  Permutation D = D0;
  Cost value = tr.start_value;
  for (int iter = 0;; ++iter) {
    if (iter >= cfg.max_iterations) throw InvariantError("descent exceeded max_iterations");
    const TransformMatrix TM(M, D);
    const Permutation Dinv = D.inverse();
    std::optional<WeightedCycle> best;
    const int ranks = std::min(cfg.seed_count, n - 1);
    std::vector<std::optional<WeightedCycle>> per_start(n);
    parallel_for(cfg.workers, n, [&](int s) {
      for (int r = 1; r <= ranks; ++r)
        if (auto c = grow(TM, s, Dinv(MIN.at(s, r)), cfg)) keep_best(per_start[s], std::move(*c));
    });
    for (auto& c : per_start)
      if (c) keep_best(best, std::move(*c));
    if (auto c = find_negative_cycle(TM, cfg)) keep_best(best, std::move(*c));
    if (!best) break;
    D = compose(D, cycle_permutation(n, best->nodes));
    value += best->value;
    if (perm_value(M, D) != value) throw InvariantError("descent: value additivity violated");
    tr.steps.push_back({*best, value});
  }
  tr.final_perm = D;
  tr.final_value = value;
  return tr;
}

}  // namespace gtsp
