#include "gtsp/fwk.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "gtsp/parallel.hpp"

namespace gtsp {

PathRecord make_path(const CostMatrix& M, std::vector<int> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("path needs at least one arc");
  std::vector<char> seen(M.size(), 0);
  Cost v = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 0 || nodes[i] >= M.size() || seen[nodes[i]]) throw std::invalid_argument("path repeats a vertex");
    seen[nodes[i]] = 1;
    if (i) v += M.at(nodes[i - 1], nodes[i]);
  }
  return {std::move(nodes), v};
}

bool can_replace(const PathRecord& existing, const PathRecord& candidate) {
  if (existing.start() != candidate.start() || existing.end() != candidate.end())
    throw std::invalid_argument("can_replace: endpoint mismatch");
  const auto c = candidate.aav() <=> existing.aav();
  if (c != 0) return c < 0;
  if (candidate.arcs() != existing.arcs()) return candidate.arcs() > existing.arcs();
  return candidate.nodes < existing.nodes;
}

std::optional<PathRecord> extend(const PathRecord& p, int next, const CostMatrix& M, const Aav& bound) {
  if (next == p.end()) throw std::invalid_argument("extend: next equals the path end");
  if (std::find(p.nodes.begin(), p.nodes.end(), next) != p.nodes.end()) return std::nullopt;
  PathRecord q{p.nodes, p.value + M.at(p.end(), next)};
  q.nodes.push_back(next);
  if (!(q.aav() < bound)) return std::nullopt;
  return q;
}

const PathRecord* PathStore::find(int s, int e) const {
  auto it = active_.find({s, e});
  return it == active_.end() ? nullptr : &it->second;
}

void PathStore::tighten(Aav bound) {
  if (bound < bound_) bound_ = bound;
  std::erase_if(active_, [&](const auto& kv) { return !(kv.second.aav() < bound_); });
  std::erase_if(archived_, [&](const PathRecord& r) { return !(r.aav() < bound_); });
}

bool PathStore::offer(PathRecord rec) {
  if (!(rec.aav() < bound_)) return false;
  const std::pair<int, int> key{rec.start(), rec.end()};
  auto it = active_.find(key);
  if (it == active_.end()) {
    active_.emplace(key, std::move(rec));
    return true;
  }
  if (it->second == rec) return false;
  if (can_replace(it->second, rec)) {
    archived_.push_back(std::move(it->second));
    it->second = std::move(rec);
    return true;
  }
  archived_.push_back(std::move(rec));
  return false;
}

bool tour_less(const Tour& a, const Tour& b) { return a.canonical().order() < b.canonical().order(); }

namespace {

void consider(std::optional<TourCandidate>& best, const CostMatrix& M, std::vector<int> order) {
  Tour t(std::move(order));
  const Cost v = tour_value(M, t);
  if (!best || v < best->value || (v == best->value && tour_less(t, best->tour))) best = TourCandidate{t, v};
}

bool disjoint_interiors(const PathRecord& a, const PathRecord& b, int n) {
  std::vector<char> in(n, 0);
  for (int v : a.nodes) in[v] = 1;
  for (std::size_t i = 1; i + 1 < b.nodes.size(); ++i)
    if (in[b.nodes[i]]) return false;
  return true;
}

}  // namespace

std::optional<TourCandidate> fwk_pass(const CostMatrix& M, PathStore& store, int max_rounds) {
  const int n = M.size();
  if (max_rounds <= 0) max_rounds = n;
  std::optional<TourCandidate> best;
  const Aav tour_bound = store.bound();
  auto try_close = [&](const PathRecord& p) {
    if (p.arcs() != n - 1) return;
    const Cost total = p.value + M.at(p.end(), p.start());
    if (Aav{total, n} < tour_bound) consider(best, M, p.nodes);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) store.offer(PathRecord{{i, j}, M(i, j)});
  std::size_t archive_seen = 0;
  for (int round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (int j = 0; j < n; ++j) {
      std::vector<PathRecord> into, out;
      for (const auto& [key, rec] : store.active()) {
        if (key.second == j) into.push_back(rec);
        if (key.first == j) out.push_back(rec);
      }
      for (const auto& a : into) {
        for (const auto& b : out) {
          if (a.start() == b.end()) {
            // closes a cycle; only a full tour counts
            if (a.arcs() + b.arcs() == n && disjoint_interiors(a, b, n)) {
              std::vector<int> nodes = a.nodes;
              nodes.insert(nodes.end(), b.nodes.begin() + 1, b.nodes.end() - 1);
              const Cost total = a.value + b.value;
              if (Aav{total, n} < tour_bound) consider(best, M, nodes);
            }
            continue;
          }
          // b's end may not sit anywhere on a either
          if (!disjoint_interiors(a, b, n) || std::find(a.nodes.begin(), a.nodes.end(), b.end()) != a.nodes.end())
            continue;
          PathRecord c{a.nodes, a.value + b.value};
          c.nodes.insert(c.nodes.end(), b.nodes.begin() + 1, b.nodes.end());
          try_close(c);
          changed = store.offer(std::move(c)) || changed;
        }
      }
    }
    // displaced records stay extendable: a worse prefix can still lead to the better tour
    std::vector<PathRecord> snapshot(store.archived().begin() + archive_seen, store.archived().end());
    archive_seen = store.archived().size();
    for (const auto& [key, rec] : store.active()) snapshot.push_back(rec);
    for (const auto& p : snapshot) {
      try_close(p);
      for (int k = 0; k < n; ++k) {
        if (k == p.end()) continue;
        if (auto q = extend(p, k, M, store.bound())) {
          try_close(*q);
          changed = store.offer(std::move(*q)) || changed;
        }
      }
    }
    if (!changed && store.archived().size() == archive_seen) break;
  }
  return best;
}

namespace {

struct Working {
  CostMatrix W;
  Cost offset = 0;  // value in M = value in W + offset
};

Working working_matrix(const CostMatrix& M, bool reduce) {
  if (!reduce) return {M, 0};
  auto r = row_reduce(M);
  return {std::move(r.base), r.reduction_total};
}

struct Rec {
  std::uint64_t mask;
  Cost value;
  std::int32_t parent;
  std::int16_t start, end;
};

}  // namespace

FwkResult fwk_exact(const CostMatrix& M, const Tour& T0, const FwkOptions& opt) {
  const int n = M.size();
  if (n > 52) throw std::invalid_argument("fwk_exact supports n <= 52");
  const Working wk = working_matrix(M, opt.reduce_rows);
  const CostMatrix& W = wk.W;
  FwkResult res{T0, tour_value(M, T0), {}};
  res.stats.bound_history.push_back(res.value);
  // a quick BEST-table pass usually lowers the incumbent before the full sweep
  {
    FwkResult h = fwk_heuristic1(M, T0, n);
    if (h.value < res.value) {
      res.tour = h.tour;
      res.value = h.value;
      res.stats.bound_history.push_back(res.value);
    }
  }
  Cost U = res.value - wk.offset;  // incumbent in W
  std::vector<std::vector<Rec>> levels(1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && W(i, j) * n < U)
        levels[0].push_back({(std::uint64_t{1} << i) | (std::uint64_t{1} << j), W(i, j), -1,
                             static_cast<std::int16_t>(i), static_cast<std::int16_t>(j)});
  res.stats.level_records.push_back(levels[0].size());
  std::size_t generated = levels[0].size();
  std::optional<std::pair<int, int>> best_close;  // (level index, record) of the best closure
  std::optional<Tour> best_tour;
  for (int k = 1; k < n - 1 && !levels.back().empty(); ++k) {
    const auto& cur = levels.back();
    const int arcs = k + 1;
    const bool last = arcs == n - 1;
    // expand in chunks; chunk order keeps the merge deterministic
    const int chunks = std::max(1, std::min<int>(opt.workers * 4, static_cast<int>(cur.size() / 256) + 1));
    std::vector<std::vector<Rec>> parts(chunks);
    const std::size_t per = (cur.size() + chunks - 1) / chunks;
    parallel_for(opt.workers, chunks, [&](int c) {
      const std::size_t lo = c * per, hi = std::min(cur.size(), lo + per);
      auto& out = parts[c];
      for (std::size_t r = lo; r < hi; ++r) {
        const Rec& rec = cur[r];
        for (int v = 0; v < n; ++v) {
          if (rec.mask >> v & 1) continue;
          const Cost nv = rec.value + W(rec.end, v);
          if (nv * n >= U * arcs) continue;
          if (last && nv + W(v, rec.start) >= U) continue;
          out.push_back({rec.mask | (std::uint64_t{1} << v), nv, static_cast<std::int32_t>(r), rec.start,
                         static_cast<std::int16_t>(v)});
        }
      }
    });
    std::vector<Rec> next;
    std::unordered_map<std::uint64_t, std::size_t> index;
    for (auto& part : parts) {
      generated += part.size();
      for (const Rec& r : part) {
        const std::uint64_t key = (r.mask << 12) | (static_cast<std::uint64_t>(r.start) << 6) | r.end;
        auto [it, fresh] = index.try_emplace(key, next.size());
        if (fresh)
          next.push_back(r);
        else if (r.value < next[it->second].value)
          next[it->second] = r;
      }
    }
    if (last) {
      // close every surviving record; the bound tightens as tours appear
      for (std::size_t r = 0; r < next.size(); ++r) {
        const Cost total = next[r].value + W(next[r].end, next[r].start);
        if (total >= U && !(total == U && best_tour)) continue;
        std::vector<int> order(n);
        std::int32_t idx = static_cast<std::int32_t>(r);
        int lvl = k;
        order[n - 1] = next[r].end;
        const Rec* rec = &next[r];
        for (int pos = n - 2; pos >= 1; --pos) {
          idx = rec->parent;
          --lvl;
          rec = &levels[lvl][idx];
          order[pos] = rec->end;
        }
        order[0] = next[r].start;
        Tour t(order);
        if (total < U || tour_less(t, *best_tour)) {
          U = total;
          best_tour = t;
        }
      }
      res.stats.level_records.push_back(next.size());
      break;
    }
    // records whose own aav fails the (possibly tighter) bound are dropped
    std::erase_if(next, [&](const Rec& r) { return r.value * n >= U * arcs; });
    res.stats.level_records.push_back(next.size());
    levels.push_back(std::move(next));
  }
  res.stats.archive_size = generated;
  if (best_tour) {
    const Cost v = tour_value(M, *best_tour);
    if (v != U + wk.offset) throw InvariantError("fwk_exact: reduced value mismatch");
    if (v < res.value || (v == res.value && tour_less(*best_tour, res.tour))) {
      res.tour = *best_tour;
      res.value = v;
      res.stats.bound_history.push_back(v);
    }
  }
  return res;
}

namespace {

// BEST-table ordering: aav, then more arcs, then nodes.
bool rec_before(const PathRecord& a, const PathRecord& b) {
  const auto c = a.aav() <=> b.aav();
  if (c != 0) return c < 0;
  if (a.arcs() != b.arcs()) return a.arcs() > b.arcs();
  return a.nodes < b.nodes;
}

}  // namespace

FwkResult fwk_heuristic1(const CostMatrix& M, const Tour& T0, int k) {
  const int n = M.size();
  if (k < 1) throw std::invalid_argument("fwk_heuristic1: k must be >= 1");
  const Working wk = working_matrix(M, true);
  const CostMatrix& W = wk.W;
  FwkResult res{T0, tour_value(M, T0), {}};
  res.stats.bound_history.push_back(res.value);
  const Aav bound{res.value - wk.offset, n};
  std::vector<PathRecord> column;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && Aav{W(i, j), 1} < bound) column.push_back({{i, j}, W(i, j)});
  auto trim = [&](std::vector<PathRecord>& col) {
    std::sort(col.begin(), col.end(), rec_before);
    if (static_cast<int>(col.size()) > k) col.resize(k);
  };
  trim(column);
  res.stats.level_records.push_back(column.size());
  std::size_t generated = column.size();
  std::optional<TourCandidate> best;
  while (!column.empty() && column.front().arcs() < n - 1) {
    std::vector<PathRecord> next;
    for (const auto& p : column)
      for (int v = 0; v < n; ++v)
        if (v != p.end())
          if (auto q = extend(p, v, W, bound)) next.push_back(std::move(*q));
    generated += next.size();
    trim(next);
    column = std::move(next);
    res.stats.level_records.push_back(column.size());
  }
  for (const auto& p : column)
    if (p.arcs() == n - 1 && Aav{p.value + W(p.end(), p.start()), n} < bound) consider(best, M, p.nodes);
  res.stats.archive_size = generated;
  if (best && best->value < res.value) {
    res.tour = best->tour;
    res.value = best->value;
    res.stats.bound_history.push_back(res.value);
  }
  return res;
}

int heuristic2_width(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  return k + 1;
}

int heuristic2_pivot(const CostMatrix& M, const Tour& T0) {
  const int n = T0.size();
  const auto& o = T0.order();
  std::vector<Cost> w(n);
  Cost total = 0;
  for (int i = 0; i < n; ++i) total += (w[i] = M.at(o[i], o[(i + 1) % n]));
  const std::size_t d = aav_determining_node(w);
  std::vector<Cost> arcs(n);
  for (int i = 0; i < n; ++i) arcs[i] = w[(d + i) % n];
  auto above = [&](Cost c) { return c * n > total; };
  for (int i = 0; i < n; ++i) {
    if (!above(arcs[i])) continue;
    int later = n - 1 - i, hi = 0;
    for (int j = i + 1; j < n; ++j) hi += above(arcs[j]);
    if (later > 0 && 2 * hi > later) return i + 1;
  }
  return n;
}

FwkResult fwk_heuristic2(const CostMatrix& M, const Tour& T0, int width) {
  const int n = M.size();
  if (width <= 0) width = heuristic2_width(n);
  const Working wk = working_matrix(M, true);
  const CostMatrix& W = wk.W;
  FwkResult res{T0, tour_value(M, T0), {}};
  res.stats.bound_history.push_back(res.value);
  const Aav bound{res.value - wk.offset, n};
  const int pivot = heuristic2_pivot(W, T0);
  std::vector<PathRecord> pool;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && Aav{W(i, j), 1} < bound) pool.push_back({{i, j}, W(i, j)});
  std::size_t generated = pool.size();
  bool pivot_reached = pivot <= 1;
  std::optional<TourCandidate> best;
  auto key_before = [&](const PathRecord& a, const PathRecord& b) {
    if (pivot_reached) {
      const bool la = a.arcs() >= pivot, lb = b.arcs() >= pivot;
      if (la != lb) return la;
    }
    return rec_before(a, b);
  };
  for (int iter = 0; iter < n * n && !pool.empty(); ++iter) {
    const std::size_t take = std::min<std::size_t>(width, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + take, pool.end(), key_before);
    std::vector<PathRecord> chosen(pool.begin(), pool.begin() + take);
    pool.erase(pool.begin(), pool.begin() + take);
    std::size_t live = 0;
    for (const auto& p : chosen) {
      for (int v = 0; v < n; ++v) {
        if (v == p.end()) continue;
        auto q = extend(p, v, W, bound);
        if (!q) continue;
        ++generated;
        if (q->arcs() == n - 1) {
          if (Aav{q->value + W(q->end(), q->start()), n} < bound) consider(best, M, q->nodes);
          continue;
        }
        if (q->arcs() >= pivot) pivot_reached = true;
        pool.push_back(std::move(*q));
        ++live;
      }
    }
    res.stats.level_records.push_back(live);
    // keep the pool bounded
    const std::size_t cap = static_cast<std::size_t>(width) * n * n;
    if (pool.size() > cap) {
      std::nth_element(pool.begin(), pool.begin() + cap, pool.end(), key_before);
      pool.resize(cap);
    }
  }
  res.stats.archive_size = generated;
  if (best && best->value < res.value) {
    res.tour = best->tour;
    res.value = best->value;
    res.stats.bound_history.push_back(res.value);
  }
  return res;
}

}  // namespace gtsp
