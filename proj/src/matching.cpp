#include "gtsp/matching.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "gtsp/parallel.hpp"

namespace gtsp {

Matching::Matching(const CostMatrix& M, std::vector<int> partner) : partner_(std::move(partner)) {
  const int n = size();
  if (n != M.size()) throw std::invalid_argument("matching: size mismatch");
  int fixed_count = 0;
  for (int a = 0; a < n; ++a) {
    const int b = partner_[a];
    if (b < 0 || b >= n || partner_[b] != a) throw std::invalid_argument("matching: not an involution");
    if (b == a) {
      ++fixed_count;
      fixed_ = a;
      continue;
    }
    dv_ += M(a, b);
    if (a < b) es_ += M(a, b);
  }
  if (fixed_count != n % 2) throw std::invalid_argument("matching: wrong number of fixed points");
}

std::vector<std::pair<int, int>> Matching::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < size(); ++a)
    if (a < partner_[a]) out.emplace_back(a, partner_[a]);
  return out;
}

std::string Matching::to_string() const {
  std::string s;
  for (auto [a, b] : pairs()) s += "(" + std::to_string(a + 1) + " " + std::to_string(b + 1) + ")";
  if (fixed_) s += " fixed " + std::to_string(*fixed_ + 1);
  return s;
}

namespace {

Matching from_pairs(const CostMatrix& M, const std::vector<std::pair<int, int>>& ps) {
  std::vector<int> partner(M.size());
  for (int a = 0; a < M.size(); ++a) partner[a] = a;
  for (auto [a, b] : ps) partner[a] = b, partner[b] = a;
  return Matching(M, std::move(partner));
}

bool cheaper(const Matching& x, const Matching& y) {
  if (x.derangement_value() != y.derangement_value()) return x.derangement_value() < y.derangement_value();
  return x.pairs() < y.pairs();
}

}  // namespace

Matching apm_for_fixed_point(const CostMatrix& M, const Tour& T, int fixed) {
  const int n = T.size();
  if (n % 2 == 0) throw std::invalid_argument("apm_for_fixed_point: n must be odd");
  const auto& o = T.order();
  const int i = static_cast<int>(std::find(o.begin(), o.end(), fixed) - o.begin());
  std::vector<std::pair<int, int>> ps;
  for (int k = 1; k < n; k += 2) ps.emplace_back(o[(i + k) % n], o[(i + k + 1) % n]);
  return from_pairs(M, ps);
}

std::pair<Matching, Matching> alternating_matchings(const CostMatrix& M, const Tour& T) {
  const int n = T.size();
  if (n != M.size()) throw std::invalid_argument("alternating_matchings: size mismatch");
  const auto& o = T.order();
  if (n % 2 == 0) {
    std::vector<std::pair<int, int>> p1, p2;
    for (int k = 0; k < n; k += 2) p1.emplace_back(o[k], o[k + 1]);
    for (int k = 1; k < n; k += 2) p2.emplace_back(o[k], o[(k + 1) % n]);
    Matching a = from_pairs(M, p1), b = from_pairs(M, p2);
    if (cheaper(b, a)) return {b, a};
    return {a, b};
  }
  std::optional<Matching> best;
  for (int f = 0; f < n; ++f) {
    Matching m = apm_for_fixed_point(M, T, f);
    if (!best || m.derangement_value() < best->derangement_value()) best = std::move(m);
  }
  const int f = *best->fixed_point();
  const int nf = T.successors()[f];
  return {*best, apm_for_fixed_point(M, T, nf)};
}

TransformMatrix matching_transform(const CostMatrix& M, const Matching& sigma) {
  return TransformMatrix(M, sigma.as_permutation(), sigma.fixed_point());
}

std::optional<CycleKind> classify_cycle(const Matching& sigma, const std::vector<int>& nodes) {
  const int L = static_cast<int>(nodes.size());
  std::vector<int> pos(sigma.size(), -1);
  for (int i = 0; i < L; ++i) pos[nodes[i]] = i;
  std::vector<std::pair<int, int>> full;
  for (int v : nodes) {
    const int w = sigma.partner(v);
    if (w != v && v < w && pos[w] >= 0) full.emplace_back(v, w);
  }
  for (int i = 0; L >= 3 && i < L; ++i) {
    const int mid = nodes[(i + 1) % L];
    if (sigma.partner(mid) == mid && sigma.partner(nodes[i]) == nodes[(i + 2) % L]) return std::nullopt;
  }
  if (full.empty()) return CycleKind::acceptable;
  if (full.size() == 1) return CycleKind::unlinked2;
  if (full.size() > 2) return std::nullopt;
  auto between = [&](int a, int b, int z) {
    const int dz = (pos[z] - pos[a] + L) % L;
    const int db = (pos[b] - pos[a] + L) % L;
    return dz > 0 && dz < db;
  };
  const auto [x, sx] = full[0];
  const auto [y, sy] = full[1];
  if (between(x, sx, y) == between(x, sx, sy)) return std::nullopt;
  return CycleKind::linked2;
}

namespace {

void require_plain_acceptable(const Matching& sigma, const WeightedCycle& C) {
  if (classify_cycle(sigma, C.nodes) != CycleKind::acceptable)
    throw std::invalid_argument("cycle is not acceptable for this matching");
  for (int v : C.nodes)
    if (sigma.partner(v) == v) throw std::invalid_argument("cycle holds the matching's fixed point");
}

}  // namespace

WeightedCycle companion_cycle(const CostMatrix& M, const Matching& sigma, const WeightedCycle& C) {
  require_plain_acceptable(sigma, C);
  const auto& a = C.nodes;
  const int m = static_cast<int>(a.size());
  std::vector<int> c;
  c.reserve(m);
  c.push_back(sigma.partner(a[1 % m]));
  for (int k = 0; k < m - 1; ++k) c.push_back(sigma.partner(a[(m - k) % m]));
  WeightedCycle out = make_cycle(matching_transform(M, sigma), std::move(c));
  out.kind = CycleKind::acceptable;
  return out;
}

Matching apply_to_matching(const CostMatrix& M, const Matching& sigma, const WeightedCycle& C) {
  if (C.nodes.empty()) return sigma;
  require_plain_acceptable(sigma, C);
  std::vector<int> partner = sigma.partners();
  const auto& a = C.nodes;
  const int m = static_cast<int>(a.size());
  for (int i = 0; i < m; ++i) {
    const int u = a[i], w = sigma.partner(a[(i + 1) % m]);
    partner[u] = w;
    partner[w] = u;
  }
  Matching out(M, std::move(partner));
  if (M.symmetric()) {
    const Cost v = cycle_value(matching_transform(M, sigma), C.nodes);
    if (out.edge_sum() - sigma.edge_sum() != v) throw InvariantError("edge_sum additivity violated");
  }
  return out;
}

Tour half_cycle_tour(const Matching& sigma, const WeightedCycle& C) {
  const int n = sigma.size();
  if (n % 2) throw std::invalid_argument("half_cycle_tour: n must be even");
  const auto& a = C.nodes;
  const int m = static_cast<int>(a.size());
  if (2 * m != n) throw std::invalid_argument("half_cycle_tour: cycle must hold n/2 points");
  std::set<int> pair_ids;
  for (int v : a) pair_ids.insert(sigma.pair_id(v));
  if (static_cast<int>(pair_ids.size()) != m) throw std::invalid_argument("half_cycle_tour: two points share a pair");
  std::vector<int> order;
  for (int i = 0; i < m; ++i) {
    order.push_back(a[i]);
    order.push_back(sigma.partner(a[(i + 1) % m]));
  }
  return Tour(std::move(order));
}

std::size_t CycleCatalog::member_count() const {
  std::size_t k = 0;
  for (const auto& e : entries) k += e.members.size();
  return k;
}

namespace {

struct Found {
  std::vector<int> nodes;
  Cost value;
  CycleKind kind;
};

class CycleDfs {
 public:
  CycleDfs(const TransformMatrix& TM, const Matching& sigma, Cost ceiling, int max_len, int max_pairs,
           const EnumerateOptions& opt)
      : TM_(TM), sig_(sigma), n_(TM.size()), ceil_(ceiling), prefix_ceil_(std::max<Cost>(ceiling, 0)),
        max_len_(max_len), max_pairs_(max_pairs), opt_(opt), pos_(n_, -1) {}

  std::vector<Found> run(int root) {
    out_.clear();
    root_ = root;
    path_.assign(1, root);
    pos_.assign(n_, -1);
    pos_[root] = 0;
    full_.clear();
    extend(0);
    return std::move(out_);
  }

 private:
  bool kind_allowed(std::size_t pairs) const {
    if (pairs == 0) return opt_.acceptable;
    if (pairs == 1) return opt_.unlinked2;
    return opt_.linked2;
  }

  bool fixed(int v) const { return sig_.partner(v) == v; }

  void try_close(Cost prefix) {
    const int L = static_cast<int>(path_.size());
    const int cur = path_.back();
    if (L < 2 || !TM_.available(cur, root_)) return;
    const Cost total = prefix + TM_.entry(cur, root_);
    if (total >= ceil_ || !kind_allowed(full_.size())) return;
    // wrap-around [a, fixed, partner(a)] patterns
    if (L >= 3) {
      if (fixed(cur) && sig_.partner(path_[L - 2]) == root_) return;
      if (fixed(root_) && sig_.partner(cur) == path_[1]) return;
    }
    const CycleKind k = full_.empty() ? CycleKind::acceptable
                        : full_.size() == 1 ? CycleKind::unlinked2
                                            : CycleKind::linked2;
    out_.push_back({canonical_rotation(path_), total, k});
  }

  void extend(Cost prefix) {
    try_close(prefix);
    const int L = static_cast<int>(path_.size());
    if (L >= max_len_) return;
    const int cur = path_.back();
    for (int v = 0; v < n_; ++v) {
      if (pos_[v] >= 0 || !TM_.available(cur, v)) continue;
      const Cost np = prefix + TM_.entry(cur, v);
      if (np >= prefix_ceil_) continue;
      if (L >= 2 && fixed(cur) && sig_.partner(path_[L - 2]) == v) continue;
      const int w = sig_.partner(v);
      const bool completes = w != v && pos_[w] >= 0;
      if (completes) {
        if (static_cast<int>(full_.size()) >= max_pairs_) continue;
        if (full_.size() == 1) {
          // positions are final once both pairs are on the path
          const int x = pos_[full_[0].first], sx = pos_[full_[0].second];
          const int lo = std::min(x, sx), hi = std::max(x, sx);
          const int y = pos_[w], sy = L;
          const bool y_in = y > lo && y < hi, sy_in = sy > lo && sy < hi;
          if (y_in == sy_in) continue;  // nested
        }
        full_.emplace_back(w, v);
      }
      pos_[v] = L;
      path_.push_back(v);
      extend(np);
      path_.pop_back();
      pos_[v] = -1;
      if (completes) full_.pop_back();
    }
  }

  const TransformMatrix& TM_;
  const Matching& sig_;
  int n_;
  Cost ceil_, prefix_ceil_;
  int max_len_, max_pairs_;
  const EnumerateOptions& opt_;
  int root_ = 0;
  std::vector<int> path_, pos_;
  std::vector<std::pair<int, int>> full_;
  std::vector<Found> out_;
};

}  // namespace

CycleCatalog enumerate_cycles(const CostMatrix& M, const Matching& sigma, Cost ceiling, const EnumerateOptions& opt) {
  const int n = M.size();
  const int max_len = opt.max_len > 0 ? std::min(opt.max_len, n) : std::min(n, n / 2 + 2);
  const int max_pairs = opt.linked2 ? 2 : opt.unlinked2 ? 1 : 0;
  const TransformMatrix TM = matching_transform(M, sigma);
  std::vector<std::vector<Found>> per_root(n);
  parallel_for(opt.workers, n, [&](int r) {
    CycleDfs dfs(TM, sigma, ceiling, max_len, max_pairs, opt);
    per_root[r] = dfs.run(r);
  });
  std::map<std::vector<int>, Found> unique;
  for (auto& v : per_root)
    for (auto& f : v) unique.emplace(f.nodes, std::move(f));

  using Key = std::tuple<std::vector<int>, std::vector<int>, Cost>;
  std::map<Key, CatalogEntry> groups;
  for (auto& [nodes, f] : unique) {
    std::set<int> touched, nonlinking;
    std::vector<int> linking;
    std::vector<char> in(n, 0);
    for (int v : nodes) in[v] = 1;
    for (int v : nodes) {
      touched.insert(sigma.pair_id(v));
      const int w = sigma.partner(v);
      if (w == v) continue;
      if (in[w])
        nonlinking.insert(sigma.pair_id(v));
      else
        linking.push_back(v);
    }
    Key key{{touched.begin(), touched.end()}, {nonlinking.begin(), nonlinking.end()}, f.value};
    WeightedCycle wc{nodes, f.value, f.kind};
    auto it = groups.find(key);
    if (it == groups.end()) {
      CatalogEntry e{wc, std::get<0>(key), std::get<1>(key), linking, {wc}};
      groups.emplace(std::move(key), std::move(e));
    } else {
      it->second.members.push_back(wc);  // map order: first member is the smallest
    }
  }
  CycleCatalog cat{{}, ceiling, max_len};
  for (auto& [k, e] : groups) cat.entries.push_back(std::move(e));
  std::stable_sort(cat.entries.begin(), cat.entries.end(), [](const CatalogEntry& x, const CatalogEntry& y) {
    return std::tie(x.cycle.value, x.cycle.nodes) < std::tie(y.cycle.value, y.cycle.nodes);
  });
  return cat;
}

namespace {

class LinkDfs {
 public:
  LinkDfs(const CycleCatalog& cat, const Matching& sigma, Cost bound, const CostMatrix& M)
      : sig_(sigma), M_(M), n_(M.size()), bound_(bound), state_(n_, kUndecided), succ_(n_, -1), negmin_(n_, 0) {
    if (n_ > 64) throw std::invalid_argument("link_search supports n <= 64");
    by_vertex_.resize(n_);
    for (const auto& e : cat.entries)
      for (const auto& c : e.members) {
        const int id = static_cast<int>(cycles_.size());
        std::uint64_t mask = 0;
        for (int v : c.nodes) mask |= std::uint64_t{1} << v;
        cycles_.push_back({&c, mask});
        // a vertex either stays (0) or carries its share of one cycle
        const Cost L = static_cast<Cost>(c.nodes.size());
        const Cost share = c.value >= 0 ? c.value / L : -((-c.value + L - 1) / L);
        for (int v : c.nodes) negmin_[v] = std::min(negmin_[v], share);
        // the search only ever opens a cycle at its smallest vertex
        by_vertex_[*std::min_element(c.nodes.begin(), c.nodes.end())].push_back(id);
      }
    for (auto& lst : by_vertex_)
      std::stable_sort(lst.begin(), lst.end(),
                       [&](int x, int y) { return cycles_[x].c->value < cycles_[y].c->value; });
    for (int v = 0; v < n_; ++v) lb_rest_ += negmin_[v];
  }

  std::optional<LinkResult> run() {
    const int ceil_half = (n_ + 1) / 2;
    search(0, 0, 1 - ceil_half, lb_rest_);
    return std::move(best_);
  }

 private:
  static constexpr int kUndecided = 0, kMoved = 1, kStays = 2;
  struct Cyc {
    const WeightedCycle* c;
    std::uint64_t mask;
  };

  bool pair_ok_if_stays(int v) const {
    const int w = sig_.partner(v);
    if (w == v) return false;  // the fixed point has to move
    return state_[w] != kStays;
  }

  bool closes_early(const std::vector<int>& nodes) const {
    for (int a : nodes) {
      int x = succ_[a];
      for (int steps = 1; x >= 0; ++steps) {
        if (x == a) return steps < n_;
        x = succ_[x];
      }
    }
    return false;
  }

  void search(int from, Cost value, int slack, Cost lb) {
    if (slack > 0) return;
    if (value + lb >= bound_) return;
    // each undecided vertex adds at most one point of slack
    if (slack + n_ - from < 0) return;
    if (best_ && value + lb > best_sigma_) return;
    int v = from;
    while (v < n_ && state_[v] != kUndecided) ++v;
    if (v == n_) {
      if (slack == 0) finish(value);
      return;
    }
    // v joins a cycle; lists are sorted by value so the bound test can stop the scan
    for (int id : by_vertex_[v]) {
      const Cyc& cy = cycles_[id];
      const Cost reach = value + cy.c->value + lb;
      if (reach >= bound_ || (best_ && reach > best_sigma_)) break;
      if (cy.mask & decided_) continue;
      const auto& nodes = cy.c->nodes;
      const int L = static_cast<int>(nodes.size());
      const int gain = cy.c->kind == CycleKind::acceptable ? L - 1 : L - 3;
      Cost lb2 = lb;
      for (int x : nodes) lb2 -= negmin_[x];
      for (int i = 0; i < L; ++i) {
        state_[nodes[i]] = kMoved;
        succ_[nodes[i]] = sig_.partner(nodes[(i + 1) % L]);
      }
      chosen_.push_back(cy.c);
      decided_ |= cy.mask;
      if (!closes_early(nodes)) search(v + 1, value + cy.c->value, slack + gain, lb2);
      decided_ &= ~cy.mask;
      chosen_.pop_back();
      for (int x : nodes) state_[x] = kUndecided, succ_[x] = -1;
    }
    // v keeps its matching partner as tour neighbor
    if (pair_ok_if_stays(v)) {
      state_[v] = kStays;
      decided_ |= std::uint64_t{1} << v;
      search(v + 1, value, slack, lb - negmin_[v]);
      decided_ &= ~(std::uint64_t{1} << v);
      state_[v] = kUndecided;
    }
  }

  void finish(Cost value) {
    std::vector<int> succ(n_);
    for (int a = 0; a < n_; ++a) succ[a] = state_[a] == kMoved ? succ_[a] : sig_.partner(a);
    std::vector<int> order{0};
    for (int x = succ[0]; x != 0 && static_cast<int>(order.size()) <= n_; x = succ[x]) order.push_back(x);
    if (static_cast<int>(order.size()) != n_) return;
    const Cost tv = sig_.derangement_value() + value;
    if (best_ && (value > best_sigma_ || (value == best_sigma_ && order >= best_->tour.order()))) return;
    Tour t(order);
    if (tour_value(M_, t) != tv) throw InvariantError("link_search: value identity violated");
    LinkResult r{t, tv, {}, 0, 0, 0};
    for (const auto* c : chosen_) {
      r.cycles.push_back(*c);
      (c->kind == CycleKind::acceptable ? r.acceptable : r.two_circuit) += 1;
      r.points += static_cast<int>(c->nodes.size());
    }
    if (r.points != point_formula(n_, r.two_circuit, r.acceptable))
      throw InvariantError("link_search: point-count formula violated");
    best_ = std::move(r);
    best_sigma_ = value;
  }

  const Matching& sig_;
  const CostMatrix& M_;
  int n_;
  Cost bound_;
  std::vector<int> state_, succ_;
  std::uint64_t decided_ = 0;
  std::vector<Cost> negmin_;
  Cost lb_rest_ = 0;
  std::vector<Cyc> cycles_;
  std::vector<std::vector<int>> by_vertex_;
  std::vector<const WeightedCycle*> chosen_;
  std::optional<LinkResult> best_;
  Cost best_sigma_ = 0;
};

}  // namespace

std::optional<LinkResult> link_search(const CycleCatalog& catalog, const Matching& sigma, Cost bound,
                                      const CostMatrix& M) {
  LinkDfs dfs(catalog, sigma, bound, M);
  return dfs.run();
}

RefineResult refine(const CostMatrix& M, const Tour& T, const RefineConfig& cfg) {
  const int n = M.size();
  RefineResult res{T, tour_value(M, T), {}, 0, 0, 0};
  res.history.push_back(res.value);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    auto [s1, s2] = alternating_matchings(M, res.tour);
    std::optional<LinkResult> step;
    for (int which = 0; which < (cfg.try_complement ? 2 : 1) && !step; ++which) {
      const Matching& sigma = which == 0 ? s1 : s2;
      const Cost bound = res.value - sigma.derangement_value();
      Cost ceiling = bound;
      EnumerateOptions opt;
      opt.workers = cfg.workers;
      opt.max_len = cfg.max_len;
      if (cfg.exhaustive) {
        const TransformMatrix TM = matching_transform(M, sigma);
        for (int v = 0; v < n; ++v) {
          Cost lo = 0;
          for (int b = 0; b < n; ++b)
            if (b != v && TM.available(v, b)) lo = std::min(lo, TM.entry(v, b));
          ceiling -= lo;
        }
        if (opt.max_len == 0) opt.max_len = n;
      }
      const CycleCatalog cat = enumerate_cycles(M, sigma, ceiling, opt);
      step = link_search(cat, sigma, bound, M);
    }
    if (!step) break;
    if (step->value >= res.value) throw InvariantError("refine: non-improving step");
    res.tour = step->tour;
    res.value = step->value;
    res.acceptable = step->acceptable;
    res.two_circuit = step->two_circuit;
    res.points = step->points;
    res.history.push_back(res.value);
  }
  return res;
}

}  // namespace gtsp
