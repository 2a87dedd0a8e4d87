#include "gtsp/patching.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "gtsp/matching.hpp"

namespace gtsp {

namespace {

std::vector<int> cycle_id(const Permutation& D) {
  std::vector<int> id(D.size(), -1);
  int k = 0;
  for (const auto& c : D.cycles()) {
    for (int v : c) id[v] = k;
    ++k;
  }
  return id;
}

// Reverse the cycle of D containing v.
Permutation reverse_cycle(const Permutation& D, int v) {
  std::vector<int> img = D.images();
  int x = v;
  do {
    const int y = D(x);
    img[y] = x;
    x = y;
  } while (x != v);
  return Permutation(std::move(img));
}

struct State {
  Permutation perm;
  Cost value;
  PatchPlan plan;
};

}  // namespace

PatchResult patch_pair(const CostMatrix& M, const Permutation& D, int a, int b) {
  const auto id = cycle_id(D);
  if (a == b || D(a) == a || D(b) == b || id[a] == id[b])
    throw std::invalid_argument("patch_pair: a and b must lie in different cycles");
  std::vector<int> img = D.images();
  img[a] = D(b);
  img[b] = D(a);
  const Cost delta = M.at(a, D(b)) + M.at(b, D(a)) - M.at(a, D(a)) - M.at(b, D(b));
  return {Permutation(std::move(img)), delta};
}

PatchedTour patch_to_cycle(const CostMatrix& M, const Permutation& D, int beam) {
  const int n = M.size();
  if (D.size() != n || !D.is_derangement()) throw std::invalid_argument("patch_to_cycle: D must be a derangement");
  if (beam <= 0) beam = n;
  std::vector<State> states{{D, perm_value(M, D), {}}};
  while (!states.front().perm.is_single_cycle()) {
    // duplicates collapse: same permutation reached twice keeps the cheaper plan
    std::map<std::vector<int>, State> next;
    for (const auto& st : states) {
      const auto& P = st.perm;
      const auto id = cycle_id(P);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          if (id[a] >= id[b]) continue;
          for (int rev = 0; rev < (M.symmetric() ? 2 : 1); ++rev) {
            if (rev && P.cycles()[id[b]].size() < 3) continue;  // a 2-cycle reversed is itself
            const Permutation base = rev ? reverse_cycle(P, b) : P;
            auto [np, delta] = patch_pair(M, base, a, b);
            State cand{std::move(np), st.value + delta, st.plan};
            cand.plan.steps.push_back({a, b, rev == 1, delta});
            cand.plan.total_delta += delta;
            auto it = next.find(cand.perm.images());
            if (it == next.end())
              next.emplace(cand.perm.images(), std::move(cand));
            else if (cand.value < it->second.value)
              it->second = std::move(cand);
          }
        }
      }
    }
    states.clear();
    for (auto& [k, st] : next) states.push_back(std::move(st));
    std::stable_sort(states.begin(), states.end(), [](const State& x, const State& y) { return x.value < y.value; });
    if (static_cast<int>(states.size()) > beam) states.erase(states.begin() + beam, states.end());
  }
  const State& best = states.front();
  Tour t = Tour::from_successors(best.perm.images());
  const Cost v = tour_value(M, t);
  if (v != best.value) throw InvariantError("patch_to_cycle: value accounting mismatch");
  return {t, v, best.plan};
}

std::optional<Tour> weave_matchings(const Matching& PM1, const Matching& PM2) {
  const int n = PM1.size();
  if (PM2.size() != n || PM1.fixed_point() || PM2.fixed_point())
    throw std::invalid_argument("weave_matchings: need two perfect matchings of equal size");
  for (int a = 0; a < n; ++a)
    if (PM1.partner(a) == PM2.partner(a)) throw std::invalid_argument("weave_matchings: matchings share an edge");
  std::vector<int> order{0};
  int v = 0;
  for (int k = 1; k < n; ++k) {
    v = (k % 2) ? PM1.partner(v) : PM2.partner(v);
    if (v == 0) return std::nullopt;
    order.push_back(v);
  }
  if (PM2.partner(v) != 0) return std::nullopt;
  return Tour(std::move(order));
}

}  // namespace gtsp
