#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "gtsp/descent.hpp"
#include "gtsp/matching.hpp"
#include "gtsp/oracle.hpp"
#include "gtsp/patching.hpp"

using namespace gtsp;
using fixtures::zb;

namespace {

const Tour& t165() {
  static const Tour t(zb({1, 7, 4, 12, 10, 6, 8, 16, 11, 17, 2, 9, 5, 18, 3, 13, 19, 15, 20, 14}));
  return t;
}

Matching random_matching(std::mt19937_64& rng, const CostMatrix& M) {
  auto all = oracle::enumerate_matchings(M.size());
  return Matching(M, all[rng() % all.size()]);
}

// random acceptable cycle: one point from each of k distinct pairs, any order
WeightedCycle random_acceptable(std::mt19937_64& rng, const CostMatrix& M, const Matching& s, int k) {
  auto pairs = s.pairs();
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::vector<int> nodes;
  for (int i = 0; i < k; ++i) nodes.push_back(rng() % 2 ? pairs[i].first : pairs[i].second);
  auto c = make_cycle(matching_transform(M, s), nodes);
  c.kind = *classify_cycle(s, c.nodes);
  return c;
}

}  // namespace

TEST_CASE("sigma of the 165 tour on ex4") {
  auto M = fixtures::load("ex4.txt");
  REQUIRE(tour_value(M, t165()) == 165);
  auto [s1, s2] = alternating_matchings(M, t165());
  CHECK(s1.to_string() == "(1 7)(2 9)(3 13)(4 12)(5 18)(6 10)(8 16)(11 17)(14 20)(15 19)");
  CHECK(s1.derangement_value() == 156);
  CHECK(s1.derangement_value() == 2 * s1.edge_sum());
  CHECK(s1.derangement_value() + s2.derangement_value() == 2 * 165);
  CHECK_FALSE(s1.fixed_point());
}

TEST_CASE("uniform n = 4 tour splits into its two matchings") {
  std::vector<std::vector<Cost>> rows(4, std::vector<Cost>(4, 3));
  auto M = CostMatrix::from_rows(rows);
  auto [a, b] = alternating_matchings(M, Tour({0, 1, 2, 3}));
  std::set<std::vector<std::pair<int, int>>> got{a.pairs(), b.pairs()};
  std::set<std::vector<std::pair<int, int>>> want{{{0, 1}, {2, 3}}, {{0, 3}, {1, 2}}};
  CHECK(got == want);
  CHECK_THROWS(Matching(M, {1, 0, 2, 3}));  // even n, fixed points
  CHECK_THROWS(Matching(M, {1, 2, 3, 0}));  // not an involution
}

TEST_CASE("ex7 APM with fixed point 6") {
  auto M = fixtures::load("ex7.txt");
  Tour T(zb({4, 9, 10, 8, 12, 7, 14, 6, 13, 11, 15, 3, 1, 5, 2}));
  REQUIRE(tour_value(M, T) == 562);
  auto apm = apm_for_fixed_point(M, T, 5);
  CHECK(apm.fixed_point() == std::optional<int>(5));
  CHECK(apm.to_string() == "(1 5)(2 4)(3 15)(7 14)(8 12)(9 10)(11 13) fixed 6");
  CHECK(apm.edge_sum() == 266);
  CHECK(apm.derangement_value() == 532);
  // the pipeline's choice minimizes the derangement value over all fixed points
  auto [s1, s2] = alternating_matchings(M, T);
  for (int f = 0; f < 15; ++f) CHECK(s1.derangement_value() <= apm_for_fixed_point(M, T, f).derangement_value());
  REQUIRE(s1.fixed_point());
  REQUIRE(s2.fixed_point());
  CHECK(*s2.fixed_point() == T.successors()[*s1.fixed_point()]);
  CHECK(s1.edge_sum() + s2.edge_sum() + M(*s1.fixed_point(), *s2.fixed_point()) == 562);
}

TEST_CASE("catalog on the 165 tour") {
  auto M = fixtures::load("ex4.txt");
  auto [s, other] = alternating_matchings(M, t165());
  auto TM = matching_transform(M, s);
  CHECK(cycle_value(TM, zb({4, 1})) == -10);
  CHECK(cycle_value(TM, zb({12, 7})) == -10);
  CHECK(cycle_value(TM, zb({16, 17, 6})) == -12);
  CHECK(cycle_value(TM, zb({8, 10, 11})) == -12);
  for (Cost bound : {Cost{9}, Cost{13}}) {
    auto cat = enumerate_cycles(M, s, bound);
    std::set<std::vector<int>> members;
    for (auto& e : cat.entries) {
      CHECK(e.cycle.value < bound);
      for (auto& c : e.members) members.insert(c.nodes);
    }
    for (auto c : {zb({1, 4}), zb({7, 12}), zb({6, 16, 17}), zb({8, 10, 11})}) CHECK(members.count(c) == 1);
  }
  // improvement bound from this tour
  CHECK(165 - s.derangement_value() == 9);
}

TEST_CASE("companion cycles") {
  auto M = fixtures::load("ex4.txt");
  auto [s, other] = alternating_matchings(M, t165());
  auto TM = matching_transform(M, s);
  auto C = make_cycle(TM, zb({4, 1}));
  auto Cp = companion_cycle(M, s, C);
  CHECK(canonical_rotation(Cp.nodes) == zb({7, 12}));
  CHECK(Cp.value == -10);
  // 2-cycle rule: (a b) -> (sigma(b) sigma(a))
  auto D = make_cycle(TM, zb({2, 3}));
  CHECK(companion_cycle(M, s, D).nodes == std::vector<int>{s.partner(2), s.partner(1)});
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    int n = 2 * (3 + t % 4);
    auto R = fixtures::random_matrix(rng, n, true);
    auto sig = random_matching(rng, R);
    auto c = random_acceptable(rng, R, sig, 2 + static_cast<int>(rng() % (n / 2 - 1)));
    CHECK(companion_cycle(R, sig, c).value == c.value);
  }
  // not acceptable: contains a full pair
  CHECK_THROWS(companion_cycle(M, s, make_cycle(TM, zb({1, 4, 12, 7}))));
}

TEST_CASE("apply_to_matching") {
  auto M = fixtures::load("ex4.txt");
  auto [s, other] = alternating_matchings(M, t165());
  auto C = make_cycle(matching_transform(M, s), zb({4, 1}));
  auto s2 = apply_to_matching(M, s, C);
  CHECK(s2.partner(3) == 6);
  CHECK(s2.partner(0) == 11);
  CHECK(s2.edge_sum() == s.edge_sum() - 10);
  CHECK(apply_to_matching(M, s, WeightedCycle{}) == s);
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200; ++t) {
    int n = 2 * (2 + t % 4);
    auto R = fixtures::random_matrix(rng, n, true);
    auto sig = random_matching(rng, R);
    auto c = random_acceptable(rng, R, sig, 2 + static_cast<int>(rng() % (n / 2 - 1)));
    auto nxt = apply_to_matching(R, sig, c);
    CHECK(nxt.as_permutation().is_involution());
    CHECK_FALSE(nxt.fixed_point());
    CHECK(nxt.edge_sum() - sig.edge_sum() == c.value);
  }
}

TEST_CASE("descent over acceptable cycles reaches a minimum matching") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 30; ++t) {
    int n = 2 * (2 + t % 4);
    auto R = fixtures::random_matrix(rng, n, true);
    auto sig = random_matching(rng, R);
    EnumerateOptions opt;
    opt.unlinked2 = opt.linked2 = false;
    opt.max_len = n;
    for (int guard = 0; guard < 1000; ++guard) {
      auto cat = enumerate_cycles(R, sig, 0, opt);
      if (cat.entries.empty()) break;
      sig = apply_to_matching(R, sig, cat.entries.front().cycle);
    }
    CHECK(sig.derangement_value() == oracle::min_matching_value(R));
  }
}

TEST_CASE("half_cycle_tour") {
  auto M = CostMatrix::from_rows({{0, 1, 2, 3}, {1, 0, 4, 5}, {2, 4, 0, 6}, {3, 5, 6, 0}});
  Matching s(M, {1, 0, 3, 2});
  auto C = make_cycle(matching_transform(M, s), {0, 2});
  auto T = half_cycle_tour(s, C);
  CHECK(T == Tour(zb({1, 4, 3, 2})));
  CHECK(tour_value(M, T) == s.derangement_value() + C.value);
  CHECK_THROWS(half_cycle_tour(s, make_cycle(matching_transform(M, s), {0, 3, 2})));

  std::mt19937_64 rng(53);
  for (int t = 0; t < 100; ++t) {
    int n = 6 + 2 * (t % 3);
    auto R = fixtures::random_matrix(rng, n, true);
    auto sig = random_matching(rng, R);
    auto c = random_acceptable(rng, R, sig, n / 2);
    auto tour = half_cycle_tour(sig, c);
    CHECK(tour_value(R, tour) == sig.derangement_value() + c.value);
  }
  // round trip through s = sigma∘T: a single acceptable n/2-cycle rebuilds T
  for (int t = 0; t < 50; ++t) {
    int n = 6 + 2 * (t % 3);
    auto R = fixtures::random_matrix(rng, n, true);
    Tour T(fixtures::random_order(rng, n));
    auto [sig, other] = alternating_matchings(R, T);
    auto s = compose(sig.as_permutation(), Permutation::from_tour(T));
    auto cs = s.cycles();
    // pairs already on T are fixed by s; the other half forms one cycle
    REQUIRE(cs.size() == 1);
    CHECK(static_cast<int>(cs[0].size()) == n / 2);
    auto c = make_cycle(matching_transform(R, sig), cs[0]);
    CHECK(half_cycle_tour(sig, c) == T);
  }
}

TEST_CASE("catalog equals the brute-force cycle list at n <= 8") {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 40; ++t) {
    int n = 5 + t % 4;
    bool sym = t % 3 != 0;
    auto R = fixtures::random_matrix(rng, n, sym);
    auto sig = random_matching(rng, R);
    Cost ceiling = static_cast<Cost>(rng() % 40) - 15;
    int max_len = 3 + static_cast<int>(rng() % (n - 2));
    EnumerateOptions opt;
    opt.max_len = max_len;
    auto cat = enumerate_cycles(R, sig, ceiling, opt);
    std::set<std::pair<std::vector<int>, Cost>> got, want;
    for (auto& e : cat.entries)
      for (auto& c : e.members) {
        got.insert({c.nodes, c.value});
        CHECK(classify_cycle(sig, c.nodes) == std::optional<CycleKind>(c.kind));
      }
    for (auto& c : oracle::enumerate_admissible_cycles(R, sig.partners(), ceiling, max_len)) want.insert({c.nodes, c.value});
    CHECK(got == want);
    // members of one entry share touched pairs and value
    for (auto& e : cat.entries)
      for (auto& c : e.members) CHECK(c.value == e.cycle.value);
  }
}

TEST_CASE("odd n catalog never holds [a, fixed, partner(a)]") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 20; ++t) {
    int n = 7 + 2 * (t % 2);
    auto R = fixtures::random_matrix(rng, n, true);
    auto [sig, other] = alternating_matchings(R, Tour(fixtures::random_order(rng, n)));
    int f = *sig.fixed_point();
    EnumerateOptions opt;
    opt.max_len = n;
    auto cat = enumerate_cycles(R, sig, 30, opt);
    for (auto& e : cat.entries)
      for (auto& c : e.members) {
        int L = static_cast<int>(c.nodes.size());
        for (int i = 0; i < L && L >= 3; ++i)
          if (c.nodes[(i + 1) % L] == f) CHECK(sig.partner(c.nodes[i]) != c.nodes[(i + 2) % L]);
      }
  }
}

TEST_CASE("minimal sigma with bound 0 gives an empty acceptable catalog") {
  std::mt19937_64 rng(67);
  auto R = fixtures::random_matrix(rng, 8, true);
  Matching best(R, oracle::enumerate_matchings(8).front());
  for (auto& p : oracle::enumerate_matchings(8)) {
    Matching m(R, p);
    if (m.derangement_value() < best.derangement_value()) best = m;
  }
  EnumerateOptions opt;
  opt.unlinked2 = opt.linked2 = false;
  opt.max_len = 8;
  CHECK(enumerate_cycles(R, best, 0, opt).entries.empty());
}

TEST_CASE("link_search matches the neighborhood oracle") {
  std::mt19937_64 rng(71);
  int improved = 0;
  for (int t = 0; t < 60; ++t) {
    int n = 5 + t % 5;
    auto R = fixtures::random_matrix(rng, n, true);
    Tour T(fixtures::random_order(rng, n));
    Cost tv = tour_value(R, T);
    auto [sig, other] = alternating_matchings(R, T);
    Cost bound = tv - sig.derangement_value();
    int max_len = n / 2 + 2;
    EnumerateOptions opt;
    opt.max_len = max_len;
    auto cat = enumerate_cycles(R, sig, bound, opt);
    auto got = link_search(cat, sig, bound, R);
    auto want = oracle::best_matching_neighbor(R, sig.partners(), tv - 1, bound, max_len);
    REQUIRE(bool(got) == bool(want));
    if (!got) continue;
    ++improved;
    CHECK(got->value == tour_value(R, Tour(*want)));
    CHECK(got->value < tv);
    CHECK(got->points == point_formula(n, got->two_circuit, got->acceptable));
    int pts = 0;
    for (auto& c : got->cycles) pts += static_cast<int>(c.nodes.size());
    CHECK(pts == got->points);
  }
  CHECK(improved > 10);
}

TEST_CASE("single n/2 acceptable cycle links to the half-cycle tour") {
  std::mt19937_64 rng(73);
  auto R = fixtures::random_matrix(rng, 8, true);
  Matching sig(R, {1, 0, 3, 2, 5, 4, 7, 6});
  auto c = random_acceptable(rng, R, sig, 4);
  CycleCatalog cat;
  cat.entries.push_back({c, {}, {}, {}, {c}});
  cat.ceiling = c.value + 1;
  auto r = link_search(cat, sig, c.value + 1, R);
  REQUIRE(r);
  CHECK(r->tour == half_cycle_tour(sig, c));
  CHECK(r->acceptable == 1);
  CHECK(r->two_circuit == 0);
  CHECK(r->points == 4);
}

TEST_CASE("refine on ex6 reaches 102") {
  auto M = fixtures::load("ex6.txt");
  auto tr = descend(M, DescentConfig::defaults(9, true));
  auto ub = patch_to_cycle(M, tr.final_perm);
  auto r = refine(M, ub.tour);
  CHECK(r.value == 102);
  CHECK(r.value == oracle::brute_force_tour(M).value);
  CHECK(tour_value(M, Tour(zb({1, 7, 2, 6, 3, 5, 9, 8, 4}))) == 102);
  for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] < r.history[i - 1]);
  // already optimal: unchanged
  auto again = refine(M, r.tour);
  CHECK(again.history.size() == 1);
  CHECK(again.tour == r.tour);
}

TEST_CASE("ex5 improves on the 68 tour") {
  auto M = fixtures::load("ex5.txt");
  Tour T(zb({11, 17, 12, 10, 6, 18, 13, 3, 1, 7, 4, 8, 16, 14, 19, 15, 20, 9, 2, 5}));
  REQUIRE(tour_value(M, T) == 68);
  RefineConfig one;
  one.max_iterations = 1;
  auto r = refine(M, T, one);
  CHECK(r.value < 68);
  CHECK(r.history.size() == 2);
  auto full = refine(M, T);
  CHECK(full.value <= r.value);
  CHECK(full.value >= oracle::held_karp(M).value);
}

TEST_CASE("exhaustive refine fixpoint equals brute force on small symmetric instances") {
  std::mt19937_64 rng(79);
  RefineConfig cfg;
  cfg.exhaustive = true;
  for (int t = 0; t < 50; ++t) {
    int n = 6 + t % 5;
    auto R = fixtures::random_matrix(rng, n, true);
    auto r = refine(R, Tour(fixtures::random_order(rng, n)), cfg);
    CHECK(r.value == oracle::brute_force_tour(R).value);
  }
}
