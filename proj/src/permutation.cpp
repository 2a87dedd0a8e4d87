#include "gtsp/permutation.hpp"

#include <algorithm>
#include <stdexcept>

namespace gtsp {

Permutation::Permutation(std::vector<int> images) : img_(std::move(images)) {
  const int n = size();
  std::vector<char> hit(n, 0);
  for (int v : img_) {
    if (v < 0 || v >= n || hit[v]) throw std::invalid_argument("not a permutation");
    hit[v] = 1;
  }
  std::vector<char> seen(n, 0);
  for (int a = 0; a < n; ++a) {
    if (seen[a] || img_[a] == a) continue;
    std::vector<int> c;
    for (int v = a; !seen[v]; v = img_[v]) {
      seen[v] = 1;
      c.push_back(v);
    }
    cycles_.push_back(std::move(c));
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> img(n);
  for (int a = 0; a < n; ++a) img[a] = a;
  return Permutation(std::move(img));
}

Permutation Permutation::shift(int n) {
  std::vector<int> img(n);
  for (int a = 0; a < n; ++a) img[a] = (a + 1) % n;
  return Permutation(std::move(img));
}

Permutation Permutation::from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
  std::vector<int> img(n);
  for (int a = 0; a < n; ++a) img[a] = a;
  std::vector<char> used(n, 0);
  for (const auto& c : cycles) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const int v = c[i];
      if (v < 0 || v >= n || used[v]) throw std::invalid_argument("cycles overlap or leave the ground set");
      used[v] = 1;
      img[v] = c[(i + 1) % c.size()];
    }
  }
  return Permutation(std::move(img));
}

Permutation Permutation::from_tour(const Tour& t) { return Permutation(t.successors()); }

Permutation Permutation::inverse() const {
  std::vector<int> inv(img_.size());
  for (int a = 0; a < size(); ++a) inv[img_[a]] = a;
  return Permutation(std::move(inv));
}

bool Permutation::is_derangement() const {
  for (int a = 0; a < size(); ++a)
    if (img_[a] == a) return false;
  return true;
}

bool Permutation::is_involution() const {
  for (int a = 0; a < size(); ++a)
    if (img_[img_[a]] != a) return false;
  return true;
}

std::string Permutation::to_string() const {
  if (cycles_.empty()) return "()";
  std::string s;
  for (const auto& c : cycles_) {
    s += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(c[i] + 1);
    }
    s += ')';
  }
  return s;
}

Permutation compose(const Permutation& D, const Permutation& s) {
  if (D.size() != s.size()) throw std::invalid_argument("compose: size mismatch");
  std::vector<int> img(D.size());
  for (int a = 0; a < D.size(); ++a) img[a] = D(s(a));
  return Permutation(std::move(img));
}

Permutation cycle_permutation(int n, const std::vector<int>& nodes) { return Permutation::from_cycles(n, {nodes}); }

Cost perm_value(const CostMatrix& M, const Permutation& p) {
  if (p.size() != M.size()) throw std::invalid_argument("perm_value: size mismatch");
  Cost v = 0;
  for (int a = 0; a < p.size(); ++a)
    if (p(a) != a) v += M.at(a, p(a));
  return v;
}

TransformMatrix::TransformMatrix(const CostMatrix& M, Permutation D, std::optional<int> apm_fixed)
    : M_(&M), D_(std::move(D)), fixed_(apm_fixed), shift_(D_.size(), 0) {
  if (D_.size() != M.size()) throw std::invalid_argument("transform: size mismatch");
  for (int a = 0; a < D_.size(); ++a) {
    if (D_(a) == a) {
      if (!fixed_ || *fixed_ != a)
        throw std::invalid_argument("transform: unexpected fixed point " + std::to_string(a + 1));
      continue;
    }
    shift_[a] = M(a, D_(a));
  }
  if (fixed_ && D_(*fixed_) != *fixed_) throw std::invalid_argument("transform: declared fixed point is moved");
}

std::string WeightedCycle::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(nodes[i] + 1);
  }
  return s + ")";
}

Cost cycle_value(const TransformMatrix& TM, const std::vector<int>& nodes) {
  std::vector<char> seen(TM.size(), 0);
  for (int v : nodes) {
    if (v < 0 || v >= TM.size() || seen[v]) throw std::invalid_argument("cycle nodes must be distinct vertices");
    seen[v] = 1;
  }
  Cost v = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Cost e = TM.entry(nodes[i], nodes[(i + 1) % nodes.size()]);
    if (e == kUnavailable) throw std::invalid_argument("cycle traverses an unavailable entry");
    v += e;
  }
  return v;
}

WeightedCycle make_cycle(const TransformMatrix& TM, std::vector<int> nodes) {
  const Cost v = cycle_value(TM, nodes);
  return {std::move(nodes), v, CycleKind::unclassified};
}

std::vector<int> canonical_rotation(const std::vector<int>& nodes) {
  if (nodes.empty()) return nodes;
  auto it = std::min_element(nodes.begin(), nodes.end());
  std::vector<int> out(it, nodes.end());
  out.insert(out.end(), nodes.begin(), it);
  return out;
}

std::size_t determining_vertex(const std::vector<Cost>& w, Cost bound) {
  const std::size_t r = w.size();
  for (std::size_t i = 0; i < r; ++i) {
    Cost s = 0;
    bool ok = true;
    for (std::size_t k = 0; k < r && ok; ++k) {
      s += w[(i + k) % r];
      ok = s <= bound;
    }
    if (ok) return i;
  }
  throw InvariantError("no determining vertex: cycle total exceeds the bound or the bound is unreachable");
}

std::size_t aav_determining_node(const std::vector<Cost>& w) {
  if (w.empty()) throw std::invalid_argument("aav_determining_node: empty cycle");
  // prefix/k <= total/r  <=>  sum(r*w_i - total) <= 0
  const auto r = static_cast<Cost>(w.size());
  Cost total = 0;
  for (Cost x : w) total += x;
  std::vector<Cost> shifted(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) shifted[i] = r * w[i] - total;
  return determining_vertex(shifted, 0);
}

std::string Aav::str(int decimals) const {
  if (arcs <= 0) throw std::invalid_argument("aav with no arcs");
  __int128 scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const bool neg = value < 0;
  const __int128 num = static_cast<__int128>(neg ? -value : value) * scale;
  __int128 q = num / arcs;
  if ((num % arcs) * 2 >= arcs) ++q;
  const auto whole = static_cast<long long>(q / scale);
  auto frac = static_cast<long long>(q % scale);
  std::string f = std::to_string(frac);
  if (static_cast<int>(f.size()) < decimals) f.insert(0, decimals - f.size(), '0');
  std::string s = (neg && q != 0 ? "-" : "") + std::to_string(whole);
  if (decimals > 0) s += "." + f;
  return s;
}

}  // namespace gtsp
