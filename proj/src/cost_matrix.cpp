#include "gtsp/cost_matrix.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gtsp {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view tok, long long& v) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  return ec == std::errc() && p == tok.data() + tok.size();
}

bool data_symmetric(int n, const std::vector<Cost>& c) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (c[i * n + j] != c[j * n + i]) return false;
  return true;
}

}  // namespace

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<Cost>>& rows, std::optional<bool> symmetric) {
  const int n = static_cast<int>(rows.size());
  if (n < 3) throw ParseError(ParseErrorKind::too_small, "instance needs n >= 3, got " + std::to_string(n));
  std::vector<Cost> c(static_cast<std::size_t>(n) * n, kUnavailable);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw ParseError(ParseErrorKind::non_square, "row " + std::to_string(i + 1) + " has " +
                                                       std::to_string(rows[i].size()) + " entries, expected " +
                                                       std::to_string(n));
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rows[i][j] < 0)
        throw ParseError(ParseErrorKind::negative_entry,
                         "negative entry at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      c[i * n + j] = rows[i][j];
    }
  }
  const bool sym = data_symmetric(n, c);
  if (symmetric.value_or(false) && !sym)
    throw ParseError(ParseErrorKind::asymmetric_data, "instance declared symmetric but data is not");
  return CostMatrix(n, std::move(c), symmetric.value_or(sym));
}

Cost CostMatrix::at(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("vertex out of range");
  if (i == j) throw InvariantError("diagonal entry used in a value sum");
  return (*this)(i, j);
}

CostMatrix load_matrix(std::string_view text) {
  std::optional<int> n;
  std::optional<bool> sym;
  std::vector<std::vector<Cost>> rows;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    if (!n) {
      long long v = 0;
      if (toks.size() != 2 || toks[0] != "n" || !parse_int(toks[1], v))
        throw ParseError(ParseErrorKind::bad_dimension, "line " + std::to_string(lineno) + ": expected 'n <count>'");
      if (v < 3) throw ParseError(ParseErrorKind::too_small, "instance needs n >= 3, got " + std::to_string(v));
      if (v > 4096) throw ParseError(ParseErrorKind::bad_dimension, "dimension too large");
      n = static_cast<int>(v);
      continue;
    }
    if (rows.empty() && toks.size() == 1 && (toks[0] == "asymmetric" || toks[0] == "symmetric")) {
      sym = toks[0] == "symmetric";
      continue;
    }
    const int i = static_cast<int>(rows.size());
    if (i >= *n) throw ParseError(ParseErrorKind::non_square, "more than n data rows");
    if (static_cast<int>(toks.size()) != *n)
      throw ParseError(ParseErrorKind::non_square, "row " + std::to_string(i + 1) + " has " +
                                                       std::to_string(toks.size()) + " fields, expected " +
                                                       std::to_string(*n));
    std::vector<Cost> row(*n, 0);
    for (int j = 0; j < *n; ++j) {
      if (toks[j] == "INF") {
        if (i != j)
          throw ParseError(ParseErrorKind::bad_token,
                           "INF off the diagonal at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        continue;
      }
      long long v = 0;
      if (!parse_int(toks[j], v))
        throw ParseError(ParseErrorKind::bad_token, "bad field '" + std::string(toks[j]) + "' in row " +
                                                        std::to_string(i + 1));
      if (v < 0 && i != j)
        throw ParseError(ParseErrorKind::negative_entry,
                         "negative entry at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (!n) throw ParseError(ParseErrorKind::bad_dimension, "missing 'n <count>' line");
  if (static_cast<int>(rows.size()) != *n)
    throw ParseError(ParseErrorKind::non_square,
                     "expected " + std::to_string(*n) + " data rows, got " + std::to_string(rows.size()));
  return CostMatrix::from_rows(rows, sym);
}

CostMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_matrix(ss.str());
}

std::string to_text(const CostMatrix& M) {
  std::ostringstream os;
  const int n = M.size();
  os << "n " << n << '\n';
  if (!M.symmetric()) os << "asymmetric\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) os << ' ';
      if (i == j)
        os << "INF";
      else
        os << M(i, j);
    }
    os << '\n';
  }
  return os.str();
}

SortedNeighbors::SortedNeighbors(const CostMatrix& M) : rows_(M.size()) {
  const int n = M.size();
  for (int i = 0; i < n; ++i) {
    auto& r = rows_[i];
    for (int j = 0; j < n; ++j)
      if (j != i) r.push_back(j);
    std::stable_sort(r.begin(), r.end(), [&](int a, int b) { return M(i, a) < M(i, b); });
  }
}

ReducedMatrix row_reduce(const CostMatrix& M) {
  const int n = M.size();
  std::vector<std::vector<Cost>> rows(n, std::vector<Cost>(n, 0));
  Cost total = 0;
  for (int i = 0; i < n; ++i) {
    Cost lo = std::numeric_limits<Cost>::max();
    for (int j = 0; j < n; ++j)
      if (j != i) lo = std::min(lo, M(i, j));
    total += lo;
    for (int j = 0; j < n; ++j)
      if (j != i) rows[i][j] = M(i, j) - lo;
  }
  return {CostMatrix::from_rows(rows), total};
}

Tour::Tour(std::vector<int> order) : order_(std::move(order)) {
  const int n = static_cast<int>(order_.size());
  if (n < 1) throw std::invalid_argument("empty tour");
  std::vector<char> seen(n, 0);
  for (int v : order_) {
    if (v < 0 || v >= n) throw std::invalid_argument("tour vertex out of range: " + std::to_string(v + 1));
    if (seen[v]) throw std::invalid_argument("tour repeats vertex " + std::to_string(v + 1));
    seen[v] = 1;
  }
}

Tour Tour::from_successors(const std::vector<int>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> order;
  order.reserve(n);
  int v = 0;
  for (int k = 0; k < n; ++k) {
    order.push_back(v);
    if (succ[v] < 0 || succ[v] >= n) throw std::invalid_argument("successor out of range");
    v = succ[v];
  }
  if (v != 0) throw std::invalid_argument("successor map is not a single n-cycle");
  return Tour(std::move(order));  // constructor rejects repeats
}

std::vector<int> Tour::successors() const {
  std::vector<int> s(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) s[order_[k]] = order_[(k + 1) % order_.size()];
  return s;
}

Tour Tour::canonical() const {
  auto it = std::find(order_.begin(), order_.end(), 0);
  std::vector<int> o(it, order_.end());
  o.insert(o.end(), order_.begin(), it);
  return Tour(std::move(o));
}

std::string Tour::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(order_[k] + 1);
  }
  return s;
}

Cost tour_value(const CostMatrix& M, const Tour& t) {
  if (t.size() != M.size()) throw std::invalid_argument("tour size does not match instance");
  Cost v = 0;
  const auto& o = t.order();
  for (std::size_t k = 0; k < o.size(); ++k) v += M.at(o[k], o[(k + 1) % o.size()]);
  return v;
}

}  // namespace gtsp
