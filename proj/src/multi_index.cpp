#include "qherm/multi_index.hpp"

#include <algorithm>
#include <numeric>

namespace qherm {

int total_degree(const MultiIndex& m) { return std::accumulate(m.begin(), m.end(), 0); }

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

namespace {

void compositions(int d, int total, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur[pos] = total;
    out.push_back(cur);
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur[pos] = v;
    compositions(d, total - v, cur, pos + 1, out);
  }
}

}  // namespace

std::vector<MultiIndex> indices_of_degree(int d, int total) {
  std::vector<MultiIndex> out;
  if (d <= 0 || total < 0) return out;
  MultiIndex cur(d, 0);
  compositions(d, total, cur, 0, out);
  return out;
}

std::vector<MultiIndex> indices_up_to(int d, int max_total) {
  std::vector<MultiIndex> out;
  for (int t = 0; t <= max_total; ++t) {
    auto level = indices_of_degree(d, t);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::vector<MultiIndex> box_indices(int d, int N) {
  std::vector<MultiIndex> out;
  for (int t = 0; t <= d * (N - 1); ++t)
    for (auto& m : indices_of_degree(d, t))
      if (std::all_of(m.begin(), m.end(), [N](int v) { return v < N; })) out.push_back(m);
  return out;
}

std::string mi_to_string(const MultiIndex& m, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(m[i]);
  }
  return s;
}

}  // namespace qherm
