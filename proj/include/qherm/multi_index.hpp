#pragma once

#include <string>
#include <vector>

namespace qherm {

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& m);

// Graded-lex: compare |m| first, then components lexicographically with the
// larger leading component first, so (1,0) precedes (0,1).
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

// All multi-indices of length d and total degree <= max_total, graded-lex.
std::vector<MultiIndex> indices_up_to(int d, int max_total);
// All multi-indices of length d and total degree == total, graded-lex.
std::vector<MultiIndex> indices_of_degree(int d, int total);
// The box {0..N-1}^d in graded-lex order.
std::vector<MultiIndex> box_indices(int d, int N);

std::string mi_to_string(const MultiIndex& m, const std::string& sep = "_");

}  // namespace qherm
