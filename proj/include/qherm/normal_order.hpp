#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qherm/hilbert_basis.hpp"
#include "qherm/multi_index.hpp"

namespace qherm {

struct Symbol {
  enum class Kind { Create = 0, Annihilate = 1, Semigroup = 2 };
  Kind kind = Kind::Create;
  int j = 1;       // coordinate, 1-based (unused for Semigroup)
  double t = 0.0;  // exponent of E_t (Semigroup only)

  static Symbol create(int j) { return {Kind::Create, j, 0.0}; }
  static Symbol annihilate(int j) { return {Kind::Annihilate, j, 0.0}; }
  static Symbol semigroup(double t) { return {Kind::Semigroup, 0, t}; }

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.kind == b.kind && a.j == b.j && a.t == b.t;
  }
  friend bool operator<(const Symbol& a, const Symbol& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.j != b.j) return a.j < b.j;
    return a.t < b.t;
  }
};

using Word = std::vector<Symbol>;

struct NOWord {
  Word factors;
  cplx coefficient = 1.0;
  // Exponent of the trailing semigroup symbol when the word is normal (0 = absent).
  double semigroup_exponent() const;
  bool is_normal() const;
};

struct TermOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-commutative polynomial in A_j*, A_j and E_t for a fixed numeric lambda.
class NOPoly {
 public:
  NOPoly() = default;
  NOPoly(double lambda, int n) : lambda_(lambda), n_(n) {}

  static NOPoly scalar(double lambda, int n, cplx c);
  static NOPoly word(double lambda, int n, const Word& w, cplx c = 1.0);

  double lambda() const { return lambda_; }
  int n() const { return n_; }
  const std::map<Word, cplx>& terms() const { return terms_; }

  void add_term(const Word& w, cplx c);
  NOPoly operator+(const NOPoly& o) const;
  NOPoly operator-(const NOPoly& o) const;
  NOPoly operator*(cplx s) const;
  // Concatenation product without rewriting.
  NOPoly concat(const NOPoly& o) const;
  // Normal-ordered product.
  NOPoly operator*(const NOPoly& o) const;

  void prune(double tol = 1e-14);
  std::size_t size() const { return terms_.size(); }
  int total_degree() const;
  bool is_normal() const;

 private:
  void check_compatible(const NOPoly& o) const;
  double lambda_ = 1.0;
  int n_ = 1;
  std::map<Word, cplx> terms_;
};

// Rewrite to creation-left normal form with E_t rightmost. When `rng` is
// given, the next rewrite position is chosen at random.
NOPoly normal_order(const NOPoly& p, std::mt19937* rng = nullptr);

// Moves every E_t to the right end of the word and merges them.
NOWord push_semigroup(const NOWord& w, double lambda);

// D_j (1-based, 1..2n) in its ladder form applied by the Leibniz rule.
NOPoly apply_derivation(int j, const NOPoly& p);
// The derivation d_X (T -> T X - X T) for X = A_k or A_k*.
NOPoly apply_ladder_derivation(const Symbol& X, const NOPoly& p);

// P_mu with S_mu = P_mu(A, A*) e^{-H/2}; mu in N^{2n}. kappa0 <= 0 selects
// the untruncated value (2 sinh lambda)^{n/2}.
NOPoly p_mu(double lambda, int n, const MultiIndex& mu, double kappa0 = -1.0);

TruncatedOperator evaluate(const NOPoly& p, const ContextPtr& ctx);

std::string to_string(const NOPoly& p);
NOPoly parse_nopoly(const std::string& text, double lambda, int n);

// Largest coefficient difference between two term maps (missing terms count as 0).
double term_distance(const NOPoly& a, const NOPoly& b);

}  // namespace qherm
