#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "qherm/multi_index.hpp"
#include "qherm/special_functions.hpp"

namespace qherm {

using Mat = Eigen::MatrixXcd;

struct ContextError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BasisContext {
  double lambda = 1.0;
  int n = 1;
  int N = 8;
  int interior_margin = 2;
  int dim = 0;
  std::vector<MultiIndex> index;    // position -> alpha (graded-lex)
  std::map<MultiIndex, int> where;  // alpha -> position
  Eigen::VectorXd h_diag;           // (2|alpha| + n) lambda
  std::vector<Mat> Q, P, A, Astar;  // one per coordinate j = 0..n-1
  Mat H;

  bool same_as(const BasisContext& o) const {
    return lambda == o.lambda && n == o.n && N == o.N;
  }
};

using ContextPtr = std::shared_ptr<const BasisContext>;

struct TruncatedOperator {
  ContextPtr ctx;
  Mat m;

  TruncatedOperator() = default;
  TruncatedOperator(ContextPtr c, Mat mat);

  TruncatedOperator operator+(const TruncatedOperator& o) const;
  TruncatedOperator operator-(const TruncatedOperator& o) const;
  TruncatedOperator operator*(const TruncatedOperator& o) const;
  TruncatedOperator operator*(cplx s) const;
  TruncatedOperator adjoint() const;
};
TruncatedOperator operator*(cplx s, const TruncatedOperator& t);

void require_same(const BasisContext& a, const BasisContext& b);

ContextPtr build_context(double lambda, int n, int N, int interior_margin = 2);

TruncatedOperator identity_op(const ContextPtr& ctx);
TruncatedOperator zero_op(const ContextPtr& ctx);
TruncatedOperator heat_semigroup(const ContextPtr& ctx, double t);

// d_X(T) = T X - X T.
TruncatedOperator derivation(const TruncatedOperator& T, const TruncatedOperator& X);
Mat derivation(const Mat& T, const Mat& X);

// X_j with D_j T = T X_j - X_j T; j is 1-based in 1..2n.
Mat d_generator(const BasisContext& ctx, int j);
TruncatedOperator d_operator(const ContextPtr& ctx, int j, const TruncatedOperator& T);
// Same derivation written through d_{A_j} and d_{A_j*}.
TruncatedOperator d_operator_ladder(const ContextPtr& ctx, int j, const TruncatedOperator& T);

// (S, T) = tr(S T^dagger), linear in the first argument.
cplx hs_inner(const TruncatedOperator& S, const TruncatedOperator& T);
double hs_norm(const TruncatedOperator& T);

// Positions whose multi-index has every component <= N - 1 - margin.
std::vector<int> interior_positions(const BasisContext& ctx, int margin);
Mat interior_block(const BasisContext& ctx, const Mat& M, int margin);
double interior_max_abs(const BasisContext& ctx, const Mat& M, int margin);
double interior_hs(const BasisContext& ctx, const Mat& M, int margin);

// Assemble an operator on L^2(R^n) from per-coordinate 1-D matrices:
// entry (beta, alpha) = prod_j F_j(beta_j, alpha_j).
Mat tensor_by_index(const BasisContext& ctx, const std::vector<Mat>& factors);

nlohmann::json operator_to_json(const TruncatedOperator& T);
TruncatedOperator operator_from_json(const nlohmann::json& j, const ContextPtr& ctx);

}  // namespace qherm
