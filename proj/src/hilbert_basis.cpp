#include "qherm/hilbert_basis.hpp"

#include <algorithm>
#include <cmath>

namespace qherm {

TruncatedOperator::TruncatedOperator(ContextPtr c, Mat mat) : ctx(std::move(c)), m(std::move(mat)) {
  if (!ctx) throw ContextError("TruncatedOperator: null context");
  if (m.rows() != ctx->dim || m.cols() != ctx->dim)
    throw ContextError("TruncatedOperator: matrix dimension does not match context");
}

void require_same(const BasisContext& a, const BasisContext& b) {
  if (!a.same_as(b)) throw ContextError("context mismatch");
}

TruncatedOperator TruncatedOperator::operator+(const TruncatedOperator& o) const {
  require_same(*ctx, *o.ctx);
  return {ctx, m + o.m};
}
TruncatedOperator TruncatedOperator::operator-(const TruncatedOperator& o) const {
  require_same(*ctx, *o.ctx);
  return {ctx, m - o.m};
}
TruncatedOperator TruncatedOperator::operator*(const TruncatedOperator& o) const {
  require_same(*ctx, *o.ctx);
  return {ctx, m * o.m};
}
TruncatedOperator TruncatedOperator::operator*(cplx s) const { return {ctx, s * m}; }
TruncatedOperator TruncatedOperator::adjoint() const { return {ctx, m.adjoint()}; }
TruncatedOperator operator*(cplx s, const TruncatedOperator& t) { return t * s; }

ContextPtr build_context(double lambda, int n, int N, int interior_margin) {
  if (!(lambda > 0)) throw ContextError("build_context: lambda must be positive (use |lambda|)");
  if (n != 1 && n != 2) throw ContextError("build_context: n must be 1 or 2");
  if (N < 8) throw ContextError("build_context: N must be at least 8");
  if (interior_margin < 0) throw ContextError("build_context: negative interior margin");

  auto c = std::make_shared<BasisContext>();
  c->lambda = lambda;
  c->n = n;
  c->N = N;
  c->interior_margin = interior_margin;
  c->index = box_indices(n, N);
  c->dim = static_cast<int>(c->index.size());
  for (int p = 0; p < c->dim; ++p) c->where[c->index[p]] = p;

  c->h_diag.resize(c->dim);
  for (int p = 0; p < c->dim; ++p) c->h_diag(p) = (2.0 * total_degree(c->index[p]) + n) * lambda;
  c->H = c->h_diag.cast<cplx>().asDiagonal();

  for (int j = 0; j < n; ++j) {
    Mat A = Mat::Zero(c->dim, c->dim);
    for (int p = 0; p < c->dim; ++p) {
      const auto& a = c->index[p];
      if (a[j] == 0) continue;
      MultiIndex lo = a;
      --lo[j];
      A(c->where.at(lo), p) = std::sqrt(2.0 * a[j] * lambda);
    }
    Mat As = A.adjoint();
    c->A.push_back(A);
    c->Astar.push_back(As);
    c->Q.push_back((A + As) / (2.0 * lambda));
    c->P.push_back((A - As) / 2.0);
  }
  return c;
}

TruncatedOperator identity_op(const ContextPtr& ctx) { return {ctx, Mat::Identity(ctx->dim, ctx->dim)}; }
TruncatedOperator zero_op(const ContextPtr& ctx) { return {ctx, Mat::Zero(ctx->dim, ctx->dim)}; }

TruncatedOperator heat_semigroup(const ContextPtr& ctx, double t) {
  if (!(t > 0)) throw std::invalid_argument("heat_semigroup: t must be positive");
  Eigen::VectorXcd d = (-t * ctx->h_diag.array()).exp().cast<cplx>();
  return {ctx, d.asDiagonal()};
}

Mat derivation(const Mat& T, const Mat& X) { return T * X - X * T; }

TruncatedOperator derivation(const TruncatedOperator& T, const TruncatedOperator& X) {
  require_same(*T.ctx, *X.ctx);
  return {T.ctx, derivation(T.m, X.m)};
}

Mat d_generator(const BasisContext& ctx, int j) {
  if (j < 1 || j > 2 * ctx.n) throw std::out_of_range("d_operator: index out of range");
  double l = ctx.lambda, c = std::cosh(l / 2), s = std::sinh(l / 2);
  const cplx I(0, 1);
  if (j <= ctx.n) {
    int k = j - 1;
    return I * (c * ctx.P[k] - l * s * ctx.Q[k]);
  }
  int k = j - 1 - ctx.n;
  return l * c * ctx.Q[k] - s * ctx.P[k];
}

TruncatedOperator d_operator(const ContextPtr& ctx, int j, const TruncatedOperator& T) {
  require_same(*ctx, *T.ctx);
  return {ctx, derivation(T.m, d_generator(*ctx, j))};
}

TruncatedOperator d_operator_ladder(const ContextPtr& ctx, int j, const TruncatedOperator& T) {
  require_same(*ctx, *T.ctx);
  if (j < 1 || j > 2 * ctx->n) throw std::out_of_range("d_operator: index out of range");
  double l = ctx->lambda;
  double ep = std::exp(l / 2), em = std::exp(-l / 2);
  const cplx I(0, 1);
  int k = (j <= ctx->n) ? j - 1 : j - 1 - ctx->n;
  Mat dA = derivation(T.m, ctx->A[k]);
  Mat dAs = derivation(T.m, ctx->Astar[k]);
  if (j <= ctx->n) return {ctx, (I / 2.0) * (em * dA - ep * dAs)};
  return {ctx, 0.5 * (ep * dAs + em * dA)};
}

cplx hs_inner(const TruncatedOperator& S, const TruncatedOperator& T) {
  require_same(*S.ctx, *T.ctx);
  return (S.m.array() * T.m.array().conjugate()).sum();
}

double hs_norm(const TruncatedOperator& T) { return T.m.norm(); }

std::vector<int> interior_positions(const BasisContext& ctx, int margin) {
  std::vector<int> out;
  for (int p = 0; p < ctx.dim; ++p) {
    const auto& a = ctx.index[p];
    if (std::all_of(a.begin(), a.end(), [&](int v) { return v <= ctx.N - 1 - margin; })) out.push_back(p);
  }
  return out;
}

Mat interior_block(const BasisContext& ctx, const Mat& M, int margin) {
  auto ip = interior_positions(ctx, margin);
  Mat B(ip.size(), ip.size());
  for (std::size_t r = 0; r < ip.size(); ++r)
    for (std::size_t c = 0; c < ip.size(); ++c) B(r, c) = M(ip[r], ip[c]);
  return B;
}

double interior_max_abs(const BasisContext& ctx, const Mat& M, int margin) {
  Mat B = interior_block(ctx, M, margin);
  return B.size() ? B.cwiseAbs().maxCoeff() : 0.0;
}

double interior_hs(const BasisContext& ctx, const Mat& M, int margin) {
  return interior_block(ctx, M, margin).norm();
}

Mat tensor_by_index(const BasisContext& ctx, const std::vector<Mat>& factors) {
  if (static_cast<int>(factors.size()) != ctx.n) throw ContextError("tensor_by_index: need one factor per coordinate");
  Mat M(ctx.dim, ctx.dim);
  for (int r = 0; r < ctx.dim; ++r)
    for (int c = 0; c < ctx.dim; ++c) {
      cplx v = 1.0;
      for (int j = 0; j < ctx.n; ++j) v *= factors[j](ctx.index[r][j], ctx.index[c][j]);
      M(r, c) = v;
    }
  return M;
}

nlohmann::json operator_to_json(const TruncatedOperator& T) {
  nlohmann::json j;
  j["n"] = T.ctx->n;
  j["N"] = T.ctx->N;
  j["lambda"] = T.ctx->lambda;
  j["order"] = "graded-lex";
  auto re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int r = 0; r < T.m.rows(); ++r) {
    auto rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (int c = 0; c < T.m.cols(); ++c) {
      rr.push_back(T.m(r, c).real());
      ri.push_back(T.m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

TruncatedOperator operator_from_json(const nlohmann::json& j, const ContextPtr& ctx) {
  if (j.at("n").get<int>() != ctx->n || j.at("N").get<int>() != ctx->N)
    throw ContextError("operator JSON dimension does not match context");
  if (j.contains("lambda") && std::abs(j.at("lambda").get<double>() - ctx->lambda) > 1e-12 * ctx->lambda)
    throw ContextError("operator JSON lambda does not match context");
  if (j.contains("order") && j.at("order") != "graded-lex") throw ContextError("unsupported index order");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<int>(re.size()) != ctx->dim || static_cast<int>(im.size()) != ctx->dim)
    throw ContextError("operator JSON row count does not match context");
  Mat M(ctx->dim, ctx->dim);
  for (int r = 0; r < ctx->dim; ++r) {
    if (static_cast<int>(re[r].size()) != ctx->dim || static_cast<int>(im[r].size()) != ctx->dim)
      throw ContextError("operator JSON column count does not match context");
    for (int c = 0; c < ctx->dim; ++c) M(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
  }
  return {ctx, M};
}

}  // namespace qherm
