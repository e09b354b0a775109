#include "qherm/op_fourier.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace qherm {

namespace {

const cplx I(0, 1);

cplx minus_i_pow(int k) {
  static const cplx p[4] = {1.0, cplx(0, -1), -1.0, cplx(0, 1)};
  return p[k % 4];
}

int degree(const MultiIndex& mu) {
  int s = 0;
  for (int v : mu) s += v;
  return s;
}

double lgam(int k) { return std::lgamma(k + 1.0); }

// (e^{t A})_{k j} on the 1-D block, (A)_{k-1,k} = sqrt(2 k lambda); L is the transpose pattern for A*.
Mat exp_ladder_upper(double lambda, cplx t, int N) {
  Mat U = Mat::Zero(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k <= j; ++k) {
      int l = j - k;
      double mag = std::exp(0.5 * l * std::log(2.0 * lambda) + 0.5 * (lgam(j) - lgam(k)) - lgam(l));
      U(k, j) = (l == 0 ? cplx(1.0) : std::pow(t, l)) * mag;
    }
  return U;
}

Mat g_block_1d(double lambda, cplx z, cplx w, int N) {
  const cplx a = w, b = -z;
  const cplx al = 0.5 * (I * a + b), be = 0.5 * (I * a - b);
  const cplx at = al * (1.0 - std::exp(lambda)), bt = be * (1.0 - std::exp(-lambda));
  Mat U = exp_ladder_upper(lambda, at, N);
  Mat L = exp_ladder_upper(lambda, bt, N).transpose();
  Eigen::VectorXd e(N);
  for (int k = 0; k < N; ++k) e[k] = std::exp(-0.5 * (2 * k + 1) * lambda);
  return std::exp(2.0 * lambda * al * be * (1.0 - std::exp(-lambda))) * (L * U) * e.cast<cplx>().asDiagonal();
}

TruncatedOperator tensor_blocks(const ContextPtr& ctx, std::vector<Mat> f) {
  if (ctx->n == 1) return {ctx, f[0]};
  return {ctx, tensor_by_index(*ctx, f)};
}

cplx square_sum(const FockPoint& p) {
  cplx s = 0.0;
  for (auto v : p.z) s += v * v;
  for (auto v : p.w) s += v * v;
  return s;
}

FockPoint scaled(const FockPoint& p, cplx s) {
  FockPoint q = p;
  for (auto& v : q.z) v *= s;
  for (auto& v : q.w) v *= s;
  return q;
}

TruncatedOperator partial_sum(const QuantumHermiteFamily& fam, const FockPoint& p, int M, bool rotate) {
  if (M > fam.M) throw std::invalid_argument("generating_check: M exceeds the family order");
  TruncatedOperator L = zero_op(fam.ctx);
  std::vector<cplx> zeta = p.flat();
  for (const auto& mu : fam.order) {
    int k = degree(mu);
    if (k > M) continue;
    cplx coef = zeta_mu(mu, zeta) * (rotate ? minus_i_pow(k) : cplx(1.0));
    L.m += coef * fam.at(mu).m;
  }
  return L;
}

GeneratingResult compare(const TruncatedOperator& L, const TruncatedOperator& R, double ratio) {
  GeneratingResult g;
  g.expected_ratio = ratio;
  g.measured_ratio = std::abs(L.m(0, 0) / (R.m(0, 0) / ratio));
  g.residual = (L.m - R.m).norm();
  double ln = L.m.norm();
  g.relative = ln > 0 ? g.residual / ln : g.residual;
  return g;
}

}  // namespace

TruncatedOperator fourier_series(const QuantumHermiteFamily& fam, const TruncatedOperator& T) {
  require_same(*fam.ctx, *T.ctx);
  TruncatedOperator out = zero_op(fam.ctx);
  for (const auto& mu : fam.order) {
    const auto& S = fam.at(mu);
    out.m += minus_i_pow(degree(mu)) * hs_inner(T, S) * S.m;
  }
  return out;
}

double fourier_tail_bound(const QuantumHermiteFamily& fam, const TruncatedOperator& T) {
  Mat proj = Mat::Zero(T.m.rows(), T.m.cols());
  for (const auto& mu : fam.order) proj += hs_inner(T, fam.at(mu)) * fam.at(mu).m;
  return (T.m - proj).norm();
}

FourierReport fourier_report(const QuantumHermiteFamily& fam, const TruncatedOperator& T, const std::string& id) {
  FourierReport r;
  r.input_id = id;
  r.output = zero_op(fam.ctx);
  double coef_mass = 0.0;
  for (const auto& mu : fam.order) {
    cplx c = hs_inner(T, fam.at(mu));
    r.coefficients.emplace_back(mu, c);
    r.output.m += minus_i_pow(degree(mu)) * c * fam.at(mu).m;
    coef_mass += std::norm(c);
  }
  r.residuals["tail_bound"] = fourier_tail_bound(fam, T);
  // coefficients of the output against (-i)^{|mu|} times the input ones
  double rec = 0.0;
  for (const auto& [mu, c] : r.coefficients)
    rec = std::max(rec, std::abs(hs_inner(r.output, fam.at(mu)) - minus_i_pow(degree(mu)) * c));
  r.residuals["reconstruction"] = rec;
  r.residuals["plancherel"] = std::abs(hs_norm(r.output) - std::sqrt(coef_mass));
  return r;
}

nlohmann::json FourierReport::to_json() const {
  nlohmann::json j;
  if (!input_id.empty()) j["input"] = input_id;
  auto arr = nlohmann::json::array();
  for (const auto& [mu, c] : coefficients) arr.push_back({{"mu", mu}, {"re", c.real()}, {"im", c.imag()}});
  j["coefficients"] = arr;
  nlohmann::json res = nlohmann::json::object();
  for (const auto& [k, v] : residuals) res[k] = v;
  j["residuals"] = res;
  return j;
}

double generating_ratio(double lambda, int n) { return std::pow(lambda / (2.0 * kPi), 0.5 * n); }

double r_lambda(double lambda) { return std::sqrt(dilation_c(lambda)) / lambda; }

TruncatedOperator g_operator(const ContextPtr& ctx, const FockPoint& p) {
  std::vector<Mat> f;
  for (int j = 0; j < ctx->n; ++j) f.push_back(g_block_1d(ctx->lambda, p.z[j], p.w[j], ctx->N));
  return tensor_blocks(ctx, f);
}

TruncatedOperator g_operator_product(const ContextPtr& ctx, const FockPoint& p, const QuadratureRule& quad, int pad) {
  const int N = ctx->N, Np = N + pad;
  const double l = ctx->lambda;
  Eigen::VectorXd e(Np);
  for (int k = 0; k < Np; ++k) e[k] = std::exp(-0.5 * (2 * k + 1) * l);
  std::vector<Mat> f;
  for (int j = 0; j < ctx->n; ++j) {
    Mat left = schrodinger_block_1d(l, p.w[j], -p.z[j], N, Np, quad);
    Mat right = schrodinger_block_1d(l, -p.w[j], p.z[j], Np, N, quad);
    f.push_back(left * e.cast<cplx>().asDiagonal() * right);
  }
  return tensor_blocks(ctx, f);
}

TruncatedOperator g_operator_integral(const ContextPtr& ctx, const FockPoint& p, const QuadratureRule& quad) {
  const double l = ctx->lambda;
  auto one = [l](cplx z, cplx w) {
    PhaseFunction h = heat_kernel_function(0.5, l, 1);
    PhaseFunction f = h;
    f.f = [h, l, z, w](std::span<const cplx> xi) {
      return std::exp(-I * l * (xi[0] * z + xi[1] * w)) * h(xi);
    };
    return f;
  };
  PhaseFunction f;
  if (ctx->n == 1) {
    f = one(p.z[0], p.w[0]);
  } else {
    f.n = ctx->n;
    for (int j = 0; j < ctx->n; ++j) f.factors.push_back(one(p.z[j], p.w[j]));
    f.decay = f.factors[0].decay;
    auto fs = f.factors;
    f.f = [fs](std::span<const cplx> xi) {
      cplx a[2] = {xi[0], xi[2]}, b[2] = {xi[1], xi[3]};
      return fs[0](a) * fs[1](b);
    };
  }
  TruncatedOperator W = weyl(ctx, f, quad);
  return (1.0 / generating_ratio(l, ctx->n)) * W;
}

TruncatedOperator g_tilde(const ContextPtr& ctx, const FockPoint& p) {
  DeformationMap d = deformation_map(ctx->lambda, ctx->n);
  return g_operator(ctx, scaled(d.apply(p), r_lambda(ctx->lambda)));
}

double g_tilde_envelope_ratio(const ContextPtr& ctx, const FockPoint& p) {
  const double l = ctx->lambda;
  cplx sq = 0.0;
  double cross = 0.0, n2 = 0.0;
  for (int j = 0; j < ctx->n; ++j) {
    sq += std::conj(p.z[j]) * std::conj(p.z[j]) + std::conj(p.w[j]) * std::conj(p.w[j]);
    cross += p.w[j].real() * p.z[j].imag() - p.w[j].imag() * p.z[j].real();
    n2 += std::norm(p.z[j]) + std::norm(p.w[j]);
  }
  double lhs_log = 0.25 * (l / std::sinh(l)) * sq.real() + std::log(hs_norm(g_tilde(ctx, p)));
  double env_log = -0.5 * l * cross + 0.25 * l / std::tanh(l) * n2;
  return std::exp(lhs_log - env_log);
}

TruncatedOperator generating_rhs(const ContextPtr& ctx, const FockPoint& p) {
  const int n = ctx->n;
  const double l = ctx->lambda;
  cplx pref = generating_ratio(l, n) * std::pow(kPi, -0.5 * n) / std::sqrt(c_n_lambda(n, l)) *
              std::exp(0.25 * square_sum(p));
  return pref * g_operator(ctx, scaled(p, r_lambda(l)));
}

TruncatedOperator pre_rotation_rhs(const ContextPtr& ctx, const FockPoint& p) {
  const int n = ctx->n;
  const double l = ctx->lambda;
  cplx pref = generating_ratio(l, n) * std::pow(kPi, -0.5 * n) / std::sqrt(c_n_lambda(n, l)) *
              std::exp(-0.25 * square_sum(p));
  return pref * g_operator(ctx, scaled(p, I * r_lambda(l)));
}

GeneratingResult generating_check(const QuantumHermiteFamily& fam, const FockPoint& p, int M) {
  return compare(partial_sum(fam, p, M, true), generating_rhs(fam.ctx, p), generating_ratio(fam.ctx->lambda, fam.ctx->n));
}

GeneratingResult pre_rotation_check(const QuantumHermiteFamily& fam, const FockPoint& p, int M) {
  return compare(partial_sum(fam, p, M, false), pre_rotation_rhs(fam.ctx, p),
                 generating_ratio(fam.ctx->lambda, fam.ctx->n));
}

TruncatedOperator fourier_integral(const ContextPtr& ctx, const TruncatedOperator& T, int quad4_order,
                                   const QuadratureRule& quad) {
  require_same(*ctx, *T.ctx);
  if (ctx->n != 1) throw ContextError("fourier_integral: n = 1 only");
  const double l = ctx->lambda;
  DeformationMap d = deformation_map(l, 1);
  FockRule rule = fock_rule(l, 1, quad4_order);
  const double a = a_n_lambda(1, l);
  TruncatedOperator acc = zero_op(ctx);
  double mass = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const FockPoint& p = rule.points[i];
    cplx g = gauss_bargmann(ctx, T, p, quad);
    FockPoint s = d.apply(p);
    FockPoint eta{{std::conj(s.z[0])}, {std::conj(s.w[0])}};
    Mat K = generating_rhs(ctx, eta).m;
    cplx coef = rule.weights[i] * a * g;
    mass += std::abs(coef) * K.norm();
    acc.m += coef * K;
  }
  if (!std::isfinite(mass) || !acc.m.allFinite())
    throw IntegrabilityError("fourier_integral: integrand is not integrable on the rule");
  return acc;
}

double schatten_norm(const TruncatedOperator& T, double p) {
  if (!(p >= 1)) throw std::invalid_argument("schatten_norm: p must be at least 1");
  Eigen::BDCSVD<Mat> svd(T.m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (std::isinf(p)) return s.size() ? s.maxCoeff() : 0.0;
  return std::pow(s.array().pow(p).sum(), 1.0 / p);
}

HardyResult hardy_check(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double C, double tol) {
  const auto& ctx = fam.ctx;
  Eigen::VectorXd e = (-ctx->h_diag.array()).exp();
  Mat base = C * e.cast<cplx>().asDiagonal().toDenseMatrix();
  TruncatedOperator FT = fourier_series(fam, T);
  auto min_eig = [&](const Mat& X) {
    Mat Hm = base - X.adjoint() * X;
    Hm = 0.5 * (Hm + Hm.adjoint());
    return Eigen::SelfAdjointEigenSolver<Mat>(Hm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  };
  HardyResult h;
  h.min_eig_T = min_eig(T.m);
  h.min_eig_FT = min_eig(FT.m);
  h.pass = h.min_eig_T >= -tol && h.min_eig_FT >= -tol;
  return h;
}

cplx u_lambda_apply(const PhaseFunction& f, double lambda, std::span<const double> xi, const QuadratureRule& quad) {
  const int d = 2 * f.n;
  if (static_cast<int>(xi.size()) != d) throw ContextError("u_lambda_apply: dimension mismatch");
  const double c = dilation_c(lambda);
  const double s = 1.0 / std::sqrt(f.decay);
  const int m = quad.order;
  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    x[i] = s * quad.nodes[i];
    w[i] = quad.weights[i] * std::exp(quad.nodes[i] * quad.nodes[i]) * s;
  }
  std::vector<int> idx(d, 0);
  std::vector<cplx> eta(d);
  cplx acc = 0.0;
  while (true) {
    double wt = 1.0, phase = 0.0;
    for (int k = 0; k < d; ++k) {
      eta[k] = x[idx[k]];
      wt *= w[idx[k]];
      phase += c * xi[k] * x[idx[k]];
    }
    acc += wt * f(eta) * std::exp(-I * phase);
    int k = d - 1;
    for (; k >= 0; --k) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
    if (k < 0) break;
  }
  return std::pow(c, f.n) * std::pow(2.0 * kPi, -f.n) * acc;
}

}  // namespace qherm
