#include "qherm/weyl_transform.hpp"

#include <cmath>

namespace qherm {

namespace {

cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

// 1-D nodes/weights for int g(s) ds where g ~ exp(-rate s^2) (Gauss-Hermite)
// or g supported on [-L, L] (Gauss-Legendre).
struct Nodes1D {
  std::vector<double> x, w;
  int edge_lo = 0, edge_hi = 0;
};

Nodes1D gaussian_nodes(const QuadratureRule& q, double rate, double center = 0.0) {
  Nodes1D r;
  double s = 1.0 / std::sqrt(rate);
  for (int i = 0; i < q.order; ++i) {
    r.x.push_back(center + s * q.nodes[i]);
    r.w.push_back(q.weights[i] * std::exp(q.nodes[i] * q.nodes[i]) * s);
  }
  r.edge_hi = q.order - 1;
  return r;
}

Nodes1D interval_nodes(const QuadratureRule& gl, double L) {
  Nodes1D r;
  for (int i = 0; i < gl.order; ++i) {
    r.x.push_back(L * gl.nodes[i]);
    r.w.push_back(L * gl.weights[i]);
  }
  r.edge_hi = gl.order - 1;
  return r;
}

void tail_test(double tail, double total, const char* where) {
  if (!(total > 0)) return;
  if (tail > 1e-8 * total)
    throw DecayError(std::string(where) + ": integrand does not decay at the outermost quadrature nodes");
}

Mat weyl_raw_1d(double lambda, const PhaseFunction& f, const QuadratureRule& quad, int N) {
  const double r = f.decay;
  if (!(r > 0)) throw std::invalid_argument("weyl: decay rate must be positive");
  Nodes1D X = f.x_half_width ? interval_nodes(gauss_legendre_rule(quad.order), *f.x_half_width)
                             : gaussian_nodes(quad, r);
  Nodes1D U = gaussian_nodes(quad, r + lambda / 4.0);
  Nodes1D V = gaussian_nodes(quad, f.x_half_width ? lambda : lambda + lambda * lambda / (4.0 * r));
  const int mx = static_cast<int>(X.x.size()), mu = static_cast<int>(U.x.size()), mv = static_cast<int>(V.x.size());

  // fw(k, i) = w_x(i) f(x_i, u_k)
  Mat fw(mu, mx);
  double tail = 0.0, total = 0.0;
  for (int k = 0; k < mu; ++k)
    for (int i = 0; i < mx; ++i) {
      cplx pt[2] = {X.x[i], U.x[k]};
      cplx v = f(std::span<const cplx>(pt, 2));
      fw(k, i) = X.w[i] * v;
      double a = std::abs(fw(k, i)) * U.w[k];
      total += a;
      bool edge = (k == U.edge_lo || k == U.edge_hi) ||
                  (!f.x_half_width && (i == X.edge_lo || i == X.edge_hi));
      if (edge) tail += a;
    }
  tail_test(tail, total, "weyl");

  Mat ph(mx, mv);
  for (int i = 0; i < mx; ++i)
    for (int l = 0; l < mv; ++l) ph(i, l) = std::exp(cplx(0, lambda * X.x[i] * V.x[l]));
  Mat F = fw * ph;  // F(k, l) = int f(x, u_k) e^{i lambda x v_l} dx

  const int K = mu * mv;
  Eigen::MatrixXd P1(K, N), P2(K, N);
  Eigen::VectorXcd c(K);
  const double sl = std::sqrt(lambda), pre = std::pow(lambda, 0.25);
  for (int k = 0; k < mu; ++k)
    for (int l = 0; l < mv; ++l) {
      int row = k * mv + l;
      auto h1 = hermite_all(N - 1, sl * (V.x[l] - 0.5 * U.x[k]));
      auto h2 = hermite_all(N - 1, sl * (V.x[l] + 0.5 * U.x[k]));
      for (int a = 0; a < N; ++a) {
        P1(row, a) = pre * h1[a];
        P2(row, a) = pre * h2[a];
      }
      c(row) = U.w[k] * V.w[l] * F(k, l);
    }
  Mat left = P1.transpose().cast<cplx>() * c.asDiagonal();
  return left * P2.cast<cplx>();
}

}  // namespace

cplx PhaseFunction::at_real(std::span<const double> xi) const {
  std::vector<cplx> z(xi.begin(), xi.end());
  return f(std::span<const cplx>(z));
}

PhaseFunction scale(cplx s, const PhaseFunction& f) {
  PhaseFunction g = f;
  auto inner = f.f;
  g.f = [inner, s](std::span<const cplx> xi) { return s * inner(xi); };
  if (!g.factors.empty()) g.factors[0] = scale(s, f.factors[0]);
  return g;
}

PhaseFunction add(const PhaseFunction& f, const PhaseFunction& g) {
  if (f.n != g.n) throw ContextError("add: dimension mismatch");
  PhaseFunction h;
  h.n = f.n;
  auto a = f.f, b = g.f;
  h.f = [a, b](std::span<const cplx> xi) { return a(xi) + b(xi); };
  h.decay = std::min(f.decay, g.decay);
  if (f.x_half_width.has_value() != g.x_half_width.has_value())
    throw std::invalid_argument("add: cannot mix compactly supported and Gaussian inputs");
  if (f.x_half_width) h.x_half_width = std::max(*f.x_half_width, *g.x_half_width);
  return h;
}

PhaseFunction heat_kernel_function(double t, double lambda, int n) {
  PhaseFunction p;
  p.n = n;
  p.decay = 0.25 * lambda / std::tanh(t * lambda);
  p.f = [t, lambda](std::span<const cplx> xi) { return heat_kernel_twisted(t, lambda, xi); };
  if (n == 2) {
    PhaseFunction one = heat_kernel_function(t, lambda, 1);
    p.factors = {one, one};
  }
  return p;
}

cplx symplectic(std::span<const cplx> xi, std::span<const cplx> eta) {
  const std::size_t n = xi.size() / 2;
  cplx s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += xi[n + j] * eta[j] - eta[n + j] * xi[j];
  return s;
}

Mat schrodinger_block_1d(double lambda, cplx a, cplx b, int rows, int cols, const QuadratureRule& quad) {
  const double sl = std::sqrt(lambda);
  const cplx cb = sl * b, ka = sl * a;
  const cplx y0 = 0.5 * (-cb + cplx(0, 1) * ka);
  const cplx e0 = y0 * y0 - 0.5 * cb * cb + cplx(0, 1) * lambda * a * b * 0.5;
  Mat Ga(quad.order, cols), Gb(quad.order, rows);
  for (int i = 0; i < quad.order; ++i) {
    auto ga = hermite_poly_parts(cols - 1, quad.nodes[i] + y0 + cb);
    auto gb = hermite_poly_parts(rows - 1, quad.nodes[i] + y0);
    for (int c = 0; c < cols; ++c) Ga(i, c) = ga[c];
    for (int r = 0; r < rows; ++r) Gb(i, r) = quad.weights[i] * gb[r];
  }
  return std::exp(e0) * (Gb.transpose() * Ga);
}

Mat schrodinger_block_1d_closed(double lambda, cplx a, cplx b, int rows, int cols) {
  const cplx I(0, 1);
  const cplx al = 0.5 * (I * a + b), be = 0.5 * (I * a - b);
  const int K = std::min(rows, cols);
  auto coef = [&](cplx z, int hi, int lo) {
    int l = hi - lo;
    double mag = 0.5 * l * std::log(2.0 * lambda) + 0.5 * (std::lgamma(hi + 1.0) - std::lgamma(lo + 1.0)) -
                 std::lgamma(l + 1.0);
    return ipow(z, l) * std::exp(mag);
  };
  Mat L = Mat::Zero(rows, K), U = Mat::Zero(K, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k <= std::min(i, K - 1); ++k) L(i, k) = coef(be, i, k);
  for (int j = 0; j < cols; ++j)
    for (int k = 0; k <= std::min(j, K - 1); ++k) U(k, j) = coef(al, j, k);
  return std::exp(lambda * al * be) * (L * U);
}

TruncatedOperator schrodinger_matrix(const ContextPtr& ctx, const PhasePoint& p, const QuadratureRule& quad) {
  if (quad.order < 2 * ctx->N) throw QuadratureError("schrodinger_matrix: quadrature order must be at least 2N");
  if (static_cast<int>(p.a.size()) != ctx->n || static_cast<int>(p.b.size()) != ctx->n)
    throw ContextError("schrodinger_matrix: phase point dimension mismatch");
  std::vector<Mat> f;
  for (int j = 0; j < ctx->n; ++j) f.push_back(schrodinger_block_1d(ctx->lambda, p.a[j], p.b[j], ctx->N, ctx->N, quad));
  if (ctx->n == 1) return {ctx, f[0]};
  return {ctx, tensor_by_index(*ctx, f)};
}

TruncatedOperator weyl(const ContextPtr& ctx, const PhaseFunction& f, const QuadratureRule& quad) {
  if (f.n != ctx->n) throw ContextError("weyl: function dimension does not match context");
  const double rho1 = std::sqrt(ctx->lambda / (2.0 * kPi));
  if (ctx->n == 1) return {ctx, rho1 * weyl_raw_1d(ctx->lambda, f, quad, ctx->N)};
  if (static_cast<int>(f.factors.size()) != ctx->n)
    throw ContextError("weyl: n = 2 requires a separable function (factors)");
  std::vector<Mat> parts;
  for (const auto& g : f.factors) parts.push_back(rho1 * weyl_raw_1d(ctx->lambda, g, quad, ctx->N));
  return {ctx, tensor_by_index(*ctx, parts)};
}

std::vector<cplx> weyl_inverse(const ContextPtr& ctx, const TruncatedOperator& T,
                               const std::vector<PhasePoint>& points, const QuadratureRule& quad) {
  require_same(*ctx, *T.ctx);
  const double rho = std::pow(ctx->lambda / (2.0 * kPi), 0.5 * ctx->n);
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    PhasePoint m;
    for (auto v : p.a) m.a.push_back(-v);
    for (auto v : p.b) m.b.push_back(-v);
    auto pi = schrodinger_matrix(ctx, m, quad);
    out.push_back(rho * (pi.m * T.m).trace());
  }
  return out;
}

cplx twisted_convolution(double lambda, const PhaseFunction& f, const PhaseFunction& g,
                         std::span<const cplx> zeta, const QuadratureRule& quad) {
  const int d = static_cast<int>(zeta.size());
  if (d != 2 * f.n || d != 2 * g.n) throw ContextError("twisted_convolution: dimension mismatch");
  const double R = f.decay + g.decay;
  std::vector<Nodes1D> axes;
  for (int k = 0; k < d; ++k) axes.push_back(gaussian_nodes(quad, R, g.decay * zeta[k].real() / R));
  const int m = quad.order;
  std::vector<int> idx(d, 0);
  std::vector<cplx> eta(d), diff(d);
  cplx acc = 0.0;
  double tail = 0.0, total = 0.0;
  const cplx I(0, 1);
  while (true) {
    double w = 1.0;
    bool edge = false;
    for (int k = 0; k < d; ++k) {
      eta[k] = axes[k].x[idx[k]];
      diff[k] = zeta[k] - eta[k];
      w *= axes[k].w[idx[k]];
      edge = edge || idx[k] == 0 || idx[k] == m - 1;
    }
    cplx v = w * f(eta) * g(diff) * std::exp(-I * 0.5 * lambda * symplectic(zeta, eta));
    acc += v;
    total += std::abs(v);
    if (edge) tail += std::abs(v);
    int k = d - 1;
    for (; k >= 0; --k) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
    if (k < 0) break;
  }
  tail_test(tail, total, "twisted_convolution");
  return acc;
}

ConvolutionAudit twisted_convolution_constant(const ContextPtr& ctx, const QuadratureRule& weyl_quad,
                                              const QuadratureRule& conv_quad) {
  if (ctx->n != 1) throw ContextError("twisted_convolution_constant: n = 1 only");
  const double l = ctx->lambda;
  PhaseFunction p = heat_kernel_function(0.5, l, 1);
  PhaseFunction pp;
  pp.n = 1;
  pp.decay = 0.25 * l / std::tanh(l);
  pp.f = [=](std::span<const cplx> xi) { return twisted_convolution(l, p, p, xi, conv_quad); };
  Mat lhs = weyl(ctx, pp, weyl_quad).m;
  Mat wp = weyl(ctx, p, weyl_quad).m;
  Mat rhs = wp * wp;
  ConvolutionAudit a;
  a.expected = std::sqrt(2.0 * kPi / l);
  a.measured = (lhs(0, 0) / rhs(0, 0)).real();
  Mat diff = lhs - a.measured * rhs;
  a.max_rel_err = diff.cwiseAbs().maxCoeff() / lhs.cwiseAbs().maxCoeff();
  return a;
}

}  // namespace qherm
