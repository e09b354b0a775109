#include "qherm/fock_bargmann.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qherm {

namespace {

const cplx I(0, 1);

double factorial(int k) { return std::tgamma(k + 1.0); }

cplx bilinear(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double norm2(const FockPoint& p) {
  double s = 0.0;
  for (auto v : p.z) s += std::norm(v);
  for (auto v : p.w) s += std::norm(v);
  return s;
}

FockPoint conj_point(const FockPoint& p) {
  FockPoint q = p;
  for (auto& v : q.z) v = std::conj(v);
  for (auto& v : q.w) v = std::conj(v);
  return q;
}

}  // namespace

std::vector<cplx> FockPoint::flat() const {
  std::vector<cplx> v(z);
  v.insert(v.end(), w.begin(), w.end());
  return v;
}

FockPoint FockPoint::from_flat(std::span<const cplx> v) {
  const std::size_t n = v.size() / 2;
  return {std::vector<cplx>(v.begin(), v.begin() + n), std::vector<cplx>(v.begin() + n, v.end())};
}

std::vector<double> FockPoint::real_coords() const {
  std::vector<double> r;
  for (auto v : z) r.insert(r.end(), {v.real(), v.imag()});
  for (auto v : w) r.insert(r.end(), {v.real(), v.imag()});
  return r;
}

FockPoint FockPoint::from_real(std::span<const double> r, int n) {
  FockPoint p;
  for (int j = 0; j < n; ++j) p.z.emplace_back(r[2 * j], r[2 * j + 1]);
  for (int j = 0; j < n; ++j) p.w.emplace_back(r[2 * n + 2 * j], r[2 * n + 2 * j + 1]);
  return p;
}

DeformationMap deformation_map(double lambda, int n) {
  if (!(lambda > 0)) throw std::invalid_argument("deformation_map: lambda must be positive");
  DeformationMap d;
  d.lambda = lambda;
  d.n = n;
  d.delta = std::sqrt(lambda / std::sinh(lambda));
  d.c = std::cosh(0.5 * lambda);
  d.s = std::sinh(0.5 * lambda);
  return d;
}

FockPoint DeformationMap::apply(const FockPoint& p) const {
  FockPoint q = p;
  for (int j = 0; j < n; ++j) {
    q.z[j] = delta * (c * p.z[j] - I * s * p.w[j]);
    q.w[j] = delta * (c * p.w[j] + I * s * p.z[j]);
  }
  return q;
}

FockPoint DeformationMap::inverse(const FockPoint& p) const {
  FockPoint q = p;
  for (int j = 0; j < n; ++j) {
    cplx Z = p.z[j] / delta, W = p.w[j] / delta;
    q.z[j] = c * Z + I * s * W;
    q.w[j] = -I * s * Z + c * W;
  }
  return q;
}

Eigen::MatrixXd DeformationMap::real_form(bool with_delta) const {
  const int m = 4 * n;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < n; ++j) {
    int x = 2 * j, y = 2 * j + 1, u = 2 * n + 2 * j, v = 2 * n + 2 * j + 1;
    R(x, x) = c;  R(x, v) = s;
    R(y, y) = c;  R(y, u) = -s;
    R(u, u) = c;  R(u, y) = -s;
    R(v, v) = c;  R(v, x) = s;
  }
  return with_delta ? Eigen::MatrixXd(delta * R) : R;
}

FockPoint sigma_map(const DeformationMap& d, const FockPoint& p) { return d.apply(p); }

cplx zeta_mu(const MultiIndex& alpha, std::span<const cplx> w) {
  const int d = static_cast<int>(alpha.size());
  if (static_cast<int>(w.size()) != d) throw ContextError("zeta_mu: dimension mismatch");
  double norm = std::pow(kPi, -0.25 * d);
  cplx mono = 1.0;
  for (int j = 0; j < d; ++j) {
    norm /= std::sqrt(std::pow(2.0, alpha[j]) * factorial(alpha[j]));
    mono *= std::pow(w[j], alpha[j]);
  }
  return norm * mono;
}

cplx bargmann_classical(const HoloFunction& f, double decay, std::span<const cplx> w, const QuadratureRule& quad) {
  const int d = static_cast<int>(w.size());
  const double r = decay + 0.5;
  const double s = 1.0 / std::sqrt(r);
  const int m = quad.order;
  // one axis per coordinate, centred on the peak of the real Gaussian part
  std::vector<std::vector<double>> X(d), Wt(d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < m; ++i) {
      X[k].push_back(0.5 * w[k].real() / r + s * quad.nodes[i]);
      Wt[k].push_back(quad.weights[i] * std::exp(quad.nodes[i] * quad.nodes[i]) * s);
    }
  std::vector<int> idx(d, 0);
  std::vector<cplx> x(d);
  cplx acc = 0.0;
  double tail = 0.0, total = 0.0;
  while (true) {
    double wt = 1.0;
    bool edge = false;
    cplx q = 0.0;
    for (int k = 0; k < d; ++k) {
      x[k] = X[k][idx[k]];
      wt *= Wt[k][idx[k]];
      q += (x[k] - w[k]) * (x[k] - w[k]);
      edge = edge || idx[k] == 0 || idx[k] == m - 1;
    }
    cplx v = wt * f(x) * std::exp(-0.5 * q);
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
  if (total > 0 && tail > 1e-8 * total) throw DecayError("bargmann_classical: integrand does not decay");
  cplx ww = 0.0;
  for (int k = 0; k < d; ++k) ww += w[k] * w[k];
  return std::pow(kPi, -0.5 * d) * std::exp(0.25 * ww) * acc;
}

double a_n_lambda(int n, double lambda) { return std::pow(kPi, 0.5 * n) * std::sqrt(c_n_lambda(n, lambda)); }

cplx t_lambda(const HoloFunction& F, const DeformationMap& d, const FockPoint& p) {
  return a_n_lambda(d.n, d.lambda) * F(d.apply(p).flat());
}

double weight_w(double lambda, const FockPoint& p) {
  const int n = static_cast<int>(p.z.size());
  double im = 0.0;
  for (int j = 0; j < n; ++j) im += std::imag(p.z[j] * std::conj(p.w[j]));
  return std::pow(4.0, n) * c_n_lambda(n, lambda) *
         std::exp(lambda * im - 0.5 * lambda / std::tanh(lambda) * norm2(p));
}

double weight_w0(const FockPoint& p) {
  const int n = static_cast<int>(p.z.size());
  return std::pow(4.0 * kPi, -n) * std::exp(-0.5 * norm2(p));
}

cplx fock_bracket(const FockPoint& a, const FockPoint& b) { return bilinear(a.w, b.z) - bilinear(a.z, b.w); }

cplx reproducing_kernel(double lambda, const FockPoint& zeta, const FockPoint& zeta_p, double d_const) {
  FockPoint zb = conj_point(zeta);
  cplx dot = bilinear(zb.z, zeta_p.z) + bilinear(zb.w, zeta_p.w);
  return d_const * std::exp(0.5 * lambda / std::tanh(lambda) * dot + 0.5 * I * lambda * fock_bracket(zb, zeta_p));
}

FockRule fock_rule(double lambda, int n, int order) {
  if (n != 1) throw ContextError("fock_rule: n = 1 only");
  // w_lambda = 4 c exp(-r^T B r) in r = (x, y, u, v)
  Eigen::Matrix4d B = 0.5 * lambda / std::tanh(lambda) * Eigen::Matrix4d::Identity();
  B(1, 2) = B(2, 1) = -0.5 * lambda;
  B(0, 3) = B(3, 0) = 0.5 * lambda;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(B);
  Eigen::Vector4d ev = es.eigenvalues();
  if (ev.minCoeff() <= 0) throw std::runtime_error("fock_rule: weight is not integrable");
  Eigen::Matrix4d T = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal();
  const double pref = 4.0 * c_n_lambda(1, lambda) / std::sqrt(ev.prod());
  QuadratureRule q = gauss_hermite_rule(order);
  FockRule rule;
  rule.points.reserve(static_cast<std::size_t>(std::pow(order, 4)));
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (int c = 0; c < order; ++c)
        for (int e = 0; e < order; ++e) {
          Eigen::Vector4d s(q.nodes[a], q.nodes[b], q.nodes[c], q.nodes[e]);
          Eigen::Vector4d r = T * s;
          rule.points.push_back(FockPoint::from_real(std::span<const double>(r.data(), 4), 1));
          rule.weights.push_back(pref * q.weights[a] * q.weights[b] * q.weights[c] * q.weights[e]);
        }
  return rule;
}

double calibrate_d(double lambda, int order) {
  // Constant F: T F(0) = d c int w_lambda (K_0 = d), so d = 1 / int w_lambda.
  auto integral = [&](int m) {
    FockRule r = fock_rule(lambda, 1, m);
    double s = 0.0;
    for (double w : r.weights) s += w;
    return s;
  };
  double a = integral(order), b = integral(order + 4);
  if (std::abs(a - b) > 1e-4 * std::abs(b)) throw CalibrationError("calibrate_d: quadrature did not converge");
  return 1.0 / b;
}

cplx bargmann_twisted(double lambda, const PhaseFunction& f, const FockPoint& p, const QuadratureRule& quad) {
  const int n = f.n;
  PhaseFunction half = heat_kernel_function(0.5, lambda, n);
  std::vector<cplx> zeta = p.flat();
  cplx conv = twisted_convolution(lambda, f, half, zeta, quad);
  cplx p1 = heat_kernel_twisted(1.0, lambda, std::span<const cplx>(zeta));
  if (p1 == 0.0) throw std::domain_error("bargmann_twisted: p_1 underflow");
  return c_n_lambda(n, lambda) * conv / p1;
}

cplx gauss_bargmann(const ContextPtr& ctx, const TruncatedOperator& T, const FockPoint& p, const QuadratureRule& quad) {
  require_same(*ctx, *T.ctx);
  const int n = ctx->n;
  const double l = ctx->lambda;
  PhasePoint pp;
  for (auto v : p.z) pp.a.push_back(-v);
  for (auto v : p.w) pp.b.push_back(-v);
  Mat pi = schrodinger_matrix(ctx, pp, quad).m;
  Eigen::VectorXd e = (-0.5 * ctx->h_diag.array()).exp();
  Mat Te = T.m * e.cast<cplx>().asDiagonal();
  cplx tr = pi.cwiseProduct(Te.transpose()).sum();
  std::vector<cplx> zeta = p.flat();
  cplx p1 = heat_kernel_twisted(1.0, l, std::span<const cplx>(zeta));
  return std::pow(l / (2.0 * kPi), 0.5 * n) * c_n_lambda(n, l) * tr / p1;
}

double cauchy_riemann_residual(const HoloFunction& F, const FockPoint& p, int n, double h) {
  std::vector<cplx> base = p.flat();
  double bar = 0.0, hol = 0.0;
  for (int k = 0; k < 2 * n; ++k) {
    auto at = [&](cplx step) {
      std::vector<cplx> v = base;
      v[k] += step;
      return F(v);
    };
    cplx dx = (at(h) - at(-h)) / (2.0 * h);
    cplx dy = (at(I * h) - at(-I * h)) / (2.0 * h);
    bar = std::max(bar, std::abs(0.5 * (dx + I * dy)));
    hol = std::max(hol, std::abs(0.5 * (dx - I * dy)));
  }
  return hol > 0 ? bar / hol : bar;
}

double growth_constant(const ContextPtr& ctx, const TruncatedOperator& T, const std::vector<FockPoint>& pts,
                       const QuadratureRule& quad) {
  double C = 0.0;
  for (const auto& p : pts)
    C = std::max(C, std::abs(gauss_bargmann(ctx, T, p, quad)) * std::sqrt(weight_w(ctx->lambda, p)));
  return C;
}

std::string bargmann_csv(const std::vector<FockPoint>& pts, const std::vector<cplx>& vals) {
  if (pts.size() != vals.size()) throw std::invalid_argument("bargmann_csv: size mismatch");
  std::ostringstream os;
  const int n = pts.empty() ? 1 : static_cast<int>(pts[0].z.size());
  if (n == 1) {
    os << "re_z,im_z,re_w,im_w,re_val,im_val\n";
  } else {
    for (int j = 1; j <= n; ++j) os << "re_z" << j << ",im_z" << j << ",";
    for (int j = 1; j <= n; ++j) os << "re_w" << j << ",im_w" << j << ",";
    os << "re_val,im_val\n";
  }
  char buf[64];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (double r : pts[i].real_coords()) {
      std::snprintf(buf, sizeof buf, "%.17g,", r);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", vals[i].real(), vals[i].imag());
    os << buf;
  }
  return os.str();
}

}  // namespace qherm
