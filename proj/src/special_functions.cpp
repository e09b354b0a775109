#include "qherm/special_functions.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qherm {

namespace {

// Golub-Welsch for a symmetric Jacobi matrix with zero diagonal.
QuadratureRule golub_welsch(int m, const std::vector<double>& offdiag, double mu0) {
  QuadratureRule r;
  r.order = m;
  r.nodes.resize(m);
  r.weights.resize(m);
  if (m == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = mu0;
    return r;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sub(m - 1);
  for (int k = 0; k < m - 1; ++k) sub(k) = offdiag[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Golub-Welsch eigen-solve did not converge");
  for (int i = 0; i < m; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v * v;
  }
  // Enforce exact symmetry of the rule.
  for (int i = 0; i < m / 2; ++i) {
    int j = m - 1 - i;
    double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.weights[i] = w;
    r.weights[j] = w;
  }
  if (m % 2 == 1) r.nodes[m / 2] = 0.0;
  double s = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
  for (double& w : r.weights) w *= mu0 / s;
  return r;
}

}  // namespace

QuadratureRule gauss_hermite_rule(int m) {
  if (m < 1 || m > 512) throw std::invalid_argument("gauss_hermite_rule: order must be in [1, 512]");
  std::vector<double> off(m > 1 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) off[k - 1] = std::sqrt(k / 2.0);
  QuadratureRule r = golub_welsch(m, off, std::sqrt(kPi));
  // Christoffel weights exp(-x^2) / sum_k h_k(x)^2 keep relative accuracy
  // for the small outer weights.
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    auto h = hermite_all(m - 1, r.nodes[i]);
    double q = 0.0;
    for (double v : h) q += v * v;
    r.weights[i] = std::exp(-r.nodes[i] * r.nodes[i]) / q;
    s += r.weights[i];
  }
  for (double& w : r.weights) w *= std::sqrt(kPi) / s;
  return r;
}

QuadratureRule gauss_legendre_rule(int m) {
  if (m < 1 || m > 512) throw std::invalid_argument("gauss_legendre_rule: order must be in [1, 512]");
  std::vector<double> off(m > 1 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(m, off, 2.0);
}

TensorRule tensor_rule(const QuadratureRule& rule, int dim) {
  TensorRule t;
  t.dim = dim;
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= rule.nodes.size();
  t.nodes.reserve(total);
  t.weights.reserve(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> x(dim);
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      x[d] = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    t.nodes.push_back(std::move(x));
    t.weights.push_back(w);
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < rule.order) break;
      idx[d] = 0;
    }
  }
  return t;
}

std::vector<double> hermite_all(int kmax, double x) {
  std::vector<double> h(kmax + 1);
  h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (kmax >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int k = 1; k < kmax; ++k)
    h[k + 1] = std::sqrt(2.0 / (k + 1)) * x * h[k] - std::sqrt(double(k) / (k + 1)) * h[k - 1];
  return h;
}

double hermite_eval(int k, double x) {
  if (k < 0) throw std::invalid_argument("hermite_eval: negative degree");
  return hermite_all(k, x)[k];
}

std::vector<cplx> hermite_poly_parts(int kmax, cplx z) {
  std::vector<cplx> g(kmax + 1);
  g[0] = std::pow(kPi, -0.25);
  if (kmax >= 1) g[1] = std::sqrt(2.0) * z * g[0];
  for (int k = 1; k < kmax; ++k)
    g[k + 1] = std::sqrt(2.0 / (k + 1)) * z * g[k] - std::sqrt(double(k) / (k + 1)) * g[k - 1];
  return g;
}

std::vector<cplx> hermite_all_complex(int kmax, cplx z) {
  auto g = hermite_poly_parts(kmax, z);
  cplx e = std::exp(-0.5 * z * z);
  for (auto& v : g) v *= e;
  return g;
}

double hermite_scaled_eval(std::span<const int> alpha, double lambda, std::span<const double> x) {
  if (alpha.size() != x.size()) throw std::invalid_argument("hermite_scaled_eval: size mismatch");
  double s = std::sqrt(lambda);
  double v = std::pow(lambda, 0.25 * alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] < 0) throw std::invalid_argument("hermite_scaled_eval: negative index");
    v *= hermite_eval(alpha[j], s * x[j]);
  }
  return v;
}

HermiteEvaluator::HermiteEvaluator(double lambda, int n, int max_degree)
    : lambda_(lambda), n_(n), max_degree_(max_degree) {
  if (lambda <= 0) throw std::invalid_argument("HermiteEvaluator: lambda must be positive");
}

double HermiteEvaluator::operator()(std::span<const int> alpha, std::span<const double> x) const {
  int deg = 0;
  for (int a : alpha) deg += a;
  if (deg > max_degree_) throw std::out_of_range("HermiteEvaluator: degree exceeds max_degree");
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("HermiteEvaluator: dimension mismatch");
  return hermite_scaled_eval(alpha, lambda_, x);
}

double laguerre_eval(int k, double a, double t) {
  if (k < 0) throw std::invalid_argument("laguerre_eval: negative degree");
  double l0 = 1.0;
  if (k == 0) return l0;
  double l1 = 1.0 + a - t;
  for (int j = 1; j < k; ++j) {
    double l2 = ((2.0 * j + 1.0 + a - t) * l1 - (j + a) * l0) / (j + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

double c_n_lambda(int n, double lambda) {
  return std::pow(lambda / (4.0 * kPi * std::sinh(lambda)), n);
}

double dilation_c(double lambda) {
  double h = 0.5 * lambda;
  if (std::abs(h) < 1e-8) return 1.0 + h * h / 3.0;
  return h / std::tanh(h);
}

cplx heat_kernel_twisted(double t, double lambda, std::span<const cplx> zeta) {
  if (t <= 0) throw std::invalid_argument("heat_kernel_twisted: t must be positive");
  int n = static_cast<int>(zeta.size() / 2);
  cplx q = 0.0;
  for (const auto& z : zeta) q += z * z;
  double pref = std::pow(lambda / (4.0 * kPi * std::sinh(t * lambda)), n);
  return pref * std::exp(-0.25 * lambda / std::tanh(t * lambda) * q);
}

double heat_kernel_twisted(double t, double lambda, std::span<const double> xu) {
  std::vector<cplx> z(xu.begin(), xu.end());
  return heat_kernel_twisted(t, lambda, std::span<const cplx>(z)).real();
}

double heat_kernel_euclidean(double t, std::span<const double> x) {
  if (t <= 0) throw std::invalid_argument("heat_kernel_euclidean: t must be positive");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::pow(4.0 * kPi * t, -0.5 * x.size()) * std::exp(-r2 / (4.0 * t));
}

}  // namespace qherm
