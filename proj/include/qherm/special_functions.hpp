#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qherm {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Tensor product of a 1-D rule in `dim` dimensions, flattened.
struct TensorRule {
  int dim = 0;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_hermite_rule(int m);
// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre_rule(int m);
TensorRule tensor_rule(const QuadratureRule& rule, int dim);

// Normalized 1-D Hermite function h_k(x).
double hermite_eval(int k, double x);
// h_0(x), ..., h_kmax(x).
std::vector<double> hermite_all(int kmax, double x);
// Polynomial parts g_j with h_j(z) = g_j(z) exp(-z^2/2), j = 0..kmax,
// valid for complex z.
std::vector<cplx> hermite_poly_parts(int kmax, cplx z);
// Entire continuation of h_0..h_kmax to complex z.
std::vector<cplx> hermite_all_complex(int kmax, cplx z);

// Phi^lambda_alpha(x) = lambda^{d/4} prod_j h_{alpha_j}(sqrt(lambda) x_j).
double hermite_scaled_eval(std::span<const int> alpha, double lambda,
                           std::span<const double> x);

class HermiteEvaluator {
 public:
  HermiteEvaluator(double lambda, int n, int max_degree);
  double operator()(std::span<const int> alpha, std::span<const double> x) const;
  double lambda() const { return lambda_; }
  int dimension() const { return n_; }
  int max_degree() const { return max_degree_; }

 private:
  double lambda_;
  int n_;
  int max_degree_;
};

// Generalized Laguerre polynomial L_k^a(t).
double laguerre_eval(int k, double a, double t);

// p_t^lambda at zeta = (z, w) in C^{2n}; the quadratic form is continued
// holomorphically (sum of squares, no conjugation).
cplx heat_kernel_twisted(double t, double lambda, std::span<const cplx> zeta);
double heat_kernel_twisted(double t, double lambda, std::span<const double> xu);

// q_t(x) = (4 pi t)^{-n/2} exp(-|x|^2 / (4t)).
double heat_kernel_euclidean(double t, std::span<const double> x);

// c_{n,lambda} = (4 pi)^{-n} lambda^n (sinh lambda)^{-n}.
double c_n_lambda(int n, double lambda);
// (lambda/2) coth(lambda/2), continuous at 0.
double dilation_c(double lambda);

}  // namespace qherm
