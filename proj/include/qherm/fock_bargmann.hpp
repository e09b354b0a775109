#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qherm/hilbert_basis.hpp"
#include "qherm/weyl_transform.hpp"

namespace qherm {

// zeta = (z, w) in C^{2n}; flat() gives (z_1..z_n, w_1..w_n).
struct FockPoint {
  std::vector<cplx> z, w;
  std::vector<cplx> flat() const;
  static FockPoint from_flat(std::span<const cplx> v);
  // (Re z, Im z, Re w, Im w) per coordinate block
  std::vector<double> real_coords() const;
  static FockPoint from_real(std::span<const double> r, int n);
};

struct DeformationMap {
  double lambda = 1.0;
  int n = 1;
  double delta = 1.0;  // (lambda / sinh lambda)^{1/2}
  double c = 1.0;      // cosh(lambda/2)
  double s = 0.0;      // sinh(lambda/2)

  FockPoint apply(const FockPoint& p) const;
  FockPoint inverse(const FockPoint& p) const;
  // 4n x 4n real matrix acting on real_coords(); `with_delta` false drops delta.
  Eigen::MatrixXd real_form(bool with_delta = true) const;
};

DeformationMap deformation_map(double lambda, int n);
FockPoint sigma_map(const DeformationMap& d, const FockPoint& p);

using HoloFunction = std::function<cplx(std::span<const cplx>)>;

// zeta_alpha(w) = pi^{-d/4} (2^{|alpha|} alpha!)^{-1/2} w^alpha, d = alpha.size().
cplx zeta_mu(const MultiIndex& alpha, std::span<const cplx> w);

// Bf(w) = pi^{-d/2} e^{w.w/4} int f(x) e^{-(x-w).(x-w)/2} dx over R^d.
cplx bargmann_classical(const HoloFunction& f, double decay, std::span<const cplx> w, const QuadratureRule& quad);

// a_{n,lambda} = pi^{n/2} c_{n,lambda}^{1/2}
double a_n_lambda(int n, double lambda);
// T_lambda F(zeta) = a_{n,lambda} F(sigma_lambda zeta)
cplx t_lambda(const HoloFunction& F, const DeformationMap& d, const FockPoint& p);

// w_lambda(z,w) = 4^n c_{n,lambda} e^{lambda Im(z.conj w)} e^{-lambda coth(lambda) |zeta|^2 / 2}
double weight_w(double lambda, const FockPoint& p);
// w_0 = (4 pi)^{-n} e^{-|zeta|^2/2}, the normalization taken for the classical space.
double weight_w0(const FockPoint& p);

// [a, b] on C^{2n} with a = (a_z, a_w): a_w . b_z - a_z . b_w (bilinear)
cplx fock_bracket(const FockPoint& a, const FockPoint& b);
// K_zeta(zeta') = d e^{lambda coth(lambda) (conj zeta . zeta')/2} e^{i lambda [conj zeta, zeta']/2}
cplx reproducing_kernel(double lambda, const FockPoint& zeta, const FockPoint& zeta_p, double d_const);

// 4n-dim Gauss-Hermite rule for int g(zeta) w_lambda(zeta) d zeta (n = 1),
// after diagonalising the Gaussian part of w_lambda. Weights include w_lambda
// except for its Gaussian factor, which the rule absorbs.
struct FockRule {
  std::vector<FockPoint> points;
  std::vector<double> weights;  // so that sum weights g(points) ~ int g w_lambda
};
FockRule fock_rule(double lambda, int n, int order);

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// d with T F(0) = int T F(zeta') conj K_0(zeta') w_lambda(zeta') d zeta' for constant F.
double calibrate_d(double lambda, int order = 16);

// B_lambda f(zeta) = c_{n,lambda} p_1(zeta)^{-1} (f *_lambda p_{1/2})(zeta)
cplx bargmann_twisted(double lambda, const PhaseFunction& f, const FockPoint& p, const QuadratureRule& quad);

// G_lambda(T)(zeta) = (lambda/2pi)^{n/2} c_{n,lambda} p_1(zeta)^{-1} tr(pi(-z,-w) T e^{-H/2})
cplx gauss_bargmann(const ContextPtr& ctx, const TruncatedOperator& T, const FockPoint& p, const QuadratureRule& quad);

// Largest |d F / d conj z_j| and |d F / d conj w_j| by central differences,
// relative to the largest holomorphic derivative.
double cauchy_riemann_residual(const HoloFunction& F, const FockPoint& p, int n, double h = 1e-4);

// max |G(T)(zeta)| w_lambda(zeta)^{1/2} over the given points
double growth_constant(const ContextPtr& ctx, const TruncatedOperator& T, const std::vector<FockPoint>& pts,
                       const QuadratureRule& quad);

// Columns re_z, im_z, re_w, im_w, re_val, im_val (n = 1; for n = 2, z_1 z_2 w_1 w_2 pairs).
std::string bargmann_csv(const std::vector<FockPoint>& pts, const std::vector<cplx>& vals);

}  // namespace qherm
