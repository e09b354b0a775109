#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qherm/hilbert_basis.hpp"
#include "qherm/special_functions.hpp"

namespace qherm {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DecayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arguments (a, b) of pi_lambda(a, b); complex values are allowed.
struct PhasePoint {
  std::vector<cplx> a;
  std::vector<cplx> b;
};

// A function on R^{2n} in coordinates (x_1..x_n, u_1..u_n). Callers that
// need the holomorphic extension (twisted convolution, Bargmann transforms)
// pass complex points; the Weyl transform only evaluates at real points.
struct PhaseFunction {
  int n = 1;
  std::function<cplx(std::span<const cplx>)> f;
  // Gaussian rate r with |f| ~ exp(-r |xi|^2); steers the quadrature scaling.
  double decay = 0.5;
  // Support |x_j| <= L in the x-variables (Gauss-Legendre in x when set).
  std::optional<double> x_half_width;
  // For n = 2: optional factorization f = f_1(x_1,u_1) f_2(x_2,u_2).
  std::vector<PhaseFunction> factors;

  cplx operator()(std::span<const cplx> xi) const { return f(xi); }
  cplx at_real(std::span<const double> xi) const;
};

PhaseFunction scale(cplx s, const PhaseFunction& f);
PhaseFunction add(const PhaseFunction& f, const PhaseFunction& g);
PhaseFunction heat_kernel_function(double t, double lambda, int n);

// Matrix of pi_lambda(a, b) in the 1-D Hermite basis (rows x cols block),
// computed by Gauss-Hermite quadrature after a complex contour shift.
Mat schrodinger_block_1d(double lambda, cplx a, cplx b, int rows, int cols, const QuadratureRule& quad);
// Same block from the normal-ordered form e^{lambda al be} e^{be A*} e^{al A},
// al = (ia+b)/2, be = (ia-b)/2; the finite block is exact.
Mat schrodinger_block_1d_closed(double lambda, cplx a, cplx b, int rows, int cols);

TruncatedOperator schrodinger_matrix(const ContextPtr& ctx, const PhasePoint& p, const QuadratureRule& quad);

// Unitary Weyl map W = (lambda / 2 pi)^{n/2} int f(xi) pi_lambda(xi) dxi,
// computed through the integral kernel of pi_lambda(f).
TruncatedOperator weyl(const ContextPtr& ctx, const PhaseFunction& f, const QuadratureRule& quad);

// f(x,u) = (lambda / 2 pi)^{n/2} tr(pi_lambda(-x,-u) T) at real points.
std::vector<cplx> weyl_inverse(const ContextPtr& ctx, const TruncatedOperator& T,
                               const std::vector<PhasePoint>& points, const QuadratureRule& quad);

// (f *_lambda g)(zeta) = int f(eta) g(zeta - eta) e^{-i lambda [zeta, eta] / 2} d eta,
// [(x,u),(y,v)] = u.y - v.x; zeta may be complex.
cplx twisted_convolution(double lambda, const PhaseFunction& f, const PhaseFunction& g,
                         std::span<const cplx> zeta, const QuadratureRule& quad);

// Measured c with W(p * p) = c W(p) W(p) for p = p_{1/2}^lambda, read off
// the (0,0) entry.
struct ConvolutionAudit {
  double measured = 0.0;
  double expected = 0.0;  // (2 pi / lambda)^{n/2}
  double max_rel_err = 0.0;
};
ConvolutionAudit twisted_convolution_constant(const ContextPtr& ctx, const QuadratureRule& weyl_quad,
                                              const QuadratureRule& conv_quad);

cplx symplectic(std::span<const cplx> xi, std::span<const cplx> eta);

}  // namespace qherm
