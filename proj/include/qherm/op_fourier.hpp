#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "qherm/fock_bargmann.hpp"
#include "qherm/quantum_hermite.hpp"

namespace qherm {

// T^ = sum_{|mu| <= M} (-i)^{|mu|} (T, S_mu) S_mu
TruncatedOperator fourier_series(const QuantumHermiteFamily& fam, const TruncatedOperator& T);
// ||T - sum (T, S_mu) S_mu||_HS
double fourier_tail_bound(const QuantumHermiteFamily& fam, const TruncatedOperator& T);

struct FourierReport {
  std::string input_id;
  std::vector<std::pair<MultiIndex, cplx>> coefficients;
  TruncatedOperator output;
  std::map<std::string, double> residuals;
  nlohmann::json to_json() const;
};
FourierReport fourier_report(const QuantumHermiteFamily& fam, const TruncatedOperator& T, const std::string& id = "");

// (lambda / 2 pi)^{n/2}: sum (-i)^{|mu|} zeta_mu S_mu = ratio * pi^{-n/2} c^{-1/2} e^{zeta^2/4} G(r zeta).
double generating_ratio(double lambda, int n);
// r_lambda = sqrt((lambda/2) coth(lambda/2)) / lambda
double r_lambda(double lambda);

// G_lambda(z,w) = pi(w,-z) e^{-H/2} pi(-w,z); closed normal-ordered form, exact on the N-block.
TruncatedOperator g_operator(const ContextPtr& ctx, const FockPoint& p);
// Same product with complexified Schrodinger matrices on a padded intermediate space.
TruncatedOperator g_operator_product(const ContextPtr& ctx, const FockPoint& p, const QuadratureRule& quad, int pad = 32);
// int e^{-i lambda (x.z + u.w)} p_{1/2}(x,u) pi(x,u) dx du by quadrature (real zeta).
TruncatedOperator g_operator_integral(const ContextPtr& ctx, const FockPoint& p, const QuadratureRule& quad);
// G~(zeta) = G(r sigma zeta)
TruncatedOperator g_tilde(const ContextPtr& ctx, const FockPoint& p);
// |e^{(lambda/sinh lambda)(conj z^2 + conj w^2)/4}| ||G~||_HS divided by the envelope
// e^{-(lambda/2)(u.y - v.x)} e^{(lambda/4) coth(lambda) |zeta|^2}
double g_tilde_envelope_ratio(const ContextPtr& ctx, const FockPoint& p);

struct GeneratingResult {
  double residual = 0.0;        // ||L - ratio R||_HS
  double relative = 0.0;        // residual / ||L||_HS
  double measured_ratio = 0.0;  // |L(0,0) / R(0,0)|
  double expected_ratio = 0.0;
};
// L = sum_{|mu| <= M} (-i)^{|mu|} zeta_mu(zeta) S_mu, R = pi^{-n/2} c^{-1/2} e^{zeta^2/4} G(r zeta)
GeneratingResult generating_check(const QuantumHermiteFamily& fam, const FockPoint& p, int M);
// L = sum zeta_mu(zeta) S_mu against pi^{-n/2} c^{-1/2} e^{-zeta^2/4} G(i r zeta), the form before rotation
GeneratingResult pre_rotation_check(const QuantumHermiteFamily& fam, const FockPoint& p, int M);
// right-hand sides, scaled by generating_ratio
TruncatedOperator generating_rhs(const ContextPtr& ctx, const FockPoint& p);
TruncatedOperator pre_rotation_rhs(const ContextPtr& ctx, const FockPoint& p);

struct IntegrabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// T^ = int G(T)(zeta) K(zeta) w_lambda(zeta) d zeta with
// K(zeta) = a_{n,lambda} ratio pi^{-n/2} c^{-1/2} e^{eta^2/4} G(r eta), eta = conj(sigma zeta).
// n = 1; the rule is fock_rule(lambda, 1, quad4_order).
TruncatedOperator fourier_integral(const ContextPtr& ctx, const TruncatedOperator& T, int quad4_order,
                                   const QuadratureRule& quad);

// Singular-value l^p norm; p = infinity gives the operator norm.
double schatten_norm(const TruncatedOperator& T, double p);

struct HardyResult {
  bool pass = false;
  double min_eig_T = 0.0;   // of C e^{-H} - T* T
  double min_eig_FT = 0.0;  // of C e^{-H} - (F T)* (F T)
};
HardyResult hardy_check(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double C, double tol = 1e-10);

// (U_lambda f)(xi) = c(lambda)^n f^(c(lambda) xi), f^(xi) = (2 pi)^{-n} int f(eta) e^{-i xi.eta} d eta
cplx u_lambda_apply(const PhaseFunction& f, double lambda, std::span<const double> xi, const QuadratureRule& quad);

}  // namespace qherm
