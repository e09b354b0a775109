#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "qherm/op_fourier.hpp"

namespace qherm {

struct NonRadialError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// psi_k^{n-1}(xi) = L_k^{n-1}(|xi|^2) e^{-|xi|^2/2} on R^{2n}, dilated by D_lambda g = c^{n/2} g(sqrt(c) .)
PhaseFunction laguerre_function(int k, double lambda, int n);
// ||psi_k^{n-1}||_{L^2(R^{2n})}
double laguerre_norm(int k, int n);

// P_{k,lambda} = W(D_lambda psi_k^{n-1}) / ||.||_HS; n = 1.
TruncatedOperator laguerre_projector(const ContextPtr& ctx, int k, const QuadratureRule& quad);

struct RadialCheck {
  bool radial = false;
  bool by_coefficients = false;
  bool by_diagonal = false;
  double max_odd = 0.0;        // largest |(T,S_mu)| with some odd mu_j
  double max_nonparallel = 0.0;  // largest distance of an even block from the P_k direction
  double max_offdiag = 0.0;    // relative to max |T|
  std::string witness;         // offending coefficient or entry
};
// Reference directions come from projectors built with `quad`.
RadialCheck radial_check(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double tol,
                         const QuadratureRule& quad);
bool is_radial(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double tol, const QuadratureRule& quad);

struct RadialProfile {
  int k_max = 0;
  std::vector<cplx> R;                    // R_k = (T, P_k)
  std::vector<std::vector<double>> m_table;  // m_table[k][j] = diagonal of P_k at level j
  double residual = 0.0;                  // ||T - sum R_k P_k||_HS
  nlohmann::json to_json() const;
};
RadialProfile radial_decompose(const QuantumHermiteFamily& fam, const TruncatedOperator& T, int k_max,
                               const QuadratureRule& quad, double tol = 1e-7);

struct FourierRadialResult {
  double offdiag = 0.0;          // of F T, relative
  double coefficient_residual = 0.0;  // radial_check on F T: max(odd, nonparallel)
};
FourierRadialResult fourier_preserves_radial(const QuantumHermiteFamily& fam, const TruncatedOperator& T,
                                             const QuadratureRule& quad);

}  // namespace qherm
