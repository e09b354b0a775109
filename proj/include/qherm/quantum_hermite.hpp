#pragma once

#include <map>
#include <string>
#include <vector>

#include "qherm/hilbert_basis.hpp"
#include "qherm/weyl_transform.hpp"

namespace qherm {

struct HeadroomError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Psi_mu^lambda(x,u) = c^{n/2} Phi_mu(sqrt(c) (x,u)), c = (lambda/2) coth(lambda/2).
struct DeformedHermite {
  MultiIndex mu;  // length 2n: (x_1..x_n, u_1..u_n) degrees
  double lambda = 1.0;
  int n = 1;

  cplx operator()(std::span<const cplx> xu) const;
  double at(std::span<const double> xu) const;
  // Callable form with decay c/2 and per-coordinate factors when n = 2.
  PhaseFunction function() const;
};

DeformedHermite psi(const MultiIndex& mu, double lambda);

// Ratio ||pi^{n/2} c_{n,lambda}^{-1/2} p_{1/2}|| / ||Psi_0|| by 2n-dim quadrature.
double psi0_constant_ratio(double lambda, int n);

// kappa_0 = (tr e^{-H})^{-1/2} on the truncated space.
double s_base_kappa(const ContextPtr& ctx);
TruncatedOperator s_base(const ContextPtr& ctx);

// M_j with A_j T = D_j T + T M_j.
Mat ladder_multiplier(const BasisContext& ctx, int j);
TruncatedOperator ladder_raise(const ContextPtr& ctx, int j, const TruncatedOperator& T);
// Hilbert-Schmidt adjoint of ladder_raise.
TruncatedOperator ladder_lower(const ContextPtr& ctx, int j, const TruncatedOperator& T);
// sqrt(lambda sinh lambda)
double ladder_scale(double lambda);

enum class Construction { Ladder, Quadrature, Symbolic };
std::string construction_name(Construction c);

struct QuantumHermiteFamily {
  ContextPtr ctx;
  int M = 0;
  Construction construction = Construction::Ladder;
  std::vector<MultiIndex> order;  // graded-lex
  std::map<MultiIndex, TruncatedOperator> table;

  const TruncatedOperator& at(const MultiIndex& mu) const;
  // max |(S_mu, S_nu) - delta| over stored indices
  double gram_max_err() const;
  double gram_max_err_interior(int margin) const;
};

// pad < 0 selects M + 4 extra levels per coordinate for the recursion; pad = 0
// runs it inside the N-block.
QuantumHermiteFamily family_ladder(const ContextPtr& ctx, int M, int pad = -1);
QuantumHermiteFamily family_quadrature(const ContextPtr& ctx, int M, const QuadratureRule& quad);
QuantumHermiteFamily family_symbolic(const ContextPtr& ctx, int M);

// S_0 raised once per entry of `path` (1-based coordinates), normalized at each step.
TruncatedOperator raise_along(const ContextPtr& ctx, const std::vector<int>& path);

// The number operator 1/2 sum_j (A_j A_j* + A_j* A_j).
TruncatedOperator number_operator(const ContextPtr& ctx, const TruncatedOperator& T);

struct SobolevResult {
  double norm = 0.0;        // sqrt of the partial sum over stored mu
  double residual_mass = 0.0;  // ||T||_HS^2 - sum |(T,S_mu)|^2, clipped at 0
  double tail_bound = 0.0;  // estimate for the omitted part of the norm
};
SobolevResult sobolev_norm(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double s);

struct DecayReport {
  std::vector<double> c_k;                    // k = 0..k_max
  std::vector<std::pair<int, double>> level;  // (|mu|, max |(T,S_mu)|) per level
  double slope = 0.0;  // least squares of log coef vs log(2|mu|+2n), even levels above floor
  int fitted_levels = 0;
};
DecayReport schwartz_decay_report(const QuantumHermiteFamily& fam, const TruncatedOperator& T, int k_max);

struct FamilyAudit {
  double kappa0 = 0.0;
  double gram_max_err = 0.0;
  double normalization_ratio = 0.0;
};
FamilyAudit audit_family(const QuantumHermiteFamily& fam);
// Writes s_mu_<mu>.json for each stored mu and manifest.json.
void export_family(const QuantumHermiteFamily& fam, const std::string& dir);

}  // namespace qherm
