#include "qherm/radial_ops.hpp"

#include <cmath>
#include <map>

namespace qherm {

namespace {

cplx laguerre_c(int k, double a, cplx t) {
  cplx l0 = 1.0;
  if (k == 0) return l0;
  cplx l1 = 1.0 + a - t;
  for (int j = 1; j < k; ++j) {
    cplx l2 = ((2.0 * j + 1.0 + a - t) * l1 - (j + a) * l0) / (j + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

int degree(const MultiIndex& mu) {
  int s = 0;
  for (int v : mu) s += v;
  return s;
}

bool has_odd(const MultiIndex& mu) {
  for (int v : mu)
    if (v % 2) return true;
  return false;
}

int level_of(const BasisContext& ctx, int pos) {
  int s = 0;
  for (int v : ctx.index[pos]) s += v;
  return s;
}

}  // namespace

PhaseFunction laguerre_function(int k, double lambda, int n) {
  const double c = dilation_c(lambda);
  PhaseFunction f;
  f.n = n;
  f.decay = 0.5 * c;
  f.f = [k, c, n](std::span<const cplx> xi) {
    cplx r2 = 0.0;
    for (auto v : xi) r2 += v * v;
    return std::pow(c, 0.5 * n) * laguerre_c(k, n - 1.0, c * r2) * std::exp(-0.5 * c * r2);
  };
  return f;
}

double laguerre_norm(int k, int n) {
  // (1/2) |S^{2n-1}| Gamma(k+n) / k!, |S^{2n-1}| = 2 pi^n / (n-1)!
  double sphere = 2.0 * std::pow(kPi, n) / std::tgamma(n);
  return std::sqrt(0.5 * sphere * std::tgamma(k + n) / std::tgamma(k + 1.0));
}

TruncatedOperator laguerre_projector(const ContextPtr& ctx, int k, const QuadratureRule& quad) {
  if (ctx->n != 1) throw ContextError("laguerre_projector: n = 1 only");
  if (4 * k > ctx->N) throw HeadroomError("laguerre_projector: k must not exceed N/4");
  // degree-2k polynomial factor; order 2N under-resolves it for k near N/4
  QuadratureRule q = quad.order >= 3 * ctx->N ? quad : gauss_hermite_rule(3 * ctx->N);
  TruncatedOperator P = weyl(ctx, laguerre_function(k, ctx->lambda, ctx->n), q);
  Mat off = P.m;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-8 * P.m.cwiseAbs().maxCoeff())
    throw QuadratureError("laguerre_projector: result is not diagonal");
  return (1.0 / hs_norm(P)) * P;
}

RadialCheck radial_check(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double tol,
                         const QuadratureRule& quad) {
  require_same(*fam.ctx, *T.ctx);
  const auto& ctx = *fam.ctx;
  RadialCheck r;
  const double tn = hs_norm(T);
  if (tn == 0.0) {
    r.radial = r.by_coefficients = r.by_diagonal = true;
    return r;
  }
  std::map<int, std::vector<cplx>> vt, vp;
  std::map<int, TruncatedOperator> proj;
  for (const auto& mu : fam.order) {
    cplx c = hs_inner(T, fam.at(mu)) / tn;
    if (has_odd(mu)) {
      if (std::abs(c) > r.max_odd) {
        r.max_odd = std::abs(c);
        if (r.max_odd > tol) r.witness = "coefficient " + mi_to_string(mu) + " = " + std::to_string(std::abs(c));
      }
    }
    const int d = degree(mu);
    if (d % 2) continue;
    if (!proj.count(d)) proj.emplace(d, laguerre_projector(fam.ctx, d / 2, quad));
    vt[d].push_back(c);
    vp[d].push_back(hs_inner(proj.at(d), fam.at(mu)));
  }
  for (auto& [d, v] : vt) {
    const auto& p = vp[d];
    cplx num = 0.0;
    double pp = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      num += std::conj(p[i]) * v[i];
      pp += std::norm(p[i]);
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dist += std::norm(v[i] - num / pp * p[i]);
    dist = std::sqrt(dist);
    if (dist > r.max_nonparallel) {
      r.max_nonparallel = dist;
      if (dist > tol && r.witness.empty()) r.witness = "block |mu| = " + std::to_string(d) + " not parallel to P_k";
    }
  }
  // diagonal and constant on each level of H
  const double top = T.m.cwiseAbs().maxCoeff();
  std::map<int, cplx> level_value;
  for (int a = 0; a < ctx.dim; ++a)
    for (int b = 0; b < ctx.dim; ++b) {
      double v = 0.0;
      if (a != b) {
        v = std::abs(T.m(a, b));
      } else {
        int j = level_of(ctx, a);
        auto it = level_value.find(j);
        if (it == level_value.end()) level_value.emplace(j, T.m(a, a));
        else v = std::abs(T.m(a, a) - it->second);
      }
      v /= top;
      if (v > r.max_offdiag) {
        r.max_offdiag = v;
        if (v > tol && r.witness.empty())
          r.witness = "entry (" + mi_to_string(ctx.index[a]) + ", " + mi_to_string(ctx.index[b]) + ")";
      }
    }
  r.by_coefficients = r.max_odd <= tol && r.max_nonparallel <= tol;
  r.by_diagonal = r.max_offdiag <= tol;
  r.radial = r.by_coefficients && r.by_diagonal;
  return r;
}

bool is_radial(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double tol, const QuadratureRule& quad) {
  return radial_check(fam, T, tol, quad).radial;
}

RadialProfile radial_decompose(const QuantumHermiteFamily& fam, const TruncatedOperator& T, int k_max,
                               const QuadratureRule& quad, double tol) {
  RadialCheck chk = radial_check(fam, T, tol, quad);
  if (!chk.radial) throw NonRadialError("radial_decompose: input is not radial (" + chk.witness + ")");
  const auto& ctx = *fam.ctx;
  RadialProfile prof;
  prof.k_max = k_max;
  Mat rec = Mat::Zero(ctx.dim, ctx.dim);
  int levels = 0;
  for (int a = 0; a < ctx.dim; ++a) levels = std::max(levels, level_of(ctx, a) + 1);
  for (int k = 0; k <= k_max; ++k) {
    TruncatedOperator P = laguerre_projector(fam.ctx, k, quad);
    cplx R = hs_inner(T, P);
    prof.R.push_back(R);
    rec += R * P.m;
    std::vector<double> row(levels, 0.0);
    std::vector<bool> seen(levels, false);
    for (int a = 0; a < ctx.dim; ++a) {
      int j = level_of(ctx, a);
      if (!seen[j]) {
        row[j] = P.m(a, a).real();
        seen[j] = true;
      }
    }
    prof.m_table.push_back(row);
  }
  prof.residual = (T.m - rec).norm();
  return prof;
}

nlohmann::json RadialProfile::to_json() const {
  nlohmann::json j;
  auto ks = nlohmann::json::array(), re = nlohmann::json::array(), im = nlohmann::json::array();
  for (int k = 0; k <= k_max; ++k) {
    ks.push_back(k);
    re.push_back(R[k].real());
    im.push_back(R[k].imag());
  }
  j["k"] = ks;
  j["R_re"] = re;
  j["R_im"] = im;
  j["m_table"] = m_table;
  j["residual"] = residual;
  return j;
}

FourierRadialResult fourier_preserves_radial(const QuantumHermiteFamily& fam, const TruncatedOperator& T,
                                             const QuadratureRule& quad) {
  TruncatedOperator FT = fourier_series(fam, T);
  RadialCheck c = radial_check(fam, FT, 1.0, quad);
  return {c.max_offdiag, std::max(c.max_odd, c.max_nonparallel)};
}

}  // namespace qherm
