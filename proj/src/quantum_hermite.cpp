#include "qherm/quantum_hermite.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "qherm/normal_order.hpp"

namespace qherm {

namespace {

void check_headroom(const BasisContext& ctx, int M) {
  if (M < 0) throw std::invalid_argument("family: M must be non-negative");
  if (4 * M > ctx.N) throw HeadroomError("family: M must not exceed N/4");
}

QuantumHermiteFamily empty_family(const ContextPtr& ctx, int M, Construction c) {
  QuantumHermiteFamily f;
  f.ctx = ctx;
  f.M = M;
  f.construction = c;
  f.order = indices_up_to(2 * ctx->n, M);
  return f;
}

}  // namespace

cplx DeformedHermite::operator()(std::span<const cplx> xu) const {
  const double c = dilation_c(lambda), sc = std::sqrt(c);
  cplx v = std::pow(c, 0.5 * n);
  for (int k = 0; k < 2 * n; ++k) {
    cplx z = sc * xu[k];
    v *= hermite_poly_parts(mu[k], z)[mu[k]] * std::exp(-0.5 * z * z);
  }
  return v;
}

double DeformedHermite::at(std::span<const double> xu) const {
  const double c = dilation_c(lambda), sc = std::sqrt(c);
  double v = std::pow(c, 0.5 * n);
  for (int k = 0; k < 2 * n; ++k) v *= hermite_eval(mu[k], sc * xu[k]);
  return v;
}

PhaseFunction DeformedHermite::function() const {
  PhaseFunction p;
  p.n = n;
  p.decay = 0.5 * dilation_c(lambda);
  DeformedHermite self = *this;
  p.f = [self](std::span<const cplx> xu) { return self(xu); };
  if (n == 2)
    for (int j = 0; j < 2; ++j) p.factors.push_back(psi({mu[j], mu[j + 2]}, lambda).function());
  return p;
}

DeformedHermite psi(const MultiIndex& mu, double lambda) {
  if (mu.size() != 2 && mu.size() != 4) throw std::invalid_argument("psi: multi-index must have length 2 or 4");
  for (int v : mu)
    if (v < 0) throw std::invalid_argument("psi: negative component");
  return {mu, lambda, static_cast<int>(mu.size()) / 2};
}

double psi0_constant_ratio(double lambda, int n) {
  auto q = gauss_hermite_rule(40);
  const double a = 0.5 * lambda / std::tanh(0.5 * lambda);  // |p|^2 ~ exp(-a |xi|^2)
  const double pre = std::sqrt(kPi) / std::sqrt(c_n_lambda(1, lambda));
  DeformedHermite p0 = psi({0, 0}, lambda);
  double s_const = 0.0, s_psi = 0.0;
  for (int i = 0; i < q.order; ++i)
    for (int k = 0; k < q.order; ++k) {
      double xu[2] = {q.nodes[i] / std::sqrt(a), q.nodes[k] / std::sqrt(a)};
      double w = q.weights[i] * q.weights[k] * std::exp(q.nodes[i] * q.nodes[i] + q.nodes[k] * q.nodes[k]) / a;
      double f = pre * heat_kernel_twisted(0.5, lambda, std::span<const double>(xu, 2));
      double g = p0.at(std::span<const double>(xu, 2));
      s_const += w * f * f;
      s_psi += w * g * g;
    }
  return std::pow(std::sqrt(s_const / s_psi), n);
}

double s_base_kappa(const ContextPtr& ctx) {
  double tr = 0.0;
  for (int k = 0; k < ctx->dim; ++k) tr += std::exp(-ctx->h_diag[k]);
  return 1.0 / std::sqrt(tr);
}

TruncatedOperator s_base(const ContextPtr& ctx) {
  return heat_semigroup(ctx, 0.5) * cplx(s_base_kappa(ctx));
}

Mat ladder_multiplier(const BasisContext& ctx, int j) {
  if (j < 1 || j > 2 * ctx.n) throw std::out_of_range("ladder: index out of range");
  const double s = std::sinh(ctx.lambda / 2);
  if (j <= ctx.n) return cplx(0, 2 * s * ctx.lambda) * ctx.Q[j - 1];
  return 2 * s * ctx.P[j - 1 - ctx.n];
}

TruncatedOperator ladder_raise(const ContextPtr& ctx, int j, const TruncatedOperator& T) {
  require_same(*ctx, *T.ctx);
  Mat X = d_generator(*ctx, j);
  Mat B = X + ladder_multiplier(*ctx, j);
  return {ctx, T.m * B - X * T.m};
}

TruncatedOperator ladder_lower(const ContextPtr& ctx, int j, const TruncatedOperator& T) {
  require_same(*ctx, *T.ctx);
  Mat X = d_generator(*ctx, j);
  Mat B = X + ladder_multiplier(*ctx, j);
  return {ctx, T.m * B.adjoint() - X.adjoint() * T.m};
}

double ladder_scale(double lambda) { return std::sqrt(lambda * std::sinh(lambda)); }

std::string construction_name(Construction c) {
  switch (c) {
    case Construction::Ladder: return "ladder";
    case Construction::Quadrature: return "quadrature";
    case Construction::Symbolic: return "symbolic";
  }
  return "?";
}

const TruncatedOperator& QuantumHermiteFamily::at(const MultiIndex& mu) const {
  auto it = table.find(mu);
  if (it == table.end()) throw std::out_of_range("family: index " + mi_to_string(mu) + " not stored");
  return it->second;
}

double QuantumHermiteFamily::gram_max_err() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a; b < order.size(); ++b) {
      cplx g = hs_inner(at(order[a]), at(order[b]));
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

double QuantumHermiteFamily::gram_max_err_interior(int margin) const {
  std::vector<Mat> blocks;
  for (const auto& mu : order) blocks.push_back(interior_block(*ctx, at(mu).m, margin));
  double worst = 0.0;
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a; b < order.size(); ++b) {
      cplx g = (blocks[a].cwiseProduct(blocks[b].conjugate())).sum();
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

QuantumHermiteFamily family_ladder(const ContextPtr& ctx, int M, int pad) {
  check_headroom(*ctx, M);
  if (pad < 0) pad = M + 4;
  // Each raise corrupts one more band at the truncation edge; running the
  // recursion on a padded space keeps the N-block free of that error.
  ContextPtr work = pad ? build_context(ctx->lambda, ctx->n, ctx->N + pad, ctx->interior_margin) : ctx;
  std::vector<int> pos;
  for (const auto& a : ctx->index) pos.push_back(work->where.at(a));
  auto fam = empty_family(ctx, M, Construction::Ladder);
  const double ls = ladder_scale(ctx->lambda);
  std::map<MultiIndex, Mat> full;
  for (const auto& nu : fam.order) {
    if (total_degree(nu) == 0) {
      full[nu] = heat_semigroup(work, 0.5).m * s_base_kappa(ctx);
    } else {
      int j = 0;
      while (nu[j] == 0) ++j;
      MultiIndex mu = nu;
      --mu[j];
      double f = ls * std::sqrt(2.0 * mu[j] + 2.0);
      full[nu] = ladder_raise(work, j + 1, {work, full.at(mu)}).m / f;
    }
    const Mat& F = full.at(nu);
    Mat R(ctx->dim, ctx->dim);
    for (int r = 0; r < ctx->dim; ++r)
      for (int c = 0; c < ctx->dim; ++c) R(r, c) = F(pos[r], pos[c]);
    fam.table.emplace(nu, TruncatedOperator{ctx, R});
  }
  return fam;
}

TruncatedOperator raise_along(const ContextPtr& ctx, const std::vector<int>& path) {
  MultiIndex mu(2 * ctx->n, 0);
  TruncatedOperator S = s_base(ctx);
  const double ls = ladder_scale(ctx->lambda);
  for (int j : path) {
    if (j < 1 || j > 2 * ctx->n) throw std::out_of_range("raise_along: index out of range");
    S = ladder_raise(ctx, j, S) * cplx(1.0 / (ls * std::sqrt(2.0 * mu[j - 1] + 2.0)));
    ++mu[j - 1];
  }
  return S;
}

QuantumHermiteFamily family_quadrature(const ContextPtr& ctx, int M, const QuadratureRule& quad) {
  check_headroom(*ctx, M);
  if (quad.order < 2 * ctx->N) throw QuadratureError("family_quadrature: quadrature order must be at least 2N");
  auto fam = empty_family(ctx, M, Construction::Quadrature);
  for (const auto& mu : fam.order) fam.table.emplace(mu, weyl(ctx, psi(mu, ctx->lambda).function(), quad));
  return fam;
}

QuantumHermiteFamily family_symbolic(const ContextPtr& ctx, int M) {
  check_headroom(*ctx, M);
  auto fam = empty_family(ctx, M, Construction::Symbolic);
  const double k0 = s_base_kappa(ctx);
  TruncatedOperator Eh = heat_semigroup(ctx, 0.5);
  for (const auto& mu : fam.order) fam.table.emplace(mu, evaluate(p_mu(ctx->lambda, ctx->n, mu, k0), ctx) * Eh);
  return fam;
}

TruncatedOperator number_operator(const ContextPtr& ctx, const TruncatedOperator& T) {
  TruncatedOperator acc = zero_op(ctx);
  for (int j = 1; j <= 2 * ctx->n; ++j) {
    acc = acc + ladder_raise(ctx, j, ladder_lower(ctx, j, T));
    acc = acc + ladder_lower(ctx, j, ladder_raise(ctx, j, T));
  }
  return acc * cplx(0.5);
}

SobolevResult sobolev_norm(const QuantumHermiteFamily& fam, const TruncatedOperator& T, double s) {
  const double lam = fam.ctx->lambda;
  const int n = fam.ctx->n;
  double sum = 0.0, mass = 0.0;
  for (const auto& mu : fam.order) {
    double c2 = std::norm(hs_inner(T, fam.at(mu)));
    sum += std::pow((2.0 * total_degree(mu) + 2 * n) * lam, s) * c2;
    mass += c2;
  }
  SobolevResult r;
  r.norm = std::sqrt(sum);
  double t2 = hs_norm(T);
  r.residual_mass = std::max(0.0, t2 * t2 - mass);
  // Omitted indices have eigenvalue >= (2(M+1)+2n) lambda; for s > 0 this is
  // an estimate that assumes the residual sits at the first omitted level.
  r.tail_bound = std::sqrt(r.residual_mass * std::pow((2.0 * (fam.M + 1) + 2 * n) * lam, s));
  return r;
}

DecayReport schwartz_decay_report(const QuantumHermiteFamily& fam, const TruncatedOperator& T, int k_max) {
  const double lam = fam.ctx->lambda;
  const int n = fam.ctx->n;
  DecayReport rep;
  rep.c_k.assign(k_max + 1, 0.0);
  std::map<int, double> level;
  for (const auto& mu : fam.order) {
    int d = total_degree(mu);
    double a = std::abs(hs_inner(T, fam.at(mu)));
    level[d] = std::max(level[d], a);
    for (int k = 0; k <= k_max; ++k) rep.c_k[k] = std::max(rep.c_k[k], a * std::pow((2.0 * d + 2 * n) * lam, k));
  }
  double top = 0.0;
  for (auto [d, a] : level) {
    rep.level.emplace_back(d, a);
    top = std::max(top, a);
  }
  // Fit on even levels: the test inputs are even, odd levels vanish.
  std::vector<double> xs, ys;
  for (auto [d, a] : rep.level)
    if (d % 2 == 0 && a > 1e-12 * top) {
      xs.push_back(std::log(2.0 * d + 2 * n));
      ys.push_back(std::log(a));
    }
  rep.fitted_levels = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= xs.size();
    my /= xs.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    rep.slope = sxy / sxx;
  }
  return rep;
}

FamilyAudit audit_family(const QuantumHermiteFamily& fam) {
  return {s_base_kappa(fam.ctx), fam.gram_max_err(), psi0_constant_ratio(fam.ctx->lambda, fam.ctx->n)};
}

void export_family(const QuantumHermiteFamily& fam, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& mu : fam.order) {
    std::ofstream out(fs::path(dir) / ("s_mu_" + mi_to_string(mu) + ".json"));
    out << operator_to_json(fam.at(mu)).dump() << "\n";
    if (!out) throw std::runtime_error("export_family: write failed in " + dir);
  }
  FamilyAudit a = audit_family(fam);
  nlohmann::json m = {{"lambda", fam.ctx->lambda},
                      {"n", fam.ctx->n},
                      {"N", fam.ctx->N},
                      {"M", fam.M},
                      {"construction", construction_name(fam.construction)},
                      {"audit",
                       {{"kappa0", a.kappa0}, {"gram_max_err", a.gram_max_err}, {"normalization_ratio", a.normalization_ratio}}}};
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << m.dump(2) << "\n";
  if (!out) throw std::runtime_error("export_family: write failed in " + dir);
}

}  // namespace qherm
