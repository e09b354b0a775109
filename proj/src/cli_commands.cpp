#include "qherm/cli_commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "qherm/fock_bargmann.hpp"
#include "qherm/json_format.hpp"
#include "qherm/normal_order.hpp"
#include "qherm/op_fourier.hpp"
#include "qherm/quantum_hermite.hpp"
#include "qherm/radial_ops.hpp"

namespace qherm::cli {

namespace fs = std::filesystem;

// ---- configuration ----

void RunConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
  if (n != 1) throw ConfigError("only n = 1 is supported");
  if (N < 1) throw ConfigError("N must be positive");
  if (M < 0) throw ConfigError("M must be non-negative");
  if (4 * M > N) throw ConfigError("M must not exceed N/4");
  if (quad_order < 2 * N) throw ConfigError("quad_order must be at least 2N");
  if (quad4_order < 2) throw ConfigError("quad4_order must be at least 2");
  for (const auto& [k, v] : tol_overrides)
    if (!(v >= 0.0)) throw ConfigError("tolerance override " + k + " must be non-negative");
}

double RunConfig::tol(const std::string& key, double def) const {
  auto it = tol_overrides.find(key);
  return it == tol_overrides.end() ? def : it->second;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["n"] = n;
  j["N"] = N;
  j["M"] = M;
  j["quad_order"] = quad_order;
  j["quad4_order"] = quad4_order;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["tol_overrides"] = tol_overrides;
  return j;
}

namespace {

template <class T>
T get_typed(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key " + key + " has the wrong type");
  }
}

int get_int(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("config key " + key + " must be an integer");
  return v.get<int>();
}

}  // namespace

void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "lambda") {
      if (!v.is_number()) throw ConfigError("config key lambda must be a number");
      cfg.lambda = v.get<double>();
    } else if (key == "n") {
      cfg.n = get_int(v, key);
    } else if (key == "N") {
      cfg.N = get_int(v, key);
    } else if (key == "M") {
      cfg.M = get_int(v, key);
    } else if (key == "quad_order") {
      cfg.quad_order = get_int(v, key);
    } else if (key == "quad4_order") {
      cfg.quad4_order = get_int(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("config key seed must be a non-negative integer");
      cfg.seed = v.get<unsigned>();
    } else if (key == "out_dir") {
      cfg.out_dir = get_typed<std::string>(v, key);
    } else if (key == "tol_overrides") {
      if (!v.is_object()) throw ConfigError("tol_overrides must be an object");
      for (const auto& [name, t] : v.items()) {
        if (!t.is_number()) throw ConfigError("tolerance override " + name + " must be a number");
        cfg.tol_overrides[name] = t.get<double>();
      }
    } else {
      throw ConfigError("unknown config key " + key);
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  RunConfig cfg;
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  apply_config_json(cfg, j);
  return cfg;
}

// ---- reports ----

nlohmann::json Check::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["name"] = name;
  j["anchor"] = anchor;
  j["residual"] = residual ? json_number(*residual) : nlohmann::json(nullptr);
  j["tolerance"] = tolerance;
  j["status"] = status;
  return j;
}

bool VerifyReport::passed() const {
  for (const auto& c : checks)
    if (c.status == "FAIL") return false;
  return true;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["config"] = config;
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) arr.push_back(c.to_json());
  j["checks"] = arr;
  j["passed"] = passed();
  return j;
}

namespace {

const std::string kSkipped = "SKIPPED-UNDERRESOLVED";

struct Suite {
  const RunConfig& cfg;
  std::string name;
  std::vector<Check>& out;

  // allowance: resolution-derived slack added to the default tolerance; an override replaces both
  void add(const std::string& check, const std::string& anchor, double residual, double tol, double allowance = 0.0) {
    double t = cfg.tol(name + "." + check, tol + allowance);
    bool ok = std::isfinite(residual) && residual <= t;
    out.push_back({name, check, anchor, residual, t, ok ? "PASS" : "FAIL"});
  }
  void skip(const std::string& check, const std::string& anchor, double tol) {
    out.push_back({name, check, anchor, std::nullopt, cfg.tol(name + "." + check, tol), kSkipped});
  }
};

double max_abs(const Mat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

double rel_err(cplx a, cplx b, double floor) { return std::abs(a - b) / std::max(std::abs(b), floor); }

cplx mip(int k) { return std::pow(cplx(0, -1), k); }

std::vector<FockPoint> draw_points(std::mt19937& rng, int count, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<FockPoint> pts;
  for (int i = 0; i < count; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    pts.push_back({{cplx(a, b)}, {cplx(c, d)}});
  }
  return pts;
}

TruncatedOperator random_span(const QuantumHermiteFamily& fam, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  TruncatedOperator T = zero_op(fam.ctx);
  for (const auto& mu : fam.order) T.m += cplx(nd(rng), nd(rng)) * fam.at(mu).m;
  return (1.0 / hs_norm(T)) * T;
}

// Largest HS mass of {S_mu : |mu| <= M} lying outside the N-block, measured on an enlarged context.
// Bounds the Gram defect forced by truncation alone.
double truncation_floor(const ContextPtr& ctx, int M) {
  auto big = build_context(ctx->lambda, ctx->n, ctx->N + 16);
  auto fam = family_ladder(big, M);
  std::vector<int> pos;
  for (const auto& a : ctx->index) pos.push_back(big->where.at(a));
  double worst = 0.0;
  for (const auto& mu : fam.order) {
    const Mat& m = fam.at(mu).m;
    double inside = 0.0;
    for (int r : pos)
      for (int c : pos) inside += std::norm(m(r, c));
    worst = std::max(worst, m.squaredNorm() - inside);
  }
  return std::max(worst, 0.0);
}

// order of the verification family used by the fourier and radial suites
int fourier_family_order(const RunConfig& cfg) { return std::min(6, cfg.N / 4); }

void suite_ladder(const RunConfig& cfg, std::vector<Check>& out) {
  Suite s{cfg, "ladder", out};
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  auto quad = gauss_hermite_rule(cfg.quad_order);
  auto fam = family_ladder(ctx, cfg.M);
  const double floor = truncation_floor(ctx, cfg.M);
  s.add("gram_ladder", "S_mu orthonormal in S_2, ladder construction", fam.gram_max_err(), 1e-9, floor);
  auto fq = family_quadrature(ctx, cfg.M, quad);
  s.add("gram_quadrature", "S_mu orthonormal in S_2, Weyl transform of Psi_mu", fq.gram_max_err(), 1e-6, floor);
  double lq = 0.0;
  for (const auto& mu : fam.order) lq = std::max(lq, max_abs(fam.at(mu).m - fq.at(mu).m));
  s.add("ladder_vs_quadrature", "S_mu = W(Psi_mu) = raised S_0", lq, 1e-6);
  if (cfg.M >= 2)
    s.add("path_independence", "raising maps commute", max_abs(raise_along(ctx, {1, 2}).m - raise_along(ctx, {2, 1}).m),
          1e-10);

  std::mt19937 rng(cfg.seed);
  std::normal_distribution<double> nd;
  auto randop = [&] {
    Mat X(ctx->dim, ctx->dim);
    for (int r = 0; r < ctx->dim; ++r)
      for (int c = 0; c < ctx->dim; ++c) X(r, c) = cplx(nd(rng), nd(rng));
    return TruncatedOperator{ctx, X / X.norm()};
  };
  TruncatedOperator S = randop(), T = randop();
  double adj = 0.0;
  for (int j = 1; j <= 2 * cfg.n; ++j)
    adj = std::max(adj, std::abs(hs_inner(ladder_raise(ctx, j, S), T) - hs_inner(S, ladder_lower(ctx, j, T))));
  s.add("lowering_is_adjoint", "lowering map is the HS adjoint of raising", adj, 1e-10);

  TruncatedOperator A{ctx, ctx->A[0]}, As{ctx, ctx->Astar[0]};
  double lem = 0.0;
  for (double t : {0.25, 0.5, 1.0}) {
    auto E = heat_semigroup(ctx, t);
    Mat r1 = derivation(E, A).m - (std::exp(2 * t * cfg.lambda) - 1) * (A * E).m;
    Mat r2 = derivation(E, As).m - (std::exp(-2 * t * cfg.lambda) - 1) * (As * E).m;
    lem = std::max({lem, interior_max_abs(*ctx, r1, 2), interior_max_abs(*ctx, r2, 2)});
  }
  s.add("heat_semigroup_commutators", "[E_t, A] and [E_t, A*] rules, interior block", lem, 1e-10);

  double num = 0.0;
  for (const auto& mu : fam.order) {
    double ev = cfg.lambda * std::sinh(cfg.lambda) * (2.0 * total_degree(mu) + 2 * cfg.n);
    Mat r = number_operator(ctx, fam.at(mu)).m - ev * fam.at(mu).m;
    num = std::max(num, interior_hs(*ctx, r, ctx->interior_margin + total_degree(mu) + 1) / ev);
  }
  s.add("number_operator_spectrum", "number operator eigenvalues (lambda sinh lambda)(2|mu|+2n)", num, 1e-7);
}

void suite_weyl(const RunConfig& cfg, std::vector<Check>& out) {
  Suite s{cfg, "weyl", out};
  const double lam = cfg.lambda;
  auto ctx = build_context(lam, cfg.n, cfg.N);
  auto quad = gauss_hermite_rule(cfg.quad_order);
  Mat W = weyl(ctx, heat_kernel_function(0.5, lam, 1), quad).m;
  double kappa = std::sqrt(lam / (2 * kPi));
  s.add("heat_kernel", "W(p_t) = (lambda/2 pi)^{n/2} e^{-tH}", max_abs(W - kappa * heat_semigroup(ctx, 0.5).m) / kappa,
        1e-8);
  auto P = weyl(ctx, psi({0, 0}, lam).function(), quad);
  s.add("plancherel_psi0", "W unitary onto S_2 with the (lambda/2 pi)^{n/2} normalization",
        std::abs(hs_inner(P, P).real() - 1.0), 1e-6);

  std::mt19937 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> ud(-1.5, 1.5);
  std::vector<PhasePoint> pts;
  for (int k = 0; k < 10; ++k) pts.push_back({{cplx(ud(rng))}, {cplx(ud(rng))}});
  double inv = 0.0;
  for (const auto& mu : indices_up_to(2, std::min(cfg.M, 2))) {
    auto ps = psi(mu, lam);
    auto vals = weyl_inverse(ctx, weyl(ctx, ps.function(), quad), pts, quad);
    double sup = 0.0, err = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      double xu[2] = {pts[k].a[0].real(), pts[k].b[0].real()};
      sup = std::max(sup, std::abs(ps.at(xu)));
      err = std::max(err, std::abs(vals[k] - ps.at(xu)));
    }
    inv = std::max(inv, err / sup);
  }
  s.add("weyl_inverse", "f recovered from tr(pi(xi)^* W f)", inv, 1e-5);

  auto conv_quad = gauss_hermite_rule(40);
  auto p = heat_kernel_function(0.5, lam, 1);
  double tc = 0.0;
  for (int k = 0; k < 5; ++k) {
    cplx z[2] = {ud(rng), ud(rng)};
    tc = std::max(tc, rel_err(twisted_convolution(lam, p, p, z, conv_quad),
                              heat_kernel_twisted(1.0, lam, std::span<const cplx>(z, 2)), 1e-300));
  }
  s.add("twisted_heat_semigroup", "p_s *_lambda p_t = p_{s+t}", tc, 1e-7);
  auto audit = twisted_convolution_constant(ctx, quad, gauss_hermite_rule(24));
  s.add("twisted_convolution_constant", "W(f *_lambda g) = (2 pi/lambda)^{n/2} W(f) W(g)",
        std::max(std::abs(audit.measured - audit.expected) / audit.expected, audit.max_rel_err), 1e-6);
}

void suite_bargmann(const RunConfig& cfg, std::vector<Check>& out) {
  Suite s{cfg, "bargmann", out};
  const double lam = cfg.lambda;
  auto ctx = build_context(lam, cfg.n, cfg.N);
  DeformationMap d = deformation_map(lam, 1);
  const double a = a_n_lambda(1, lam);
  std::mt19937 rng(cfg.seed + 2);
  auto pts = draw_points(rng, 10, 0.8);

  QuadratureRule q32 = gauss_hermite_rule(32);
  double tb = 0.0;
  for (const auto& mu : indices_up_to(2, std::min(cfg.M, 3))) {
    PhaseFunction f = psi(mu, lam).function();
    for (const auto& p : pts)
      tb = std::max(tb, rel_err(bargmann_twisted(lam, f, p, q32), a * zeta_mu(mu, d.apply(p).flat()), 1e-2));
  }
  s.add("twisted_bargmann_psi", "B_lambda Psi_mu = a_{n,lambda} zeta_mu o sigma_lambda", tb, 1e-5);

  FockRule rule = fock_rule(lam, 1, std::min(cfg.quad4_order, 16));
  double iso = 0.0;
  auto idx = indices_up_to(2, 2);
  std::vector<std::vector<cplx>> vals(idx.size());
  for (std::size_t m = 0; m < idx.size(); ++m) {
    MultiIndex mu = idx[m];
    HoloFunction F = [mu](std::span<const cplx> w) { return zeta_mu(mu, w); };
    for (const auto& p : rule.points) vals[m].push_back(t_lambda(F, d, p));
  }
  for (std::size_t m = 0; m < idx.size(); ++m)
    for (std::size_t k = 0; k < idx.size(); ++k) {
      cplx sum = 0.0;
      for (std::size_t i = 0; i < rule.points.size(); ++i) sum += rule.weights[i] * vals[m][i] * std::conj(vals[k][i]);
      iso = std::max(iso, std::abs(sum - (m == k ? 1.0 : 0.0)));
    }
  s.add("t_lambda_isometry", "T_lambda isometric from classical Fock space onto F^lambda", iso, 2e-3);

  double ker = 0.0;
  auto pb = draw_points(rng, 10, 1.2);
  for (int i = 0; i < 10; ++i) {
    const FockPoint &zp = pts[i], &z = pb[i];
    FockPoint sp = d.apply(zp), sz = d.apply(z);
    cplx lhs = std::exp(0.5 * (sp.z[0] * std::conj(sz.z[0]) + sp.w[0] * std::conj(sz.w[0])));
    FockPoint zb{{std::conj(z.z[0])}, {std::conj(z.w[0])}};
    cplx dot = zp.z[0] * zb.z[0] + zp.w[0] * zb.w[0];
    cplx rhs = std::exp(0.5 * lam / std::tanh(lam) * dot) * std::exp(-cplx(0, 0.5 * lam) * fock_bracket(zp, zb));
    ker = std::max(ker, rel_err(lhs, rhs, 1e-300));
  }
  s.add("kernel_identity", "e^{sigma(z') . conj sigma(z)/2} in twisted form", ker, 1e-10);

  double dc = calibrate_d(lam);
  s.add("kernel_normalization", "reproducing kernel constant d = c_{n,lambda}",
        std::abs(dc - c_n_lambda(1, lam)) / c_n_lambda(1, lam), 1e-8);

  auto quad = gauss_hermite_rule(cfg.quad_order);
  auto fam = family_ladder(ctx, std::min(cfg.M, 3));
  double gb = 0.0;
  for (const auto& mu : fam.order)
    for (int i = 0; i < 3; ++i)
      gb = std::max(gb, rel_err(gauss_bargmann(ctx, fam.at(mu), pts[i], quad), a * zeta_mu(mu, d.apply(pts[i]).flat()),
                                1e-2));
  s.add("gauss_bargmann_family", "G(S_mu) = B_lambda Psi_mu", gb, 1e-6);
}

void suite_fourier(const RunConfig& cfg, std::vector<Check>& out) {
  Suite s{cfg, "fourier", out};
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  auto quad = gauss_hermite_rule(cfg.quad_order);
  const int Mf = fourier_family_order(cfg);
  auto fam = family_ladder(ctx, Mf);
  std::mt19937 rng(cfg.seed + 3);
  // a Gram defect g perturbs F by at most 2 g per family member; F^4 compounds it
  const double slack = 8.0 * fam.order.size() * truncation_floor(ctx, Mf);

  double eig = 0.0;
  for (const auto& mu : fam.order)
    eig = std::max(eig, max_abs(fourier_series(fam, fam.at(mu)).m - mip(total_degree(mu)) * fam.at(mu).m));
  s.add("eigen_series", "F S_mu = (-i)^{|mu|} S_mu", eig, 1e-9, slack);
  double f4 = 0.0, pl = 0.0;
  for (int k = 0; k < 3; ++k) {
    TruncatedOperator T = random_span(fam, rng), F = T;
    for (int r = 0; r < 4; ++r) F = fourier_series(fam, F);
    f4 = std::max(f4, max_abs(F.m - T.m));
    TruncatedOperator FT = fourier_series(fam, T);
    pl = std::max(pl, std::abs(hs_inner(FT, FT) - hs_inner(T, T)));
  }
  s.add("fourth_power", "F^4 = I", f4, 1e-8, slack);
  s.add("plancherel", "F unitary on S_2", pl, 1e-8, slack);

  const std::string gen_anchor = "generating function sum (-i)^{|mu|} zeta_mu S_mu";
  if (Mf < 6) {
    s.skip("generating_function_m6", gen_anchor, 1e-4);
    s.skip("generating_monotone", gen_anchor, 0.0);
    s.skip("generating_ratio", gen_anchor, 1e-3);
  } else {
    auto pts = draw_points(rng, 5, 0.25);  // |zeta| <= 1/2
    double worst = 0.0, mono = 0.0, ratio = 0.0;
    for (const auto& p : pts) {
      double r2 = generating_check(fam, p, 2).residual, r4 = generating_check(fam, p, 4).residual;
      GeneratingResult g6 = generating_check(fam, p, 6);
      worst = std::max(worst, g6.residual);
      if (!(r2 > r4 && r4 > g6.residual)) mono += 1.0;
      ratio = std::max(ratio, std::abs(g6.measured_ratio / g6.expected_ratio - 1.0));
    }
    s.add("generating_function_m6", gen_anchor, worst, 1e-4);
    s.add("generating_monotone", "partial-sum residual decreasing in M", mono, 0.0);
    s.add("generating_ratio", "normalization ratio (lambda/2 pi)^{n/2}", ratio, 1e-3);
  }

  const std::string int_anchor = "F T as the integral of G(T) against the Fock kernel";
  if (cfg.N < 32) {
    s.skip("integral_route", int_anchor, 5e-3);
  } else {
    double ir = 0.0;
    for (const auto& mu : indices_up_to(2, 2)) {
      TruncatedOperator I = fourier_integral(ctx, fam.at(mu), cfg.quad4_order, quad);
      ir = std::max(ir, (I.m - fourier_series(fam, fam.at(mu)).m).norm());
    }
    s.add("integral_route", int_anchor, ir, 5e-3);
  }

  const double inf = std::numeric_limits<double>::infinity();
  double hy = 0.0;
  for (int k = 0; k < 3; ++k) {
    TruncatedOperator T = random_span(fam, rng), FT = fourier_series(fam, T);
    for (double p : {1.0, 1.25, 1.5, 2.0}) {
      double pp = p == 1.0 ? inf : p / (p - 1.0);
      hy = std::max(hy, schatten_norm(FT, pp) - schatten_norm(T, p));
    }
  }
  s.add("hausdorff_young", "||F T||_{p'} <= ||T||_p, 1 <= p <= 2", std::max(hy, 0.0), 1e-8);

  cplx c(0.7, 0.3);
  HardyResult h = hardy_check(fam, c * heat_semigroup(ctx, 0.5), std::norm(c));
  double hr = std::max(0.0, -std::min(h.min_eig_T, h.min_eig_FT));
  s.add("hardy_gaussian", "c e^{-H/2} satisfies both Hardy bounds", h.pass ? hr : std::max(hr, 1.0), 1e-12, slack);
  HardyResult bad = hardy_check(fam, fam.at({1, 0}), 0.1);
  s.add("hardy_counterexample", "S_{e_1} with C = 0.1 violates a Hardy bound", bad.pass ? 1.0 : 0.0, 0.0);

  TruncatedOperator T = cplx(0.5, 0.1) * fam.at({0, 0}) + cplx(-0.2, 0.4) * fam.at({1, 0});
  TruncatedOperator FT = fourier_series(fam, T);
  double uc = 0.0;
  for (const auto& p : draw_points(rng, 5, 0.5)) {
    FockPoint m{{cplx(0, -1) * p.z[0]}, {cplx(0, -1) * p.w[0]}};
    uc = std::max(uc, rel_err(gauss_bargmann(ctx, FT, p, quad), gauss_bargmann(ctx, T, m, quad), 1e-2));
  }
  s.add("u_conjugation", "G(F T)(zeta) = G(T)(-i zeta)", uc, 1e-4);
}

void suite_radial(const RunConfig& cfg, std::vector<Check>& out) {
  Suite s{cfg, "radial", out};
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  auto quad = gauss_hermite_rule(cfg.quad_order);
  const int Mf = fourier_family_order(cfg);
  auto fam = family_ladder(ctx, Mf);
  const int K = std::min(3, Mf / 2);
  const double slack = 8.0 * fam.order.size() * truncation_floor(ctx, Mf);
  std::vector<TruncatedOperator> P;
  for (int k = 0; k <= K; ++k) P.push_back(laguerre_projector(ctx, k, quad));
  double off = 0.0, orth = 0.0, fs_ = 0.0;
  for (int k = 0; k <= K; ++k) {
    Mat o = P[k].m;
    o.diagonal().setZero();
    off = std::max(off, max_abs(o));
    for (int j = 0; j <= K; ++j) orth = std::max(orth, std::abs(hs_inner(P[j], P[k]) - (j == k ? 1.0 : 0.0)));
    fs_ = std::max(fs_, max_abs(fourier_series(fam, P[k]).m - (k % 2 ? -1.0 : 1.0) * P[k].m));
  }
  s.add("projector_diagonal", "P_{k,lambda} diagonal in the Hermite basis", off, 1e-8);
  s.add("projector_orthonormal", "P_{k,lambda} orthonormal in S_2", orth, 1e-6);
  s.add("fourier_sign", "F P_{k,lambda} = (-1)^k P_{k,lambda}", fs_, 1e-7, slack);

  RadialCheck h = radial_check(fam, heat_semigroup(ctx, 1.0), 1e-7, quad);
  s.add("heat_semigroup_radial", "m(H) is radial",
        std::max({h.max_odd, h.max_nonparallel, h.max_offdiag}), 1e-7);
  RadialCheck e1 = radial_check(fam, fam.at({1, 0}), 1e-7, quad);
  s.add("odd_rejected", "S_{e_1} is not radial", e1.radial ? 1.0 : 0.0, 0.0);
  if (K >= 1) {
    RadialProfile prof = radial_decompose(fam, P[1], K, quad);
    s.add("decomposition", "T = sum R_k P_{k,lambda}", prof.residual, 1e-8);
  }
}

NOPoly random_poly(double lam, int n, std::mt19937& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), kind(0, 4), idx(1, n);
  std::normal_distribution<double> nd;
  NOPoly p(lam, n);
  for (int t = 0; t < 4; ++t) {
    Word w;
    int L = len(rng);
    for (int k = 0; k < L; ++k) {
      int kd = kind(rng);
      if (kd < 2) w.push_back(Symbol::annihilate(idx(rng)));
      else if (kd < 4) w.push_back(Symbol::create(idx(rng)));
      else w.push_back(Symbol::semigroup(0.25));
    }
    p.add_term(w, cplx(nd(rng), nd(rng)));
  }
  return p;
}

bool same_keys(const NOPoly& a, const NOPoly& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [w, c] : a.terms())
    if (!b.terms().count(w)) return false;
  return true;
}

void suite_symbolic(const RunConfig& cfg, std::vector<Check>& out) {
  Suite s{cfg, "symbolic", out};
  std::mt19937 gen(cfg.seed + 4);
  double conf = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    NOPoly p = random_poly(cfg.lambda, cfg.n, gen, 6);
    NOPoly ref = normal_order(p);
    for (int k = 0; k < 50; ++k) {
      std::mt19937 rng(cfg.seed * 7919u + 1000u * trial + k);
      NOPoly q = normal_order(p, &rng);
      conf = std::max(conf, same_keys(ref, q) ? term_distance(ref, q) : 1.0);
    }
  }
  s.add("confluence", "normal form independent of rewrite order", conf, 1e-12);

  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  auto fl = family_ladder(ctx, cfg.M);
  auto fsym = family_symbolic(ctx, cfg.M);
  double ps = 0.0;
  for (const auto& mu : fl.order) ps = std::max(ps, max_abs(fl.at(mu).m - fsym.at(mu).m));
  s.add("p_mu_vs_ladder", "S_mu = p_mu(A, A*) e^{-H/2}", ps, 1e-9);

  double der = 0.0;
  for (int k = 0; k < 3; ++k) {
    NOPoly p = normal_order(random_poly(cfg.lambda, cfg.n, gen, 3));
    for (int j = 1; j <= 2 * cfg.n; ++j)
      der = std::max(der, interior_max_abs(*ctx, evaluate(apply_derivation(j, p), ctx).m -
                                                     d_operator(ctx, j, evaluate(p, ctx)).m,
                                           6));
  }
  s.add("derivation_action", "symbolic D_j matches the matrix D_j, interior block", der, 1e-9);

  double rt = 0.0;
  for (const auto& mu : indices_up_to(2 * cfg.n, std::min(cfg.M, 3))) {
    NOPoly p = p_mu(cfg.lambda, cfg.n, mu);
    rt = std::max(rt, term_distance(p, parse_nopoly(to_string(p), cfg.lambda, cfg.n)));
  }
  s.add("text_round_trip", "parse(to_string(p_mu)) = p_mu", rt, 1e-12);
}

using SuiteFn = std::function<void(const RunConfig&, std::vector<Check>&)>;

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> t = {
      {"ladder", suite_ladder},   {"weyl", suite_weyl},     {"bargmann", suite_bargmann},
      {"fourier", suite_fourier}, {"radial", suite_radial}, {"symbolic", suite_symbolic}};
  return t;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

TruncatedOperator load_operator(const ContextPtr& ctx, const std::string& path) {
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("input: ") + e.what());
  }
  try {
    return operator_from_json(j, ctx);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("input: malformed operator JSON: ") + e.what());
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, f] : suite_table()) v.push_back(n);
    v.push_back("all");
    return v;
  }();
  return names;
}

VerifyReport run_verify(const RunConfig& cfg, const std::string& suite) {
  cfg.validate();
  VerifyReport r;
  r.suite = suite;
  r.config = cfg.to_json();
  bool found = false;
  for (const auto& [name, fn] : suite_table())
    if (suite == "all" || suite == name) {
      found = true;
      fn(cfg, r.checks);
    }
  if (!found) throw ConfigError("unknown suite " + suite);
  return r;
}

// ---- commands ----

int cmd_basis(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  auto fam = family_ladder(ctx, cfg.M);
  std::string dir = (fs::path(cfg.out_dir) / "family").string();
  fs::create_directories(dir);
  export_family(fam, dir);
  FamilyAudit a = audit_family(fam);
  log << "family: " << fam.order.size() << " operators written to " << dir << "\n";
  log << "gram_max_err " << a.gram_max_err << " kappa0 " << a.kappa0 << "\n";
  const double tol = cfg.tol("basis.gram_max_err", 1e-9);
  if (!(a.gram_max_err <= tol)) {
    log << "FAIL: gram_max_err exceeds " << tol << "\n";
    return kVerifyFail;
  }
  return kPass;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& log) {
  VerifyReport r = run_verify(cfg, suite);
  std::string path = (fs::path(cfg.out_dir) / ("verify_" + suite + ".json")).string();
  write_json_file(path, r.to_json());
  for (const auto& c : r.checks) {
    log << c.status << " " << c.suite << "." << c.name;
    if (c.residual) log << " residual " << *c.residual << " tol " << c.tolerance;
    log << "\n";
  }
  log << "report: " << path << "\n";
  return r.passed() ? kPass : kVerifyFail;
}

int cmd_fourier(const RunConfig& cfg, const std::string& input, std::ostream& log) {
  cfg.validate();
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  TruncatedOperator T = load_operator(ctx, input);
  auto fam = family_ladder(ctx, cfg.M);
  const std::string id = stem_of(input);
  FourierReport rep = fourier_report(fam, T, id);
  fs::path base = fs::path(cfg.out_dir) / ("fourier_" + id);
  write_json_file(base.string() + ".json", operator_to_json(rep.output));
  write_json_file(base.string() + "_report.json", rep.to_json());
  log << "output: " << base.string() << ".json\n";
  for (const auto& [k, v] : rep.residuals) log << k << " " << v << "\n";
  return kPass;
}

int cmd_radial(const RunConfig& cfg, const std::string& input, int k_max, std::ostream& log) {
  cfg.validate();
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  TruncatedOperator T = load_operator(ctx, input);
  auto fam = family_ladder(ctx, cfg.M);
  auto quad = gauss_hermite_rule(cfg.quad_order);
  if (k_max < 0) k_max = cfg.N / 4;
  if (4 * k_max > cfg.N) throw ConfigError("k_max must not exceed N/4");
  const double tol = cfg.tol("radial.tolerance", 1e-7);
  RadialCheck chk = radial_check(fam, T, tol, quad);
  const std::string id = stem_of(input);
  std::string path = (fs::path(cfg.out_dir) / ("radial_" + id + ".json")).string();
  nlohmann::json j;
  j["input"] = id;
  j["radial"] = chk.radial;
  j["max_odd"] = chk.max_odd;
  j["max_nonparallel"] = chk.max_nonparallel;
  j["max_offdiag"] = chk.max_offdiag;
  if (!chk.radial) {
    j["witness"] = chk.witness;
    write_json_file(path, j);
    log << "not radial: " << chk.witness << "\n";
    return kDomain;
  }
  RadialProfile prof = radial_decompose(fam, T, k_max, quad, tol);
  const nlohmann::json pj = prof.to_json();
  for (const auto& [k, v] : pj.items()) j[k] = v;
  write_json_file(path, j);
  log << "radial; profile written to " << path << " residual " << prof.residual << "\n";
  return kPass;
}

int cmd_bargmann_eval(const RunConfig& cfg, const std::string& input, const std::string& points,
                      std::ostream& log) {
  cfg.validate();
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  TruncatedOperator T = load_operator(ctx, input);
  auto quad = gauss_hermite_rule(cfg.quad_order);
  std::vector<FockPoint> pts;
  if (points.empty()) {
    std::mt19937 rng(cfg.seed);
    pts = draw_points(rng, 10, 0.5);
  } else {
    nlohmann::json j;
    try {
      j = read_json_file(points);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("points: ") + e.what());
    }
    if (!j.is_array()) throw ConfigError("points must be an array of [re_z, im_z, re_w, im_w]");
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 4) throw ConfigError("points must be an array of [re_z, im_z, re_w, im_w]");
      pts.push_back({{cplx(p[0].get<double>(), p[1].get<double>())}, {cplx(p[2].get<double>(), p[3].get<double>())}});
    }
  }
  std::vector<cplx> vals;
  for (const auto& p : pts) vals.push_back(gauss_bargmann(ctx, T, p, quad));
  std::string path = (fs::path(cfg.out_dir) / ("bargmann_" + stem_of(input) + ".csv")).string();
  write_text_file(path, bargmann_csv(pts, vals));
  log << pts.size() << " values written to " << path << "\n";
  return kPass;
}

int cmd_symbolic(const RunConfig& cfg, const std::string& mu_text, std::ostream& log) {
  cfg.validate();
  MultiIndex mu;
  std::stringstream ss(mu_text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      mu.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("mu must be a comma-separated list of non-negative integers");
    }
  }
  if (static_cast<int>(mu.size()) != 2 * cfg.n) throw ConfigError("mu must have 2n entries");
  if (4 * total_degree(mu) > cfg.N) throw ConfigError("|mu| must not exceed N/4");
  NOPoly p = p_mu(cfg.lambda, cfg.n, mu);
  std::string text = to_string(p);
  auto ctx = build_context(cfg.lambda, cfg.n, cfg.N);
  TruncatedOperator S = evaluate(p, ctx) * heat_semigroup(ctx, 0.5);
  auto fam = family_ladder(ctx, total_degree(mu));
  double diff = max_abs(S.m - fam.at(mu).m);
  fs::path base = fs::path(cfg.out_dir) / ("p_mu_" + mi_to_string(mu));
  write_text_file(base.string() + ".txt", text + "\n");
  write_json_file(base.string() + ".json", operator_to_json(S));
  log << text << "\n";
  log << "terms " << p.size() << " max |p_mu e^{-H/2} - S_mu| " << diff << "\n";
  const double tol = cfg.tol("symbolic.p_mu_vs_ladder", 1e-9);
  return diff <= tol ? kPass : kVerifyFail;
}

}  // namespace qherm::cli
