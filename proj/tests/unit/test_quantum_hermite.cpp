#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "qherm/quantum_hermite.hpp"

using namespace qherm;

namespace {

double max_abs(const Mat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

Mat random_unit(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Mat M(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) M(r, c) = cplx(nd(rng), nd(rng));
  return M / M.norm();
}

}  // namespace

TEST_CASE("psi examples") {
  const double lam = 1.0;
  double c = dilation_c(lam);
  double zero[2] = {0.0, 0.0};
  CHECK(psi({0, 0}, lam).at(zero) == doctest::Approx(std::sqrt(c / kPi)).epsilon(1e-14));

  // lambda -> 0 limit: Psi_mu^0 = Phi_mu
  double pt[2] = {0.4, -0.9};
  for (const auto& mu : indices_up_to(2, 3)) {
    double a = psi(mu, 1e-6).at(pt);
    double b = hermite_eval(mu[0], pt[0]) * hermite_eval(mu[1], pt[1]);
    CHECK(std::abs(a - b) <= 1e-5 * std::max(1e-3, std::abs(b)));
  }

  // complex evaluation agrees with the real one on the real axis
  cplx zc[2] = {0.4, -0.9};
  CHECK(std::abs(psi({2, 1}, 0.7)(zc) - psi({2, 1}, 0.7).at(pt)) <= 1e-14);

  // orthonormality by quadrature, |mu| <= 6
  for (double l : {0.5, 2.0}) {
    auto q = gauss_hermite_rule(30);
    double cc = dilation_c(l), s = 1.0 / std::sqrt(cc);
    auto idx = indices_up_to(2, 6);
    std::vector<std::vector<double>> vals(idx.size());
    std::vector<double> w;
    for (int i = 0; i < q.order; ++i)
      for (int k = 0; k < q.order; ++k) {
        double p[2] = {s * q.nodes[i], s * q.nodes[k]};
        w.push_back(q.weights[i] * q.weights[k] * std::exp(q.nodes[i] * q.nodes[i] + q.nodes[k] * q.nodes[k]) * s * s);
        for (std::size_t m = 0; m < idx.size(); ++m) vals[m].push_back(psi(idx[m], l).at(p));
      }
    double worst = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) {
        double g = 0.0;
        for (std::size_t t = 0; t < w.size(); ++t) g += w[t] * vals[a][t] * vals[b][t];
        worst = std::max(worst, std::abs(g - (a == b)));
      }
    CHECK(worst <= 1e-9);
  }
  CHECK_THROWS(psi({1, 2, 3}, 1.0));
}

TEST_CASE("psi0 constant audit") {
  for (double l : {0.5, 1.0, 2.0}) CHECK(psi0_constant_ratio(l, 1) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));
  CHECK(psi0_constant_ratio(1.0, 2) == doctest::Approx(kPi).epsilon(1e-10));
}

TEST_CASE("s_base") {
  auto ctx = build_context(1.0, 1, 32);
  CHECK(s_base_kappa(ctx) == doctest::Approx(std::sqrt(2 * std::sinh(1.0))).epsilon(1e-12));
  CHECK(std::abs(s_base_kappa(ctx) - 1.5329) < 1e-3);
  auto S0 = s_base(ctx);
  CHECK(std::abs(hs_inner(S0, S0) - 1.0) <= 1e-12);
  auto W = weyl(ctx, psi({0, 0}, 1.0).function(), gauss_hermite_rule(64));
  CHECK(max_abs(S0.m - W.m) <= 1e-7);
}

TEST_CASE("ladder maps") {
  for (double lam : {0.5, 1.0, 2.0}) {
    auto ctx = build_context(lam, 1, 32);
    auto fam = family_ladder(ctx, 5);
    const double ls = ladder_scale(lam);
    for (const auto& mu : indices_up_to(2, 4)) {
      for (int j = 1; j <= 2; ++j) {
        MultiIndex up = mu;
        ++up[j - 1];
        Mat r = ladder_raise(ctx, j, fam.at(mu)).m;
        Mat ref = ls * std::sqrt(2.0 * mu[j - 1] + 2.0) * fam.at(up).m;
        int margin = ctx->interior_margin + total_degree(mu) + 1;
        CHECK(interior_max_abs(*ctx, r - ref, margin) <= 1e-8 * max_abs(ref));
        if (mu[j - 1] > 0) {
          MultiIndex dn = mu;
          --dn[j - 1];
          Mat l = ladder_lower(ctx, j, fam.at(mu)).m;
          Mat lref = ls * std::sqrt(2.0 * mu[j - 1]) * fam.at(dn).m;
          CHECK(interior_max_abs(*ctx, l - lref, margin) <= 1e-8 * max_abs(lref));
        }
      }
    }
    auto S0 = fam.at({0, 0});
    for (int j = 1; j <= 2; ++j) {
      CHECK(interior_max_abs(*ctx, ladder_lower(ctx, j, S0).m, 2) <= 1e-8);
      Mat ll = ladder_lower(ctx, j, ladder_raise(ctx, j, S0)).m - 2 * lam * std::sinh(lam) * S0.m;
      CHECK(interior_max_abs(*ctx, ll, 3) <= 1e-7 * 2 * lam * std::sinh(lam) * max_abs(S0.m));
    }
  }
  auto ctx = build_context(1.0, 1, 8);
  CHECK_THROWS_AS(ladder_raise(ctx, 3, identity_op(ctx)), std::out_of_range);
}

TEST_CASE("ladder_lower is the explicit HS adjoint of ladder_raise") {
  for (int n : {1, 2}) {
    auto ctx = build_context(0.8, n, 8);
    const int d = ctx->dim, D = d * d;
    for (int j = 1; j <= 2 * n; ++j) {
      // matrix of T -> raise(T) on vec(T), column-major
      Mat L(D, D), Lstar(D, D);
      for (int k = 0; k < D; ++k) {
        Mat E = Mat::Zero(d, d);
        E(k % d, k / d) = 1.0;
        Mat r = ladder_raise(ctx, j, {ctx, E}).m, l = ladder_lower(ctx, j, {ctx, E}).m;
        L.col(k) = Eigen::Map<Eigen::VectorXcd>(r.data(), D);
        Lstar.col(k) = Eigen::Map<Eigen::VectorXcd>(l.data(), D);
      }
      CHECK(max_abs(Lstar - L.adjoint()) <= 1e-12);
    }
  }
}

TEST_CASE("ladder family: Gram, path independence, headroom") {
  auto ctx = build_context(1.0, 1, 32);
  auto fam = family_ladder(ctx, 4);
  CHECK(fam.order.size() == 15);
  CHECK(fam.gram_max_err() <= 1e-9);
  for (int k = 0; k < 3; ++k) {
    Mat a = raise_along(ctx, {1, 2}).m, b = raise_along(ctx, {2, 1}).m;
    CHECK(max_abs(a - b) <= 1e-10);
  }
  CHECK(max_abs(raise_along(ctx, {1, 1, 2, 2}).m - raise_along(ctx, {2, 1, 2, 1}).m) <= 1e-10);
  CHECK(max_abs(raise_along(ctx, {1, 2}).m - fam.at({1, 1}).m) <= 1e-10);
  for (double lam : {0.5, 2.0}) {
    auto c = build_context(lam, 1, 32);
    auto f = family_ladder(c, 4);
    MESSAGE("lambda=" << lam << " ladder Gram err (full) " << f.gram_max_err());
    CHECK(f.gram_max_err() <= (lam == 2.0 ? 1e-9 : 1e-7));
    CHECK(max_abs(raise_along(c, {1, 2}).m - raise_along(c, {2, 1}).m) <= 1e-10);
  }
  CHECK_THROWS_AS(family_ladder(ctx, 9), HeadroomError);
  // recursion inside the N-block: exact away from the edge band
  auto raw = family_ladder(ctx, 4, 0);
  CHECK(raw.gram_max_err() <= 1e-9);
  for (const auto& mu : raw.order)
    CHECK(interior_max_abs(*ctx, raw.at(mu).m - fam.at(mu).m, 2 + total_degree(mu)) <= 1e-12);

  auto c2 = build_context(1.0, 2, 8);
  auto f2 = family_ladder(c2, 2);
  CHECK(f2.order.size() == 15);
  CHECK(max_abs(raise_along(c2, {1, 3}).m - raise_along(c2, {3, 1}).m) <= 1e-10);
}

TEST_CASE("three constructions agree") {
  auto quad = gauss_hermite_rule(64);
  for (double lam : {0.5, 1.0, 2.0}) {
    auto ctx = build_context(lam, 1, 32);
    auto fl = family_ladder(ctx, 4);
    auto fq = family_quadrature(ctx, 4, quad);
    auto fs = family_symbolic(ctx, 4);
    double lq = 0, ls = 0, qs = 0;
    for (const auto& mu : fl.order) {
      lq = std::max(lq, max_abs(fl.at(mu).m - fq.at(mu).m));
      ls = std::max(ls, max_abs(fl.at(mu).m - fs.at(mu).m));
      qs = std::max(qs, max_abs(fq.at(mu).m - fs.at(mu).m));
    }
    CHECK(lq <= 1e-6);
    CHECK(ls <= 1e-6);
    CHECK(qs <= 1e-6);
    CHECK(fq.gram_max_err() <= 1e-6);
    MESSAGE("lambda=" << lam << " ladder-quad " << lq << " ladder-sym " << ls << " quad-sym " << qs);
  }
  auto ctx = build_context(1.0, 1, 32);
  CHECK_THROWS_AS(family_quadrature(ctx, 2, gauss_hermite_rule(40)), QuadratureError);
}

TEST_CASE("quadrature family: S_0 is diagonal with ratio e^{-lambda}") {
  auto ctx = build_context(1.0, 1, 32);
  auto fq = family_quadrature(ctx, 1, gauss_hermite_rule(64));
  Mat S0 = fq.at({0, 0}).m;
  Mat off = S0;
  off.diagonal().setZero();
  CHECK(max_abs(off) <= 1e-8);
  for (int k = 0; k < 10; ++k) CHECK(std::abs(S0(k + 1, k + 1) / S0(k, k) - std::exp(-1.0)) <= 1e-8);
}

TEST_CASE("number operator") {
  for (double lam : {0.5, 1.0, 2.0}) {
    auto ctx = build_context(lam, 1, 32);
    auto fam = family_ladder(ctx, 4);
    for (const auto& mu : fam.order) {
      double ev = lam * std::sinh(lam) * (2.0 * total_degree(mu) + 2);
      Mat r = number_operator(ctx, fam.at(mu)).m - ev * fam.at(mu).m;
      int margin = ctx->interior_margin + total_degree(mu) + 1;
      CHECK(interior_hs(*ctx, r, margin) <= 1e-7 * ev);
      if (lam == 1.0) CHECK(r.norm() <= 1e-7 * ev);
    }
    TruncatedOperator S{ctx, random_unit(32, 1)}, T{ctx, random_unit(32, 2)};
    cplx a = hs_inner(number_operator(ctx, S), T), b = hs_inner(S, number_operator(ctx, T));
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    Mat lin = number_operator(ctx, S * 2.0 + T).m - 2.0 * number_operator(ctx, S).m - number_operator(ctx, T).m;
    CHECK(max_abs(lin) <= 1e-12 * max_abs(number_operator(ctx, T).m));
  }
}

TEST_CASE("sobolev norm") {
  auto ctx = build_context(1.0, 1, 32);
  auto fam = family_ladder(ctx, 4);
  auto S = fam.at({1, 2});
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    auto r = sobolev_norm(fam, S, s);
    CHECK(std::abs(r.norm - std::pow(8.0, s / 2)) <= 1e-7 * std::pow(8.0, s / 2));
  }
  TruncatedOperator T{ctx, random_unit(32, 7)};
  auto r0 = sobolev_norm(fam, T, 0.0);
  CHECK(r0.norm <= hs_norm(T) + 1e-14);
  CHECK(r0.residual_mass > 0);
  // monotone in s for a unit vector in the high-eigenvalue span
  TruncatedOperator U = (fam.at({2, 0}) + fam.at({0, 3})) * cplx(1.0 / std::sqrt(2.0));
  double prev = 0.0;
  for (double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    double v = sobolev_norm(fam, U, s).norm;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("schwartz decay report") {
  const double lam = 1.0;
  auto ctx = build_context(lam, 1, 32);
  auto fam = family_ladder(ctx, 8);
  auto r0 = schwartz_decay_report(fam, fam.at({0, 0}), 4);
  for (double c : r0.c_k) CHECK(std::isfinite(c));
  for (auto [d, a] : r0.level)
    if (d > 0) CHECK(a <= 1e-9);

  auto quad = gauss_hermite_rule(96);
  auto smooth = weyl(ctx, psi({0, 0}, 2 * lam).function(), quad);
  PhaseFunction trunc;
  trunc.n = 1;
  trunc.decay = 0.5;
  trunc.x_half_width = 1.0;
  trunc.f = [](std::span<const cplx> xu) {
    if (std::abs(xu[0].real()) > 1.0) return cplx(0.0);
    return std::exp(-0.5 * (xu[0] * xu[0] + xu[1] * xu[1]));
  };
  auto rough = weyl(ctx, trunc, quad);
  auto rs = schwartz_decay_report(fam, smooth, 4), rr = schwartz_decay_report(fam, rough, 4);
  MESSAGE("slopes smooth " << rs.slope << " rough " << rr.slope);
  CHECK(rs.slope < 0);
  CHECK(rs.slope < rr.slope - 2.0);
}

TEST_CASE("completeness, Parseval, trace-class decay, gamma inner product") {
  const double lam = 1.0;
  auto ctx = build_context(lam, 1, 32);
  auto quad = gauss_hermite_rule(64);
  auto fam = family_ladder(ctx, 6);
  // f in span{Psi_mu : |mu| <= 4}
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  PhaseFunction f;
  bool first = true;
  for (const auto& mu : indices_up_to(2, 4)) {
    PhaseFunction g = scale(cplx(nd(rng), nd(rng)), psi(mu, lam).function());
    f = first ? g : add(f, g);
    first = false;
  }
  auto T = weyl(ctx, f, quad);
  double prev = 1e300;
  for (int M = 0; M <= 6; ++M) {
    Mat R = T.m;
    double mass = 0.0;
    for (const auto& mu : fam.order)
      if (total_degree(mu) <= M) {
        cplx c = hs_inner(T, fam.at(mu));
        R -= c * fam.at(mu).m;
        mass += std::norm(c);
      }
    double res = R.norm();
    CHECK(res <= prev + 1e-12);
    CHECK(mass <= std::pow(hs_norm(T), 2) * (1 + 1e-12));
    if (M == 6) {
      CHECK(res <= 1e-5 * hs_norm(T));
      CHECK(std::abs(mass - std::pow(hs_norm(T), 2)) <= 1e-6 * mass);
    }
    prev = res;
  }

  // singular values decay with ratio e^{-lambda}
  for (const auto& mu : std::vector<MultiIndex>{{0, 0}, {1, 0}, {2, 1}}) {
    Eigen::JacobiSVD<Mat> svd(fam.at(mu).m);
    auto sv = svd.singularValues();
    // singular values pair up for mu != 0, so use the mean rate over a long run
    double rate = std::pow(sv(24) / sv(4), 1.0 / 20);
    CHECK(std::abs(rate - std::exp(-lam)) <= 0.05);
  }

  // (P_mu, P_nu)_gamma = tr(P_mu e^{-H} P_nu^*) with P_mu = S_mu e^{H/2}
  Mat Einv = Mat::Zero(32, 32), E = heat_semigroup(ctx, 1.0).m;
  for (int k = 0; k < 32; ++k) Einv(k, k) = std::exp(0.5 * ctx->h_diag[k]);
  const int m = 8;
  std::vector<Mat> P;
  for (const auto& mu : indices_up_to(2, 2)) P.push_back((fam.at(mu).m * Einv).topLeftCorner(32 - m, 32 - m));
  Mat Eb = E.topLeftCorner(32 - m, 32 - m);
  int a = 0;
  for (const auto& mu : indices_up_to(2, 2)) {
    int b = 0;
    for (const auto& nu : indices_up_to(2, 2)) {
      cplx g = (P[a] * Eb * P[b].adjoint()).trace();
      cplx ref = interior_block(*ctx, fam.at(mu).m, m - 1).cwiseProduct(interior_block(*ctx, fam.at(nu).m, m - 1).conjugate()).sum();
      CHECK(std::abs(g - ref) <= 1e-7);
      ++b;
    }
    ++a;
  }
}

TEST_CASE("n = 2 families") {
  auto ctx = build_context(1.0, 2, 16);
  auto fl = family_ladder(ctx, 2);
  auto fs = family_symbolic(ctx, 2);
  auto fq = family_quadrature(ctx, 2, gauss_hermite_rule(40));
  double ls = 0, lq = 0;
  for (const auto& mu : fl.order) {
    ls = std::max(ls, max_abs(fl.at(mu).m - fs.at(mu).m));
    lq = std::max(lq, max_abs(fl.at(mu).m - fq.at(mu).m));
  }
  CHECK(ls <= 1e-6);
  CHECK(lq <= 1e-6);
  CHECK(fl.gram_max_err() <= 1e-6);
}

TEST_CASE("family export") {
  auto ctx = build_context(1.0, 1, 16);
  auto fam = family_ladder(ctx, 2);
  auto dir = std::filesystem::temp_directory_path() / "qherm_export_test";
  std::filesystem::remove_all(dir);
  export_family(fam, dir.string());
  CHECK(std::filesystem::exists(dir / "s_mu_1_1.json"));
  std::ifstream in(dir / "manifest.json");
  auto m = nlohmann::json::parse(in);
  CHECK(m["construction"] == "ladder");
  CHECK(m["M"] == 2);
  CHECK(m["audit"]["kappa0"].get<double>() == doctest::Approx(s_base_kappa(ctx)));
  CHECK(m["audit"]["normalization_ratio"].get<double>() == doctest::Approx(std::sqrt(kPi)));
  std::ifstream sj(dir / "s_mu_0_2.json");
  auto back = operator_from_json(nlohmann::json::parse(sj), ctx);
  CHECK(max_abs(back.m - fam.at({0, 2}).m) == 0.0);
  std::filesystem::remove_all(dir);
}
