#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "qherm/op_fourier.hpp"

using namespace qherm;

namespace {

struct Fixture {
  ContextPtr ctx = build_context(1.0, 1, 32);
  QuantumHermiteFamily fam = family_ladder(ctx, 6);
  QuadratureRule q = gauss_hermite_rule(64);
};

Fixture& fx() {
  static Fixture f;
  return f;
}

TruncatedOperator random_span(const QuantumHermiteFamily& fam, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  TruncatedOperator T = zero_op(fam.ctx);
  for (const auto& mu : fam.order) T.m += cplx(nd(rng), nd(rng)) * fam.at(mu).m;
  return (1.0 / hs_norm(T)) * T;
}

std::vector<FockPoint> random_points(int count, double scale, unsigned seed, bool real = false) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<FockPoint> pts;
  for (int i = 0; i < count; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    pts.push_back(real ? FockPoint{{a}, {c}} : FockPoint{{cplx(a, b)}, {cplx(c, d)}});
  }
  return pts;
}

int degree(const MultiIndex& mu) { return mu[0] + mu[1]; }

cplx mip(int k) { return std::pow(cplx(0, -1), k); }

}  // namespace

TEST_CASE("series Fourier transform") {
  auto& f = fx();
  for (const auto& mu : f.fam.order) {
    TruncatedOperator out = fourier_series(f.fam, f.fam.at(mu));
    CHECK((out.m - mip(degree(mu)) * f.fam.at(mu).m).cwiseAbs().maxCoeff() <= 1e-9);
  }
  for (unsigned s = 1; s <= 3; ++s) {
    TruncatedOperator T = random_span(f.fam, s);
    TruncatedOperator F4 = T;
    for (int k = 0; k < 4; ++k) F4 = fourier_series(f.fam, F4);
    CHECK((F4.m - T.m).cwiseAbs().maxCoeff() <= 1e-8);
    TruncatedOperator FT = fourier_series(f.fam, T);
    CHECK(std::abs(hs_inner(FT, FT) - hs_inner(T, T)) <= 1e-8);
    CHECK(fourier_tail_bound(f.fam, T) <= 1e-8);
  }
  FourierReport r = fourier_report(f.fam, f.fam.at({1, 0}), "s_mu_1_0");
  CHECK(r.residuals.at("reconstruction") <= 1e-12);
  CHECK(r.residuals.at("tail_bound") <= 1e-9);
  auto j = r.to_json();
  CHECK(j["coefficients"].size() == f.fam.order.size());
  CHECK(j["coefficients"][0].contains("mu"));
  CHECK(j["residuals"].contains("tail_bound"));
  CHECK((r.output.m - cplx(0, -1) * f.fam.at({1, 0}).m).norm() <= 1e-9);
}

TEST_CASE("G operator") {
  auto& f = fx();
  TruncatedOperator G0 = g_operator(f.ctx, FockPoint{{0.0}, {0.0}});
  CHECK((G0.m - heat_semigroup(f.ctx, 0.5).m).cwiseAbs().maxCoeff() <= 1e-10);
  QuadratureRule big = gauss_hermite_rule(160);
  for (const auto& p : random_points(5, 0.8, 3, true)) {
    TruncatedOperator Gc = g_operator(f.ctx, p);
    double n = Gc.m.norm();
    CHECK((g_operator_integral(f.ctx, p, f.q).m - Gc.m).norm() <= 1e-6 * n);
    CHECK((g_operator_product(f.ctx, p, big, 48).m - Gc.m).norm() <= 1e-10 * n);
  }
  for (const auto& p : random_points(3, 0.8, 4)) {
    TruncatedOperator Gc = g_operator(f.ctx, p);
    CHECK((g_operator_product(f.ctx, p, big, 48).m - Gc.m).norm() <= 1e-10 * Gc.m.norm());
  }
  // envelope: fit on |zeta| <= 0.5, stays within a factor 2 up to |zeta| ~ 1.5
  double C = 0.0, C_out = 0.0;
  for (const auto& p : random_points(10, 0.35, 5)) C = std::max(C, g_tilde_envelope_ratio(f.ctx, p));
  for (const auto& p : random_points(10, 1.0, 6)) C_out = std::max(C_out, g_tilde_envelope_ratio(f.ctx, p));
  CHECK(std::isfinite(C_out));
  CHECK(C_out <= 2.0 * C);
}

TEST_CASE("generating function identity") {
  auto& f = fx();
  GeneratingResult g0 = generating_check(f.fam, FockPoint{{0.0}, {0.0}}, 6);
  CHECK(g0.relative <= 1e-6);
  CHECK(g0.measured_ratio == doctest::Approx(std::sqrt(1.0 / (2.0 * kPi))).epsilon(1e-12));
  for (const auto& p : random_points(5, 0.35, 7)) {
    double r2 = generating_check(f.fam, p, 2).residual;
    double r4 = generating_check(f.fam, p, 4).residual;
    GeneratingResult g6 = generating_check(f.fam, p, 6);
    CHECK(r2 > r4);
    CHECK(r4 > g6.residual);
    CHECK(g6.residual <= 1e-4);
    CHECK(g6.measured_ratio == doctest::Approx(g6.expected_ratio).epsilon(1e-3));
    // (z, w) -> (-iz, -iw) carries the rotated identity onto the pre-rotation one
    FockPoint m{{cplx(0, -1) * p.z[0]}, {cplx(0, -1) * p.w[0]}};
    CHECK((generating_rhs(f.ctx, p).m - pre_rotation_rhs(f.ctx, m).m).norm() <=
          1e-12 * generating_rhs(f.ctx, p).m.norm());
    CHECK(pre_rotation_check(f.fam, m, 6).residual == doctest::Approx(g6.residual).epsilon(1e-8));
  }
}

TEST_CASE("Fourier integral route") {
  auto& f = fx();
  const int m = 10;
  TruncatedOperator I0 = fourier_integral(f.ctx, f.fam.at({0, 0}), m, f.q);
  CHECK((I0.m - f.fam.at({0, 0}).m).norm() <= 1e-3 * hs_norm(f.fam.at({0, 0})));
  TruncatedOperator I1 = fourier_integral(f.ctx, f.fam.at({1, 0}), m, f.q);
  CHECK((I1.m - cplx(0, -1) * f.fam.at({1, 0}).m).norm() <= 5e-3);
  for (const auto& mu : std::vector<MultiIndex>{{0, 1}, {2, 0}, {1, 1}, {0, 2}}) {
    TruncatedOperator Im = fourier_integral(f.ctx, f.fam.at(mu), m, f.q);
    CHECK((Im.m - fourier_series(f.fam, f.fam.at(mu)).m).norm() <= 5e-3);
  }
  cplx a(0.6, -0.2), b(-0.3, 0.5);
  TruncatedOperator comb = a * f.fam.at({0, 0}) + b * f.fam.at({1, 0});
  TruncatedOperator Ic = fourier_integral(f.ctx, comb, m, f.q);
  CHECK((Ic.m - (a * I0.m + b * I1.m)).norm() <= 1e-10);
}

TEST_CASE("Schatten norms") {
  auto& f = fx();
  const double inf = std::numeric_limits<double>::infinity();
  TruncatedOperator S0 = f.fam.at({0, 0});
  CHECK(schatten_norm(fourier_series(f.fam, S0), inf) == doctest::Approx(schatten_norm(S0, inf)).epsilon(1e-10));
  CHECK(schatten_norm(S0, inf) <= schatten_norm(S0, 1.0));
  for (unsigned s = 10; s < 15; ++s) {
    TruncatedOperator T = random_span(f.fam, s);
    TruncatedOperator FT = fourier_series(f.fam, T);
    CHECK(std::abs(schatten_norm(FT, 2.0) - schatten_norm(T, 2.0)) <= 1e-8);
    CHECK(schatten_norm(T, 2.0) == doctest::Approx(hs_norm(T)).epsilon(1e-12));
    for (double p : {1.0, 1.25, 1.5, 2.0}) {
      double pp = p == 1.0 ? inf : p / (p - 1.0);
      CHECK(schatten_norm(FT, pp) <= schatten_norm(T, p) + 1e-8);
    }
  }
}

TEST_CASE("Hardy check") {
  auto& f = fx();
  cplx c(0.7, 0.3);
  TruncatedOperator T = c * heat_semigroup(f.ctx, 0.5);
  HardyResult h = hardy_check(f.fam, T, std::norm(c));
  CHECK(h.pass);
  CHECK(std::abs(h.min_eig_T) <= 1e-12);
  CHECK(std::abs(h.min_eig_FT) <= 1e-12);
  HardyResult bad = hardy_check(f.fam, f.fam.at({1, 0}), 0.1);
  CHECK_FALSE(bad.pass);
  CHECK(std::min(bad.min_eig_T, bad.min_eig_FT) < 0);
  for (double C : {0.0, 1.0}) CHECK(hardy_check(f.fam, zero_op(f.ctx), C).pass);
}

TEST_CASE("U conjugation") {
  auto& f = fx();
  TruncatedOperator T = cplx(0.5, 0.1) * f.fam.at({0, 0}) + cplx(-0.2, 0.4) * f.fam.at({1, 0}) +
                        cplx(0.3, 0.0) * f.fam.at({1, 1}) + cplx(0.0, 0.6) * f.fam.at({0, 2});
  TruncatedOperator FT = fourier_series(f.fam, T);
  for (const auto& p : random_points(10, 0.7, 9)) {
    FockPoint m{{cplx(0, -1) * p.z[0]}, {cplx(0, -1) * p.w[0]}};
    cplx lhs = gauss_bargmann(f.ctx, FT, p, f.q);
    cplx rhs = gauss_bargmann(f.ctx, T, m, f.q);
    CHECK(std::abs(lhs - rhs) <= 1e-4 * std::max(std::abs(rhs), 1e-2));
  }
  QuadratureRule q2 = gauss_hermite_rule(48);
  for (const auto& mu : indices_up_to(2, 2)) {
    PhaseFunction fn = psi(mu, 1.0).function();
    for (double xi0 : {-0.7, 0.2, 1.1}) {
      double xi[2] = {xi0, 0.4 - 0.5 * xi0};
      cplx u = u_lambda_apply(fn, 1.0, xi, q2);
      cplx expect = mip(degree(mu)) * psi(mu, 1.0).at(xi);
      CHECK(std::abs(u - expect) <= 1e-5 * std::max(std::abs(expect), 1e-2));
    }
  }
}
