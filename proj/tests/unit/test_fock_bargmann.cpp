#include <cmath>
#include <random>

#include "doctest.h"
#include "qherm/fock_bargmann.hpp"
#include "qherm/quantum_hermite.hpp"

using namespace qherm;

namespace {

std::vector<FockPoint> random_points(int count, double scale, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<FockPoint> pts;
  for (int i = 0; i < count; ++i) pts.push_back({{cplx(u(rng), u(rng))}, {cplx(u(rng), u(rng))}});
  return pts;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

HoloFunction zeta_fn(const MultiIndex& mu) {
  return [mu](std::span<const cplx> w) { return zeta_mu(mu, w); };
}

// Phi_mu on R^2 with its entire continuation
HoloFunction phi_fn(const MultiIndex& mu) {
  return [mu](std::span<const cplx> x) {
    cplx v = 1.0;
    for (std::size_t j = 0; j < mu.size(); ++j) v *= hermite_all_complex(mu[j], x[j])[mu[j]];
    return v;
  };
}

}  // namespace

TEST_CASE("deformation map") {
  for (double lam : {0.5, 1.0, 2.0}) {
    DeformationMap d = deformation_map(lam, 1);
    FockPoint zero{{0.0}, {0.0}};
    FockPoint s0 = sigma_map(d, zero);
    CHECK(std::abs(s0.z[0]) == 0.0);
    CHECK(std::abs(s0.w[0]) == 0.0);
    CHECK(std::abs(d.real_form().determinant()) == doctest::Approx(std::pow(d.delta, 4)).epsilon(1e-12));
    CHECK(d.real_form(false).determinant() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& p : random_points(5, 1.0, 7)) {
      FockPoint q = d.apply(p);
      std::vector<double> r = p.real_coords();
      Eigen::Vector4d rv(r[0], r[1], r[2], r[3]);
      Eigen::Vector4d qv = d.real_form() * rv;
      std::vector<double> qr = q.real_coords();
      for (int k = 0; k < 4; ++k) CHECK(qv[k] == doctest::Approx(qr[k]).epsilon(1e-13));
      FockPoint back = d.inverse(q);
      CHECK(std::abs(back.z[0] - p.z[0]) < 1e-13);
      CHECK(std::abs(back.w[0] - p.w[0]) < 1e-13);
    }
  }
  DeformationMap d0 = deformation_map(1e-6, 1);
  FockPoint p{{cplx(0.3, -0.2)}, {cplx(-0.7, 0.5)}};
  FockPoint q = d0.apply(p);
  CHECK(std::abs(q.z[0] - p.z[0]) < 1e-6);
  CHECK(std::abs(q.w[0] - p.w[0]) < 1e-6);
}

TEST_CASE("kernel identity under sigma") {
  const double lam = 1.0;
  DeformationMap d = deformation_map(lam, 1);
  auto pa = random_points(10, 1.2, 11), pb = random_points(10, 1.2, 12);
  for (int i = 0; i < 10; ++i) {
    const FockPoint &zp = pa[i], &z = pb[i];
    FockPoint sp = d.apply(zp), s = d.apply(z);
    cplx lhs = std::exp(0.5 * (sp.z[0] * std::conj(s.z[0]) + sp.w[0] * std::conj(s.w[0])));
    FockPoint zb{{std::conj(z.z[0])}, {std::conj(z.w[0])}};
    cplx dot = zp.z[0] * zb.z[0] + zp.w[0] * zb.w[0];
    cplx rhs = std::exp(0.5 * lam / std::tanh(lam) * dot) * std::exp(-cplx(0, 0.5 * lam) * fock_bracket(zp, zb));
    CHECK(rel(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("classical Bargmann") {
  QuadratureRule q = gauss_hermite_rule(64);
  std::vector<cplx> ws = {0.0, cplx(0.5, 0.2), cplx(-1.0, 0.7), cplx(0.3, -1.1), cplx(1.4, 0.0)};
  for (cplx w : ws) {
    cplx arg[1] = {w};
    for (int k : {0, 1, 2}) {
      HoloFunction h = [k](std::span<const cplx> x) { return hermite_all_complex(k, x[0])[k]; };
      cplx b = bargmann_classical(h, 0.5, arg, q);
      cplx expect = zeta_mu({k}, arg);
      if (k == 0) CHECK(rel(b, expect) <= 1e-10);
      else CHECK(std::abs(b - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
    }
    HoloFunction z = [](std::span<const cplx>) { return cplx(0.0); };
    CHECK(bargmann_classical(z, 0.5, arg, q) == cplx(0.0));
  }
  // declared decay much faster than the actual growth
  HoloFunction grow = [](std::span<const cplx> x) { return std::exp(0.45 * x[0] * x[0]); };
  cplx w0[1] = {0.0};
  CHECK_THROWS_AS(bargmann_classical(grow, 0.5, w0, gauss_hermite_rule(16)), DecayError);
}

TEST_CASE("weights") {
  auto pts = random_points(6, 1.5, 21);
  for (const auto& p : pts) {
    // the closed form tends to 4^n w_0; w_0 itself is a separate normalization
    CHECK(weight_w(1e-6, p) == doctest::Approx(4.0 * weight_w0(p)).epsilon(1e-4));
    for (double lam : {0.5, 1.0, 2.0}) {
      DeformationMap d = deformation_map(lam, 1);
      double lhs = weight_w0(d.apply(p)) * (4.0 * kPi);
      double rhs = weight_w(lam, p) / (4.0 * c_n_lambda(1, lam));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      CHECK(weight_w(lam, p) > 0);
    }
  }
}

TEST_CASE("isometry of T_lambda") {
  for (double lam : {0.5, 1.0, 2.0}) {
    DeformationMap d = deformation_map(lam, 1);
    FockRule rule = fock_rule(lam, 1, 16);
    for (const auto& mu : indices_up_to(2, 2)) {
      for (const auto& nu : indices_up_to(2, 2)) {
        cplx s = 0.0;
        HoloFunction fm = zeta_fn(mu), fn = zeta_fn(nu);
        for (std::size_t i = 0; i < rule.points.size(); ++i)
          s += rule.weights[i] * t_lambda(fm, d, rule.points[i]) * std::conj(t_lambda(fn, d, rule.points[i]));
        double expect = mu == nu ? 1.0 : 0.0;
        CHECK(std::abs(s - expect) <= 2e-3);
      }
    }
  }
}

TEST_CASE("reproducing kernel and d") {
  double d_small = calibrate_d(1e-4);
  CHECK(d_small == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-3));
  for (double lam : {0.5, 1.0, 2.0}) {
    double dc = calibrate_d(lam);
    CHECK(dc > 0);
    // closed form from the change of variables under sigma
    CHECK(dc == doctest::Approx(c_n_lambda(1, lam)).epsilon(1e-10));
    DeformationMap d = deformation_map(lam, 1);
    FockRule rule = fock_rule(lam, 1, 16);
    for (const auto& mu : std::vector<MultiIndex>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
      HoloFunction F = zeta_fn(mu);
      std::vector<cplx> vals;
      for (const auto& p : rule.points) vals.push_back(t_lambda(F, d, p));
      for (const auto& z : random_points(5, 0.8, 31)) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < rule.points.size(); ++i)
          s += rule.weights[i] * vals[i] * std::conj(reproducing_kernel(lam, z, rule.points[i], dc));
        cplx expect = t_lambda(F, d, z);
        CHECK(std::abs(s - expect) <= 1e-3 * std::max(std::abs(expect), 1e-2));
      }
    }
    for (const auto& z : random_points(3, 1.0, 41)) {
      cplx k = reproducing_kernel(lam, z, z, dc);
      CHECK(std::abs(k.imag()) <= 1e-14 * std::abs(k));
      CHECK(k.real() > 0);
    }
  }
}

TEST_CASE("twisted Bargmann on Psi_mu") {
  QuadratureRule q = gauss_hermite_rule(32);
  for (double lam : {0.5, 1.0, 2.0}) {
    DeformationMap d = deformation_map(lam, 1);
    double a = a_n_lambda(1, lam);
    auto pts = random_points(10, 0.8, 51);
    for (const auto& mu : indices_up_to(2, 3)) {
      PhaseFunction f = psi(mu, lam).function();
      HoloFunction bphi = [mu, &q](std::span<const cplx> w) { return bargmann_classical(phi_fn(mu), 0.5, w, q); };
      for (const auto& p : pts) {
        cplx b = bargmann_twisted(lam, f, p, q);
        cplx expect = a * zeta_mu(mu, d.apply(p).flat());
        CHECK(std::abs(b - expect) <= 1e-5 * std::max(std::abs(expect), 1e-2));
        // T_lambda applied to the classical transform of Phi_mu
        cplx tb = t_lambda(bphi, d, p);
        CHECK(std::abs(b - tb) <= 1e-4 * std::max(std::abs(tb), 1e-2));
      }
    }
  }
}

TEST_CASE("twisted Bargmann isometry on Psi_0") {
  const double lam = 1.0;
  FockRule rule = fock_rule(lam, 1, 8);
  PhaseFunction f = psi({0, 0}, lam).function();
  QuadratureRule q = gauss_hermite_rule(24);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i)
    s += rule.weights[i] * std::norm(bargmann_twisted(lam, f, rule.points[i], q));
  CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("small lambda limit of B_lambda") {
  const double lam = 1e-4;
  QuadratureRule q = gauss_hermite_rule(32);
  PhaseFunction f;
  f.n = 1;
  f.decay = 0.5;
  HoloFunction g = [](std::span<const cplx> x) {
    return (1.0 + x[0] - 0.5 * x[1] * x[1]) * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
  };
  f.f = g;
  for (const auto& p : random_points(5, 0.8, 61)) {
    cplx bl = bargmann_twisted(lam, f, p, q);
    cplx bc = bargmann_classical(g, 0.5, p.flat(), q);
    // factor 2^{-n} between the two normalizations
    CHECK(std::abs(bl - 0.5 * bc) <= 1e-3 * std::abs(0.5 * bc));
  }
}

TEST_CASE("Gauss-Bargmann transform") {
  const double lam = 1.0;
  auto ctx = build_context(lam, 1, 32);
  QuadratureRule q = gauss_hermite_rule(64);
  PhaseFunction f = psi({0, 0}, lam).function();
  TruncatedOperator Wf = weyl(ctx, f, q);
  for (const auto& p : random_points(5, 0.8, 71)) {
    cplx g = gauss_bargmann(ctx, Wf, p, q);
    cplx b = bargmann_twisted(lam, f, p, q);
    CHECK(rel(g, b) <= 1e-5);
    CHECK(gauss_bargmann(ctx, zero_op(ctx), p, q) == cplx(0.0));
  }

  QuantumHermiteFamily fam = family_ladder(ctx, 3);
  DeformationMap d = deformation_map(lam, 1);
  for (const auto& mu : fam.order) {
    for (const auto& p : random_points(3, 0.8, 81)) {
      cplx g = gauss_bargmann(ctx, fam.at(mu), p, q);
      cplx expect = a_n_lambda(1, lam) * zeta_mu(mu, d.apply(p).flat());
      CHECK(std::abs(g - expect) <= 1e-6 * std::max(std::abs(expect), 1e-2));
    }
  }

  // holomorphy
  TruncatedOperator T = fam.at({1, 0}) + cplx(0.3, 0.1) * fam.at({0, 2});
  HoloFunction G = [&](std::span<const cplx> v) { return gauss_bargmann(ctx, T, FockPoint::from_flat(v), q); };
  for (const auto& p : random_points(3, 0.7, 91)) CHECK(cauchy_riemann_residual(G, p, 1) <= 1e-5);

  // growth bound fitted on an inner grid, re-checked further out
  std::vector<FockPoint> inner, outer;
  for (double r : {0.0, 0.5, 1.0})
    for (double t : {0.0, 1.3, 2.6, 3.9, 5.2}) {
      FockPoint p{{cplx(r * std::cos(t), r * std::sin(t))}, {cplx(0.4 * r, -0.3 * r)}};
      inner.push_back(p);
      outer.push_back({{1.8 * p.z[0]}, {1.8 * p.w[0]}});
    }
  TruncatedOperator S = fam.at({1, 1});
  double C = growth_constant(ctx, S, inner, q);
  CHECK(std::isfinite(C));
  CHECK(C > 0);
  CHECK(growth_constant(ctx, S, outer, q) <= 2.0 * std::max(C, 1.0));
}

TEST_CASE("CSV output") {
  std::vector<FockPoint> pts = {{{cplx(1, 2)}, {cplx(3, 4)}}};
  std::string csv = bargmann_csv(pts, {cplx(0.5, -0.25)});
  CHECK(csv == "re_z,im_z,re_w,im_w,re_val,im_val\n1,2,3,4,0.5,-0.25\n");
}
