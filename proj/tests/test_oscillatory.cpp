#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rconv/oscillatory.hpp"
#include "rconv/random_fields.hpp"

using namespace rconv;
using std::numbers::pi;

namespace {

RVec vec1(double x) {
  RVec v(1);
  v << x;
  return v;
}

GridFunction gaussian_on(const GridSpec& spec, double width) {
  AnalyticField f;
  f.side = Side::spatial;
  f.eval = [width](const RVec& x) {
    return Complex(std::exp(-pi * x.squaredNorm() / (width * width)), 0.0);
  };
  return discretize(f, spec);
}

} // namespace

TEST_CASE("incremental phase: examples and linearity") {
  auto dot = make_phase("dot", 1);
  for (int k = 0; k < 20; ++k) {
    const double u = uniform01(3, 3 * k) - 0.5, v = uniform01(3, 3 * k + 1) - 0.5,
                 z = 2.0 * uniform01(3, 3 * k + 2) - 1.0;
    CHECK(delta_z_phi(dot, vec1(u), vec1(v), vec1(0.0)) == 0.0);
    CHECK(delta_z_phi(dot, vec1(u), vec1(v), vec1(z)) ==
          doctest::Approx(z * (u + v) - z * z).epsilon(1e-12));
  }
  // linearity in the phase: 2 uv + 3 u^2 as a polynomial
  auto mix = make_polynomial_phase(
      1, nlohmann::json::array({{{"coef", 2.0}, {"pu", {1}}, {"pv", {1}}},
                                {{"coef", 3.0}, {"pu", {2}}, {"pv", {0}}}}));
  auto usq = make_polynomial_phase(
      1, nlohmann::json::array({{{"coef", 1.0}, {"pu", {2}}, {"pv", {0}}}}));
  for (int k = 0; k < 20; ++k) {
    const auto u = vec1(uniform01(5, 2 * k) - 0.5), v = vec1(0.3),
               z = vec1(uniform01(5, 2 * k + 1) - 0.5);
    CHECK(delta_z_phi(mix, u, v, z) ==
          doctest::Approx(2.0 * delta_z_phi(dot, u, v, z) +
                          3.0 * delta_z_phi(usq, u, v, z))
              .epsilon(1e-12));
  }
}

TEST_CASE("analytic derivatives agree with finite differences") {
  auto psi = make_bump_amplitude(2, 1.0);
  for (const auto& label : {std::string("dot"), std::string("squares"),
                            std::string("rank-deficient")}) {
    auto phi = make_phase(label, 2);
    RVec u(2), v(2);
    u << 0.31, -0.42;
    v << -0.17, 0.55;
    const double eps = 1e-5;
    auto g = phi.grad(u, v);
    auto H = phi.hess(u, v);
    for (int var = 0; var < 4; ++var) {
      RVec up = u, um = u, vp = v, vm = v;
      if (var < 2) {
        up[var] += eps;
        um[var] -= eps;
      } else {
        vp[var - 2] += eps;
        vm[var - 2] -= eps;
      }
      const double fd =
          (phi.eval(up, vp) - phi.eval(um, vm)) / (2.0 * eps);
      CHECK(g[var] == doctest::Approx(fd).epsilon(1e-5));
      for (int var2 = 0; var2 < 4; ++var2) {
        auto gp = phi.grad(up, vp), gm = phi.grad(um, vm);
        CHECK(H(var2, var) ==
              doctest::Approx((gp[var2] - gm[var2]) / (2.0 * eps)).epsilon(1e-5));
      }
    }
  }
  (void)psi;
}

TEST_CASE("quadratic normal form reproduces the expanded increment") {
  // phi = -u1^2 + u2^2 - v1^2 + v2^2:  delta_z phi =
  //  ((z1-u1)^2-u1^2) - ((z2-u2)^2-u2^2) + ((z1-v1)^2-v1^2) - ((z2-v2)^2-v2^2)
  auto phi = make_polynomial_phase(
      2, nlohmann::json::array({{{"coef", -1.0}, {"pu", {2, 0}}, {"pv", {0, 0}}},
                                {{"coef", 1.0}, {"pu", {0, 2}}, {"pv", {0, 0}}},
                                {{"coef", -1.0}, {"pu", {0, 0}}, {"pv", {2, 0}}},
                                {{"coef", 1.0}, {"pu", {0, 0}}, {"pv", {0, 2}}}}));
  for (int k = 0; k < 25; ++k) {
    RVec u(2), v(2), z(2);
    for (int i = 0; i < 2; ++i) {
      u[i] = uniform01(11, 6 * k + i) - 0.5;
      v[i] = uniform01(11, 6 * k + 2 + i) - 0.5;
      z[i] = 2.0 * uniform01(11, 6 * k + 4 + i) - 1.0;
    }
    auto sq = [](double t) { return t * t; };
    const double expect = (sq(z[0] - u[0]) - sq(u[0])) - (sq(z[1] - u[1]) - sq(u[1])) +
                          (sq(z[0] - v[0]) - sq(v[0])) - (sq(z[1] - v[1]) - sq(v[1]));
    CHECK(delta_z_phi(phi, u, v, z) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("bump amplitude has unit mass and compact support") {
  for (int d : {1, 2}) {
    auto psi = make_bump_amplitude(d, 0.75);
    GridSpec spec{2 * d, 128, 2.0};
    double mass = 0;
    RVec u(d), v(d);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      RVec p = spec.point(i, Side::spatial);
      for (int k = 0; k < d; ++k) {
        u[k] = p[k];
        v[k] = p[d + k];
      }
      mass += psi.eval(u, v);
    }
    mass *= std::pow(spec.h(), 2 * d);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(psi.eval(RVec::Constant(d, 0.76), RVec::Zero(d)) == 0.0);
    CHECK(psi.eval(RVec::Zero(d), RVec::Constant(d, -0.9)) == 0.0);
    CHECK(psi.axis_profile(0.74) > 0.0);
  }
}

TEST_CASE("bilinear average: delta limit, bilinearity, resolution guard") {
  GridSpec spec{1, 256, 8.0};
  auto f = gaussian_on(spec, 1.0);
  auto g = gaussian_on(spec, 1.4);
  auto phi = make_phase("dot", 1);

  // lambda = 0 with a narrow unit-mass amplitude approximates f*g
  auto narrow = make_bump_amplitude(1, 0.08);
  auto M0 = m_lambda_apply(phi, narrow, 0.0, f, g);
  double worst = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Complex prod = f.values[i] * g.values[i];
    worst = std::max(worst, std::abs(M0.values[i] - prod));
  }
  CHECK(worst < 0.02);

  // bilinearity
  auto psi = make_bump_amplitude(1, 1.0);
  auto f2 = random_band_field(spec, 21, 6);
  auto g2 = random_band_field(spec, 22, 6);
  auto a = m_lambda_apply(phi, psi, 4.0, f, g2);
  auto b = m_lambda_apply(phi, psi, 4.0, f2, g2);
  GridFunction fsum(spec, Complex(0.5, 0.25) * f.values + 2.0 * f2.values);
  auto c = m_lambda_apply(phi, psi, 4.0, fsum, g2);
  CHECK((c.values - Complex(0.5, 0.25) * a.values - 2.0 * b.values)
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // guard names the required resolution
  try {
    m_lambda_apply(phi, psi, 1000.0, f, g);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("need N >=") != std::string::npos);
    const int needed = required_modes(phi, psi, 1000.0, spec.L);
    CHECK(std::string(e.what()).find(std::to_string(needed)) !=
          std::string::npos);
    CHECK(needed > spec.N);
  }
}

TEST_CASE("bilinear average matches a 4x-refined quadrature") {
  auto phi = make_phase("dot", 1);
  auto psi = make_bump_amplitude(1, 1.0);
  const double lambda = 16.0;
  GridSpec coarse{1, 512, 8.0}, fine{1, 2048, 8.0};
  auto Mc = m_lambda_apply(phi, psi, lambda, gaussian_on(coarse, 1.0),
                           gaussian_on(coarse, 1.3));
  auto Mf = m_lambda_apply(phi, psi, lambda, gaussian_on(fine, 1.0),
                           gaussian_on(fine, 1.3));
  const double nc = lp_norm(Mc, 2.0), nf = lp_norm(Mf, 2.0);
  CHECK(std::abs(nc - nf) / nf < 1e-4);
}

TEST_CASE("surface transform: autocorrelation limit and mass bound") {
  auto psi = make_bump_amplitude(1, 1.0);
  auto dot = make_phase("dot", 1);
  Phase generic = dot;
  generic.separable_delta = false; // force the triple loop

  // at lambda = 0 the fast split and the generic quadrature agree
  const double step = 1.0 / 16;
  for (double xi : {0.0, 0.5, 1.25}) {
    const Complex fast = sigma_phi_hat(dot, psi, vec1(xi), 0.0, step);
    const Complex slow = sigma_phi_hat(generic, psi, vec1(xi), 0.0, step);
    CHECK(std::abs(fast - slow) < 1e-10);
  }
  // and at lambda > 0 as well
  const Complex fast = sigma_phi_hat(dot, psi, vec1(0.5), 3.0, step);
  const Complex slow = sigma_phi_hat(generic, psi, vec1(0.5), 3.0, step);
  CHECK(std::abs(fast - slow) < 1e-10);

  const Complex mass = sigma_phi_hat(dot, psi, vec1(0.0), 0.0, step);
  CHECK(mass.real() > 0.0);
  CHECK(std::abs(mass.imag()) < 1e-12);
  for (int k = 0; k < 5; ++k) {
    const double xi = 3.0 * uniform01(7, 2 * k) - 1.5;
    const double lam = 4.0 * uniform01(7, 2 * k + 1);
    CHECK(std::abs(sigma_phi_hat(dot, psi, vec1(xi), lam, step)) <=
          mass.real() + 1e-9);
  }
}

TEST_CASE("oscillatory L2 bound holds on random inputs") {
  GridSpec spec{1, 256, 8.0};
  auto phi = make_phase("dot", 1);
  auto psi = make_bump_amplitude(1, 1.0);
  for (double lambda : {0.0, 4.0, 8.0}) {
    for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
      auto f = random_band_field(spec, seed, 10);
      auto g = random_band_field(spec, seed + 100, 10);
      auto rep = verify_oscillatory_bound(phi, psi, lambda, f, g);
      CHECK(rep.pass);
      CHECK(rep.ratio <= 1.0 + 1e-6);
      // scaling invariance of the ratio
      GridFunction fs(spec, Complex(3.7, 0.0) * f.values);
      auto rep2 = verify_oscillatory_bound(phi, psi, lambda, fs, g);
      CHECK(rep2.ratio == doctest::Approx(rep.ratio).epsilon(1e-10));
    }
  }
}

TEST_CASE("sigma route dominates 50 empirical Rayleigh ratios") {
  GridSpec spec{1, 512, 8.0};
  auto phi = make_phase("squares", 1);
  auto psi = make_bump_amplitude(1, 1.0);
  const double lambda = 8.0;
  const double upper = std::sqrt(sigma_sup_lattice(phi, psi, lambda, spec));
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto f = random_band_field(spec, 1000 + s, 12);
    auto g = random_band_field(spec, 2000 + s, 12);
    const double ratio = lp_norm(m_lambda_apply(phi, psi, lambda, f, g), 2.0) /
                         (lp_norm(f, 2.0) * lp_norm(g, 2.0));
    CHECK(ratio <= upper * (1.0 + 1e-9));
  }
}

TEST_CASE("lambda scan: nondegenerate d=1 phases decay like lambda^{-1/2}") {
  auto psi = make_bump_amplitude(1, 0.25);
  for (const auto& label : {std::string("dot"), std::string("squares")}) {
    auto phi = make_phase(label, 1);
    auto scan =
        lambda_decay_scan(phi, psi, 1, {16, 32, 64, 128, 256}, 15);
    CHECK_FALSE(scan.degenerate);
    for (const auto& p : scan.points) {
      CHECK(p.lower <= p.upper * (1.0 + 1e-9));
      CHECK(p.lower > 0.25 * p.upper); // refinement comes close to the bound
    }
    CHECK(scan.upper_fit.slope == doctest::Approx(-0.5).epsilon(0.5));
    CHECK(scan.lower_fit.slope == doctest::Approx(-0.5).epsilon(0.5));
  }
}

TEST_CASE("lambda scan: fully degenerate phase shows no decay") {
  auto psi = make_bump_amplitude(1, 0.25);
  auto scan = lambda_decay_scan(make_phase("zero", 1), psi, 1, {16, 32, 64}, 8);
  CHECK(scan.degenerate);
  CHECK(scan.upper_fit.slope >= -0.1);
  CHECK(scan.lower_fit.slope >= -0.1);
}

TEST_CASE("lambda scan: Hessian rank orders the fitted decay (d=2)") {
  auto psi = make_bump_amplitude(2, 0.25);
  std::vector<double> ls{8, 16, 32};
  auto full = lambda_decay_scan(make_phase("dot", 2), psi, 2, ls, 6);
  auto partial =
      lambda_decay_scan(make_phase("rank-deficient", 2), psi, 2, ls, 6);
  auto flat = lambda_decay_scan(make_phase("zero", 2), psi, 2, ls, 6);
  CHECK_FALSE(full.degenerate);
  CHECK(partial.degenerate);
  CHECK(full.upper_fit.slope < partial.upper_fit.slope + 0.05);
  CHECK(partial.upper_fit.slope < flat.upper_fit.slope + 0.05);
  CHECK(flat.upper_fit.slope >= -0.1);
}
