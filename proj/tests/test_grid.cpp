#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "rconv/grid.hpp"

using namespace rconv;
using std::numbers::pi;

namespace {

GridFunction random_field(const GridSpec& spec, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  GridFunction f = GridFunction::zero(spec);
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    f.values[i] = Complex(gauss(rng), gauss(rng));
  return f;
}

} // namespace

TEST_CASE("constant function transforms to a single zero mode") {
  GridSpec spec{2, 16, 16.0};
  AnalyticField one{[](const RVec&) { return Complex(1.0, 0.0); }, Side::spatial};
  auto c = dft(discretize(one, spec));
  // c[0] = h^2 * N^2 = L^2
  auto idx0 = spec.flatten({0, 0});
  CHECK(std::abs(c.coeffs[idx0] - Complex(spec.L * spec.L, 0)) < 1e-9);
  double off = 0;
  for (std::size_t f = 0; f < spec.size(); ++f)
    if (f != idx0) off = std::max(off, std::abs(c.coeffs[f]));
  CHECK(off < 1e-9);
}

TEST_CASE("unit impulse has flat coefficients h^n") {
  GridSpec spec{1, 64, 16.0};
  GridFunction f = GridFunction::zero(spec);
  f.values[spec.storage_index(0)] = 1.0;
  auto c = dft(f);
  for (Eigen::Index i = 0; i < c.coeffs.size(); ++i)
    CHECK(std::abs(c.coeffs[i] - Complex(spec.h(), 0)) < 1e-14);
}

TEST_CASE("Gaussian is its own Fourier transform") {
  // exp(-pi |x|^2) maps to exp(-pi |xi|^2) under the e^{-2 pi i x.xi} convention
  for (int n : {1, 2}) {
    GridSpec spec{n, 64, 8.0}; // frequency window [-4,4): Gaussian aliases < 1e-21
    AnalyticField g{[](const RVec& x) {
                      return Complex(std::exp(-pi * x.squaredNorm()), 0);
                    },
                    Side::spatial};
    auto c = dft(discretize(g, spec));
    for (std::size_t flat = 0; flat < spec.size(); flat += 7) {
      const RVec xi = spec.point(flat, Side::frequency);
      const double expect = std::exp(-pi * xi.squaredNorm());
      CHECK(std::abs(c.coeffs[static_cast<Eigen::Index>(flat)] - Complex(expect, 0)) <
            1e-10);
    }
  }
}

TEST_CASE("single harmonic lands on one lattice mode") {
  GridSpec spec{1, 64, 16.0};
  const double xi0 = 3.0 / spec.L; // m = 3
  AnalyticField h{[&](const RVec& x) {
                    return std::exp(Complex(0, 2 * pi * xi0 * x[0]));
                  },
                  Side::spatial};
  auto c = dft(discretize(h, spec));
  for (int s = 0; s < spec.N; ++s) {
    const double expect = spec.signed_index(s) == 3 ? spec.L : 0.0;
    CHECK(std::abs(c.coeffs[s] - Complex(expect, 0)) < 1e-9);
  }
}

TEST_CASE("round trip and Plancherel") {
  GridSpec spec{3, 16, 8.0};
  auto f = random_field(spec, 7);
  auto c = dft(f);
  auto back = idft(c);
  CHECK((back.values - f.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(lp_norm(f, 2) == doctest::Approx(lp_norm(c, 2)).epsilon(1e-12));
}

TEST_CASE("dft is linear") {
  GridSpec spec{2, 16, 16.0};
  auto f = random_field(spec, 1), g = random_field(spec, 2);
  const Complex a(0.3, -1.1), b(2.0, 0.7);
  GridFunction mix(spec, a * f.values + b * g.values);
  CVec expect = a * dft(f).coeffs + b * dft(g).coeffs;
  CHECK((dft(mix).coeffs - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tensor product separates the transform") {
  GridSpec spec{1, 16, 8.0};
  auto f = random_field(spec, 3), g = random_field(spec, 4);
  auto prod = tensor_product({f, g});
  auto cf = dft(f), cg = dft(g), cp = dft(prod);
  for (int s1 = 0; s1 < spec.N; ++s1)
    for (int s2 = 0; s2 < spec.N; ++s2) {
      const Complex expect = cf.coeffs[s1] * cg.coeffs[s2];
      CHECK(std::abs(cp.coeffs[prod.spec.flatten({s1, s2})] - expect) < 1e-10);
    }
}

TEST_CASE("lp norms of reference fields") {
  GridSpec spec{1, 64, 16.0};
  AnalyticField one{[](const RVec&) { return Complex(1, 0); }, Side::spatial};
  auto f = discretize(one, spec);
  CHECK(lp_norm(f, 1) == doctest::Approx(16.0).epsilon(1e-12)); // L * 1
  CHECK(lp_norm(f, infinity()) == doctest::Approx(1.0));

  AnalyticField g{[](const RVec& x) {
                    return Complex(std::exp(-pi * x.squaredNorm()), 0);
                  },
                  Side::spatial};
  // ||e^{-pi x^2}||_2 = 2^{-1/4}
  CHECK(lp_norm(discretize(g, spec), 2) ==
        doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-10));
}

TEST_CASE("sobolev norm properties") {
  GridSpec spec{2, 32, 16.0};
  auto f = random_field(spec, 11);
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(lp_norm(f, 2)).epsilon(1e-12));

  // single harmonic at |xi| = m/L scales by (1 + |xi|^2)^{s/2}
  GridSpec s1{1, 64, 16.0};
  Spectrum c = Spectrum::zero(s1);
  c.coeffs[s1.storage_index(8)] = 1.0; // xi = 0.5
  const double w = std::sqrt(1.0 + 0.25);
  CHECK(sobolev_norm(c, 1.0) == doctest::Approx(w * lp_norm(c, 2)).epsilon(1e-12));

  CHECK(sobolev_norm(f, 1.0) >= sobolev_norm(f, 0.5));
  CHECK(sobolev_norm(f, 0.5) >= sobolev_norm(f, 0.0));
}

TEST_CASE("grid file round trip") {
  GridSpec spec{2, 16, 16.0};
  auto f = random_field(spec, 21);
  const std::string path = "test_grid_roundtrip.bin";
  save_grid(path, spec, f.values, Side::spatial);
  auto back = load_grid(path);
  CHECK(back.spec == spec);
  CHECK(back.side == Side::spatial);
  CHECK((back.data - f.values).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("spec validation rejects bad input") {
  CHECK_THROWS(validate_spec(GridSpec{1, 63, 16.0}));
  CHECK_THROWS(validate_spec(GridSpec{0, 64, 16.0}));
  CHECK_THROWS(validate_spec(GridSpec{1, 64, -1.0}));
  CHECK_THROWS(validate_spec(GridSpec{6, 64, 16.0})); // 64^6 > 2^26
}

TEST_CASE("discretize rejects non-finite samples") {
  GridSpec spec{1, 16, 16.0};
  AnalyticField bad{[](const RVec& x) {
                      return Complex(1.0 / x.squaredNorm(), 0); // inf at 0
                    },
                    Side::spatial};
  CHECK_THROWS(discretize(bad, spec));
}

TEST_CASE("deterministic pairwise summation") {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (1.0 + i);
  const double a = tree_sum(xs);
  const double b = tree_sum(xs);
  CHECK(a == b);
  double ref = 0;
  for (double x : xs) ref += x;
  CHECK(a == doctest::Approx(ref).epsilon(1e-12));
}
